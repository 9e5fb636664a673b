"""Exception types shared across the package.

The command-line driver maps these onto its exit-code contract, so modules
raise these rather than bare ValueErrors for failures a caller may want to
distinguish: configuration problems, numeric failures (singular systems,
truncation tails, non-cancelling limits), and cache corruption.
"""

from __future__ import annotations

__all__ = [
    "CorrboundError",
    "ConfigError",
    "NumericError",
    "SingularInputError",
    "ExpansionError",
    "SingularSystemError",
    "TailToleranceError",
    "CacheCorruptError",
]


class CorrboundError(Exception):
    """Base class for package-specific failures."""


class ConfigError(CorrboundError):
    """Invalid or unsupported configuration (exit code 1)."""


class NumericError(CorrboundError):
    """A rigorous computation could not be completed (exit code 2)."""


class SingularInputError(NumericError):
    """Closed-form evaluation hit a vanishing denominator; the caller must
    route the point through the limit evaluator."""


class ExpansionError(NumericError):
    """Series coefficients that must cancel at a removable singularity did
    not cancel; indicates a transcribed-formula bug, not a data problem."""


class SingularSystemError(NumericError):
    """An interval pivot enclosed zero during elimination.  Retry with more
    precision, a larger truncation box, or a reduced basis."""


class TailToleranceError(NumericError):
    """The lattice-sum tail estimate exceeded the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class CacheCorruptError(CorrboundError):
    """A cache record failed to parse or verify (exit code 3)."""
