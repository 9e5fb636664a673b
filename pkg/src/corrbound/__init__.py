"""Certified upper bounds on sine-kernel correlation functionals.

The package computes rigorous upper bounds for the minimal value of the
n-level correlation functional over admissible band-limited functions,
and converts them into lower bounds on the fraction of points with bounded
multiplicity.  Two parametrizations are implemented: an exact-rational
polynomial pipeline for (n, m) = (3, 1) and an interval-certified lattice
shift pipeline for n in {2, 3, 4}.
"""

from .arith import (
    DEFAULT_PREC,
    Interval,
    MultiPoly,
    Rational,
    interval_contains,
    poly_integrate_iterated,
    poly_symmetrize,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PREC",
    "Interval",
    "MultiPoly",
    "Rational",
    "interval_contains",
    "poly_integrate_iterated",
    "poly_symmetrize",
    "__version__",
]
