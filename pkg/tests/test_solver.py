"""Tests for the rank-one system solve and the bound certificate.

The quadratic form J(c) = c'Ac/(c'b)^2 is minimized by the solution of
Ac = b, where it equals 1/(c'b).  The certificate must upper-bound J at
the reported coefficients whatever they are; optimality is checked here
against brute-force grid enumeration and random perturbations.
"""

import json
import random
from fractions import Fraction as F

import pytest

from corrbound.arith import Interval
from corrbound.errors import ConfigError, SingularSystemError
from corrbound.functionals import GramSystem, TruncationParams, assemble_gram
from corrbound.solver import (
    BoundCertificate,
    certify_bound,
    fraction_bound,
    interval_cholesky,
    solve_rank1,
)
from corrbound.symmetry import invariant_poly_basis, invariant_shift_basis


def exact_sys(A, b, n=3):
    return GramSystem(
        A=[[F(v) for v in row] for row in A],
        b=[F(v) for v in b],
        meta={"n": n, "m": 1, "param": "poly", "exact": True},
    )


# --------------------------------------------------------------- the solve


def test_identity_system():
    sysm = exact_sys([[1, 0], [0, 1]], [1, 0])
    assert solve_rank1(sysm) == [F(1), F(0)]
    assert certify_bound(sysm, [F(1), F(0)]).bound == F(1)


def test_diagonal_system_optimum_beats_grid():
    sysm = exact_sys([[1, 0], [0, 2]], [1, 1])
    c = solve_rank1(sysm)
    assert c == [F(1), F(1, 2)]
    best = certify_bound(sysm, c).bound
    assert best == F(2, 3)
    # brute force over rank-one candidates: no grid point does better
    for i in range(-20, 21):
        for j in range(-20, 21):
            v = (F(i, 10), F(j, 10))
            cb = v[0] + v[1]
            if cb == 0:
                continue
            val = (v[0] ** 2 + 2 * v[1] ** 2) / cb**2
            assert val >= best


def test_exact_inconsistent_system_raises():
    with pytest.raises(SingularSystemError):
        solve_rank1(exact_sys([[1, 1], [1, 1]], [1, 2]))


def test_exact_dependent_column_is_dropped():
    sysm = exact_sys([[1, 0], [0, 0]], [1, 0])
    dropped = []
    c = solve_rank1(sysm, dropped)
    assert dropped == [1]
    assert c == [F(1), F(0)]


def test_fat_interval_pivot_falls_back_to_midpoints():
    # every interval pivot of the second column encloses zero too widely
    # for sign verification; the midpoint system has exact rank 1
    wide = Interval.from_endpoints(F(9, 10), F(11, 10))
    one = Interval.from_fraction(F(1), 256)
    sysm = GramSystem(
        A=[[wide, wide], [wide, wide]],
        b=[one, one],
        meta={"n": 3, "m": 1, "param": "shift", "exact": False},
    )
    dropped = []
    c = solve_rank1(sysm, dropped)
    assert dropped == [1]
    cert = certify_bound(sysm, c)
    assert cert.bound.contains(F(1))


# ------------------------------------------------------------- certificates


def test_certificate_is_scale_invariant_exact():
    sysm = assemble_gram(3, 1, invariant_poly_basis(3, 2))
    c = solve_rank1(sysm)
    base = certify_bound(sysm, c).bound
    for alpha in (F(2), F(-3), F(7, 11)):
        assert certify_bound(sysm, [alpha * ci for ci in c]).bound == base


def test_certificate_is_scale_invariant_interval():
    basis = invariant_shift_basis(3, 1, 0)
    sysm = assemble_gram(3, 1, basis, params=TruncationParams(n=3, m=1, C=50))
    c = solve_rank1(sysm)
    base = certify_bound(sysm, c).bound
    scaled = certify_bound(sysm, [ci * F(5, 3) for ci in c]).bound
    assert base.overlaps(scaled)


def test_perturbed_coefficients_never_beat_the_solve():
    sysm = assemble_gram(3, 1, invariant_poly_basis(3, 2))
    c = solve_rank1(sysm)
    best = certify_bound(sysm, c).bound
    rng = random.Random(20260814)
    for _ in range(100):
        noisy = [ci + F(rng.randrange(-10**3, 10**3), 10**9) for ci in c]
        assert certify_bound(sysm, noisy).bound >= best


def test_certificate_snaps_interval_coefficients_to_rationals():
    basis = invariant_shift_basis(3, 1, 0)
    sysm = assemble_gram(3, 1, basis, params=TruncationParams(n=3, m=1, C=100))
    c = solve_rank1(sysm)
    assert isinstance(c[0], Interval)
    cert = certify_bound(sysm, c)
    assert isinstance(cert.c[0], F)
    assert cert.bound.contains(F(13, 90))


def test_certificate_rejects_null_normalization():
    sysm = exact_sys([[1, 0], [0, 1]], [1, -1])
    with pytest.raises(SingularSystemError):
        certify_bound(sysm, [F(1), F(1)])
    with pytest.raises(ConfigError):
        certify_bound(sysm, [F(1)])


def test_certificate_json_round_trip():
    sysm = assemble_gram(3, 1, invariant_poly_basis(3, 2))
    cert = certify_bound(sysm, solve_rank1(sysm))
    blob = cert.to_json()
    assert blob == cert.to_json()
    doc = json.loads(blob)
    assert set(doc) == {"bound", "c", "dropped", "fraction", "meta"}
    assert doc["bound"]["exact"] == "205381/2532285"
    assert doc["bound"]["mid"].startswith("0.08110500990")
    assert doc["meta"]["param"] == "poly"


# ---------------------------------------------------------- fraction bound


def test_fraction_bound_reference_points():
    assert fraction_bound(3, F(77197284, 10**9)) >= F(9614, 10**4)
    assert fraction_bound(4, F(447, 3500)) >= F(9787, 10**4)
    assert fraction_bound(2, F(0)) == 1


def test_fraction_bound_interval_rounds_outward():
    bound = Interval.from_endpoints(F(77, 1000), F(78, 1000))
    frac = fraction_bound(3, bound)
    assert frac.lo_fraction <= 1 - F(78, 1000) / 2
    assert frac.hi_fraction >= 1 - F(77, 1000) / 2


# --------------------------------------------------------- psd diagnostics


def test_cholesky_certifies_polynomial_system():
    sysm = assemble_gram(3, 1, invariant_poly_basis(3, 4))
    pivots = interval_cholesky(sysm)
    assert all(p > 0 for p in pivots)


def test_cholesky_certifies_shift_system():
    basis = invariant_shift_basis(3, 1, 1)
    sysm = assemble_gram(3, 1, basis, params=TruncationParams(n=3, m=1, C=60))
    pivots = interval_cholesky(sysm)
    assert all(p.lo_fraction > 0 for p in pivots)


def test_cholesky_rejects_indefinite_matrix():
    with pytest.raises(SingularSystemError):
        interval_cholesky(exact_sys([[1, 2], [2, 1]], [1, 1]))
