"""Tests for the correlation functionals on both assembly routes.

Frozen rational values were confirmed against oracles independent of the
closed forms under test:

    constant-basis diagonal        2-D quadrature  0.0812733  == 13/160
    constant-basis normalization   transform at 0  0.75       == 3/4
    flat optimum  (13/160)/(3/4)^2                            == 13/90

The quadrature oracle integrates the squared body transform against the
three-point determinant over a box, extrapolating the slow 1/L box tail
from two box sizes.  Both computations live in this file and share nothing
with the closed forms they check.
"""

import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from corrbound.arith import Interval, MultiPoly, iv_pi
from corrbound.errors import CacheCorruptError, ConfigError, TailToleranceError
from corrbound.functionals import (
    GramSystem,
    SincMatrixEvaluator,
    TruncationParams,
    assemble_gram,
    b_poly,
    b_shift,
    default_shift,
    nu3_poly,
    nu_shift,
    w_eval,
)
from corrbound.polytopes import HPolytope, ft_H
from corrbound.symmetry import invariant_poly_basis, invariant_shift_basis


def mid(x):
    return float(x) if isinstance(x, F) else float(x.mid_fraction)


# ------------------------------------------------------- determinant values


def test_two_point_determinant_at_half():
    # 1 - sinc(1/2)^2 = 1 - (2/pi)^2
    v = w_eval(2, (F(1, 2), 0))
    pi = iv_pi(256)
    target = Interval.from_int(1, 256) - Interval.from_int(4, 256) / (pi * pi)
    assert v.overlaps(target)
    assert v.rad_fraction < F(1, 10**70)


def test_determinant_vanishes_on_coincident_points():
    for n, x in [(2, (F(0),)), (3, (F(1, 3), F(1, 3))), (4, (F(1, 2), F(-2, 7), F(1, 2)))]:
        v = w_eval(n, tuple(x) + (0,))
        assert v.contains_zero()
        assert v.rad_fraction < F(1, 10**60)


def test_determinant_stays_in_unit_range():
    # positive-definite kernel with unit diagonal: 0 <= det <= 1
    rng = random.Random(7)
    for n in (2, 3, 4):
        for _ in range(8):
            x = tuple(F(rng.randrange(-40, 40), rng.randrange(1, 12)) for _ in range(n - 1))
            v = w_eval(n, x + (0,))
            assert v.lo_fraction > -F(1, 10**50)
            assert v.hi_fraction < 1 + F(1, 10**50)


def test_evaluator_rejects_wrong_arity():
    with pytest.raises(ConfigError):
        SincMatrixEvaluator(3).w_eval((F(1), F(2)))


# -------------------------------------------------------- polynomial route


def test_flat_basis_pins():
    basis = invariant_poly_basis(3, 0)
    assert b_poly(3, basis) == [F(3, 4)]
    one = basis.functions[0]
    assert nu3_poly(one, one) == F(13, 160)


def test_entries_are_symmetric_and_bilinear():
    basis = invariant_poly_basis(3, 2)
    p0, p1 = basis.functions
    assert nu3_poly(p0, p1) == nu3_poly(p1, p0)
    combined = {}
    for mono, coef in p0.terms.items():
        combined[mono] = combined.get(mono, F(0)) + coef
    for mono, coef in p1.terms.items():
        combined[mono] = combined.get(mono, F(0)) + 2 * coef
    q = MultiPoly(2, combined)
    assert nu3_poly(q, p1) == nu3_poly(p0, p1) + 2 * nu3_poly(p1, p1)


def test_odd_monomials_rejected():
    x1 = MultiPoly(2, {(1, 0): F(1)})
    one = MultiPoly(2, {(0, 0): F(1)})
    with pytest.raises(ConfigError):
        nu3_poly(x1, one)


def test_diagonal_entry_matches_quadrature():
    """Independent oracle for the constant-basis diagonal entry 13/160.

    The body transform is computed from its slice decomposition (inner
    coordinate integrated in closed form, outer by Gauss-Legendre split at
    the slice kink) and integrated squared against the determinant over
    [-L, L]^2.  The box tail decays like 1/L, so two box sizes give a
    clean extrapolation.
    """
    gn, gw = np.polynomial.legendre.leggauss(100)
    u1 = np.concatenate([-0.25 + 0.25 * gn, 0.25 + 0.25 * gn])
    uw = np.concatenate([0.25 * gw, 0.25 * gw])
    lo = np.maximum(-0.5, -0.5 - u1)
    hi = np.minimum(0.5, 0.5 - u1)

    def body_ft(x1, x2):
        x1 = np.asarray(x1, dtype=float)[..., None]
        x2 = np.asarray(x2, dtype=float)[..., None]
        x2s = np.where(np.abs(x2) < 1e-12, 1e-12, x2)
        inner = (np.exp(2j * np.pi * x2s * hi) - np.exp(2j * np.pi * x2s * lo)) / (
            2j * np.pi * x2s
        )
        inner = np.where(np.abs(x2) < 1e-12, (hi - lo) + 0j, inner)
        return np.real(np.sum(uw * np.exp(2j * np.pi * x1 * u1) * inner, axis=-1))

    def det3(x1, x2):
        a, b, c = np.sinc(x1), np.sinc(x2), np.sinc(x1 - x2)
        return 1.0 + 2 * a * b * c - a * a - b * b - c * c

    def box_integral(L, N):
        xn, xw = np.polynomial.legendre.leggauss(N)
        xs = L * xn
        ws = L * xw
        rows = np.empty((N, N))
        for i in range(N):
            rows[i] = body_ft(np.full(N, xs[i]), xs)
        return float(ws @ (rows * rows * det3(xs[:, None], xs[None, :])) @ ws)

    extrapolated = 2 * box_integral(20.0, 800) - box_integral(10.0, 400)
    assert extrapolated == pytest.approx(13 / 160, rel=5e-3)


# ------------------------------------------------------------- shift route


def test_shift_normalization_is_exact_for_unit_denominator():
    assert b_shift(3, 1, invariant_shift_basis(3, 1, 0)) == [F(3, 4)]
    assert b_shift(3, 2, invariant_shift_basis(3, 2, 0)) == [F(3, 16)]
    assert b_shift(2, 1, invariant_shift_basis(2, 1, 0)) == [F(1)]


def test_shift_normalization_scaling_identity():
    # transform of the half-scale body at twice the point is a quarter of
    # the unit-body value; at the first lattice point that value is 1/pi^2
    v = ft_H(HPolytope(3, F(1, 2)), (2, 0))
    pi = iv_pi(256)
    assert (v * (pi * pi) * 4).contains(F(1))


def test_shift_second_orbit_value_is_enclosed_not_exact():
    vals = b_shift(3, 2, invariant_shift_basis(3, 2, 1))
    assert isinstance(vals[0], F)
    assert isinstance(vals[1], Interval)


def test_shift_entry_converges_to_flat_value():
    basis = invariant_shift_basis(3, 1, 0)
    f = basis.functions[0]
    e50 = nu_shift(3, 1, f, f, TruncationParams(n=3, m=1, C=50))
    e100 = nu_shift(3, 1, f, f, TruncationParams(n=3, m=1, C=100))
    assert e100.contains(F(13, 160))
    assert e50.overlaps(e100)
    assert abs(e100.mid_fraction - F(13, 160)) < F(13, 160) / 10**3


def test_poisson_shift_choice_is_immaterial():
    # two valid staggered shifts must enclose one common value
    basis = invariant_shift_basis(3, 1, 0)
    f = basis.functions[0]
    a = nu_shift(3, 1, f, f, TruncationParams(n=3, m=1, C=50))
    b = nu_shift(3, 1, f, f, TruncationParams(n=3, m=1, C=50, s=(F(1, 7), F(2, 7))))
    assert a.overlaps(b)


def test_default_shift_is_staggered_and_valid():
    assert default_shift(3, 1) == (F(1, 6), F(1, 3))
    assert default_shift(2, 1) == (F(1, 4),)
    for n in (2, 3, 4):
        for m in (1, 2, 3):
            TruncationParams(n=n, m=m, C=50)  # must not raise


def test_truncation_params_validation():
    with pytest.raises(ConfigError):
        TruncationParams(n=5, m=1, C=100)
    with pytest.raises(ConfigError):
        TruncationParams(n=3, m=1, C=4)
    with pytest.raises(ConfigError):
        TruncationParams(n=3, m=1, C=100, s=(F(0), F(1, 3)))
    with pytest.raises(ConfigError):
        TruncationParams(n=3, m=1, C=100, s=(F(1, 7), F(1, 7)))


def test_tail_budget_enforced():
    params = TruncationParams(n=3, m=2, C=16, tail_tolerance=1e-9)
    with pytest.raises(TailToleranceError) as exc:
        assemble_gram(3, 2, invariant_shift_basis(3, 2, 0), params=params)
    assert exc.value.achieved > 0


# --------------------------------------------------------------- assembly


def test_gram_requires_exact_symmetry():
    with pytest.raises(ConfigError):
        GramSystem(A=[[F(1), F(2)], [F(3), F(4)]], b=[F(1), F(1)], meta={})


def test_assemble_polynomial_route_is_exact():
    sysm = assemble_gram(3, 1, invariant_poly_basis(3, 2))
    assert sysm.exact
    assert sysm.A[0][0] == F(13, 160)
    assert sysm.A[0][1] == sysm.A[1][0]
    assert sysm.b[0] == F(3, 4)
    assert sysm.meta["param"] == "poly"


def test_assemble_route_parameter_mismatch():
    poly = invariant_poly_basis(3, 2)
    shift = invariant_shift_basis(3, 1, 0)
    with pytest.raises(ConfigError):
        assemble_gram(3, 1, poly, params=TruncationParams(n=3, m=1, C=50))
    with pytest.raises(ConfigError):
        assemble_gram(3, 1, shift)
    with pytest.raises(ConfigError):
        assemble_gram(3, 2, shift, params=TruncationParams(n=3, m=2, C=50))


def test_assemble_shift_diagonal_is_positive():
    basis = invariant_shift_basis(3, 2, 1)
    sysm = assemble_gram(3, 2, basis, params=TruncationParams(n=3, m=2, C=60))
    for i in range(len(sysm)):
        assert sysm.A[i][i].is_positive()


def test_cache_round_trip_is_exact(tmp_path):
    basis = invariant_shift_basis(3, 1, 1)
    params = TruncationParams(n=3, m=1, C=50)
    cold = assemble_gram(3, 1, basis, params=params, cache_dir=str(tmp_path))
    files = list(tmp_path.glob("gram-*.ndjson"))
    assert len(files) == 1
    warm = assemble_gram(3, 1, basis, params=params, cache_dir=str(tmp_path))
    for i in range(len(cold)):
        for j in range(len(cold)):
            assert cold.A[i][j].lo_fraction == warm.A[i][j].lo_fraction
            assert cold.A[i][j].hi_fraction == warm.A[i][j].hi_fraction


def test_cache_corruption_is_reported(tmp_path):
    basis = invariant_shift_basis(3, 1, 0)
    params = TruncationParams(n=3, m=1, C=50)
    assemble_gram(3, 1, basis, params=params, cache_dir=str(tmp_path))
    path = next(tmp_path.glob("gram-*.ndjson"))
    lines = path.read_text().splitlines()
    lines[1] = lines[1].replace('"mid"', '"mud"')
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CacheCorruptError) as exc:
        assemble_gram(3, 1, basis, params=params, cache_dir=str(tmp_path))
    assert str(path) in str(exc.value)


def test_cache_ignores_other_configurations(tmp_path):
    basis = invariant_shift_basis(3, 1, 0)
    a = assemble_gram(
        3, 1, basis, params=TruncationParams(n=3, m=1, C=50), cache_dir=str(tmp_path)
    )
    b = assemble_gram(
        3, 1, basis, params=TruncationParams(n=3, m=1, C=60), cache_dir=str(tmp_path)
    )
    assert len(list(tmp_path.glob("gram-*.ndjson"))) == 2
    assert a.A[0][0].overlaps(b.A[0][0])


def test_parallel_assembly_matches_serial():
    basis = invariant_shift_basis(3, 1, 1)
    params = TruncationParams(n=3, m=1, C=50)
    serial = assemble_gram(3, 1, basis, params=params, jobs=1)
    threaded = assemble_gram(3, 1, basis, params=params, jobs=2)
    for i in range(len(serial)):
        for j in range(len(serial)):
            assert serial.A[i][j].lo_fraction == threaded.A[i][j].lo_fraction
            assert serial.A[i][j].hi_fraction == threaded.A[i][j].hi_fraction
