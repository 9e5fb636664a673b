"""Vectorized enclosure arithmetic for the shifted lattice sums.

The shift parametrization evaluates, for a pair of orbit-sum basis
functions, the series

    sum over j in Z^(n-1), |j_i| <= C  of  g_i(m u) g_i'(m u) W_n(m u, 0),
    u = j/(m+1) + s,

where g(mu) is a sum of transform bumps chi_hat((u - mu)) scaled by
m^(1-n).  Every sampled argument is a rational with a fixed denominator
D, so all sines and cosines live on a finite table of pi * t / D values;
those are enclosed once with mpmath and the per-point work is plain
float64 interval arithmetic in numpy (outward rounding by one ulp after
every operation, which covers IEEE round-to-nearest error).

Grids are flattened C-order meshes; sums are plain np.sum over fixed
index order plus the classical k*eps*sum|x| rounding bound, so results
are deterministic run to run.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import lcm
from typing import Dict, Sequence, Tuple

import numpy as np
from mpmath import iv, mp, mpf

from .errors import NumericError

_EPS = float(np.finfo(np.float64).eps)

IvArr = Tuple[np.ndarray, np.ndarray]


# ---------------------------------------------------------------------------
# float64 interval primitives


def _out(lo: np.ndarray, hi: np.ndarray) -> IvArr:
    return np.nextafter(lo, -np.inf), np.nextafter(hi, np.inf)


def iv_addv(a: IvArr, b: IvArr) -> IvArr:
    return _out(a[0] + b[0], a[1] + b[1])


def iv_subv(a: IvArr, b: IvArr) -> IvArr:
    return _out(a[0] - b[1], a[1] - b[0])


def iv_negv(a: IvArr) -> IvArr:
    return (-a[1], -a[0])


def iv_mulv(a: IvArr, b: IvArr) -> IvArr:
    p1 = a[0] * b[0]
    p2 = a[0] * b[1]
    p3 = a[1] * b[0]
    p4 = a[1] * b[1]
    lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
    hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
    return _out(lo, hi)


def iv_sqrv(a: IvArr) -> IvArr:
    return iv_mulv(a, a)


def iv_scale_exact(a: IvArr, k: np.ndarray) -> IvArr:
    """Multiply by an array of exactly representable floats (integers)."""
    p1 = a[0] * k
    p2 = a[1] * k
    return _out(np.minimum(p1, p2), np.maximum(p1, p2))


def iv_div_exact(a: IvArr, k: np.ndarray) -> IvArr:
    """Divide by an array of exactly representable nonzero floats."""
    q1 = a[0] / k
    q2 = a[1] / k
    return _out(np.minimum(q1, q2), np.maximum(q1, q2))


def iv_scale_scalar(a: IvArr, s: Tuple[float, float]) -> IvArr:
    lo, hi = s
    p1 = a[0] * lo
    p2 = a[0] * hi
    p3 = a[1] * lo
    p4 = a[1] * hi
    out_lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
    out_hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
    return _out(out_lo, out_hi)


def iv_const(value: float, shape) -> IvArr:
    arr = np.full(shape, value)
    return arr, arr.copy()


def iv_sum_masked(a: IvArr, mask=None) -> Tuple[float, float]:
    """Rigorous scalar enclosure of the sum of interval entries."""
    lo = a[0] if mask is None else a[0][mask]
    hi = a[1] if mask is None else a[1][mask]
    k = lo.size
    if k == 0:
        return 0.0, 0.0
    slo = float(np.sum(lo))
    shi = float(np.sum(hi))
    mag = float(np.sum(np.maximum(np.abs(lo), np.abs(hi))))
    err = (k + 2) * _EPS * mag
    return slo - err, shi + err


def _fraction_bounds(q: Fraction) -> Tuple[float, float]:
    f = q.numerator / q.denominator
    if Fraction(f) == q:
        return f, f
    return np.nextafter(f, -np.inf), np.nextafter(f, np.inf)


def exact_fraction(x: float) -> Fraction:
    """The dyadic rational a float64 denotes, with no rounding."""
    return Fraction(x)


# ---------------------------------------------------------------------------
# trig tables: sin(pi t / D), cos(pi t / D) for t mod 2D


def trig_tables(D: int) -> Tuple[IvArr, IvArr]:
    old = iv.prec
    try:
        iv.prec = 100
        sin_lo = np.empty(2 * D)
        sin_hi = np.empty(2 * D)
        cos_lo = np.empty(2 * D)
        cos_hi = np.empty(2 * D)
        for t in range(2 * D):
            ang = iv.pi * t / D
            sv = iv.sin(ang)
            cv = iv.cos(ang)
            sin_lo[t] = np.nextafter(float(mpf(sv.a)), -np.inf)
            sin_hi[t] = np.nextafter(float(mpf(sv.b)), np.inf)
            cos_lo[t] = np.nextafter(float(mpf(cv.a)), -np.inf)
            cos_hi[t] = np.nextafter(float(mpf(cv.b)), np.inf)
    finally:
        iv.prec = old
    return (sin_lo, sin_hi), (cos_lo, cos_hi)


def _pi_power_scalar(power: int, mult: Fraction) -> Tuple[float, float]:
    """Enclosure of mult * pi^power (power may be negative)."""
    old = iv.prec
    try:
        iv.prec = 100
        v = iv.pi ** power if power >= 0 else 1 / iv.pi ** (-power)
        v = v * iv.mpf(mult.numerator) / mult.denominator
        return (
            np.nextafter(float(mpf(v.a)), -np.inf),
            np.nextafter(float(mpf(v.b)), np.inf),
        )
    finally:
        iv.prec = old


def _table_at(table: IvArr, idx: np.ndarray) -> IvArr:
    return table[0][idx], table[1][idx]


# ---------------------------------------------------------------------------
# transform of the unit body on integer-over-D rational grids
#
# dim 1:  sin(pi y) / (pi y)
# dim 2:  -(1 / (2 pi^2)) [ y0 cos(pi y0) - y1 cos(pi y1)
#                           - (y0-y1) cos(pi (y0-y1)) ] / (y0 y1 (y0-y1))
# dim 3:  -(1 / (4 pi^3)) [ sum_j (+-) y_j^2 (pair gap) sin(pi y_j)
#                          + sum_pairs (+-) gap^2 y_other sin(pi gap) ]
#                         / (y0 y1 y2 (y0-y1)(y0-y2)(y1-y2))
#
# Arguments arrive as integer numerator arrays Y over the common
# denominator D; numerator and denominator are cleared by D^dim so the
# denominator is an exact integer array (validated nonzero).


def _require_nonzero(arr: np.ndarray, what: str) -> None:
    if arr.size and int(np.min(np.abs(arr))) == 0:
        raise NumericError(
            "lattice argument hit a singular %s; the shift validation "
            "should have excluded this" % what
        )


def transform_on_grid(Y: Sequence[np.ndarray], D: int, tabs) -> IvArr:
    """Enclosure of the unit-body transform at y = Y / D (dim = len(Y))."""
    sin_t, cos_t = tabs
    dim = len(Y)
    if dim == 1:
        (y0,) = Y
        _require_nonzero(y0, "coordinate")
        s0 = _table_at(sin_t, np.mod(y0, 2 * D))
        val = iv_div_exact(s0, y0.astype(np.float64))
        return iv_scale_scalar(val, _pi_power_scalar(-1, Fraction(D)))
    if dim == 2:
        y0, y1 = Y
        g = y0 - y1
        _require_nonzero(y0, "coordinate")
        _require_nonzero(y1, "coordinate")
        _require_nonzero(g, "coordinate gap")
        c0 = _table_at(cos_t, np.mod(y0, 2 * D))
        c1 = _table_at(cos_t, np.mod(y1, 2 * D))
        cg = _table_at(cos_t, np.mod(g, 2 * D))
        num = iv_subv(
            iv_subv(
                iv_scale_exact(c0, y0.astype(np.float64)),
                iv_scale_exact(c1, y1.astype(np.float64)),
            ),
            iv_scale_exact(cg, g.astype(np.float64)),
        )
        den = (y0 * y1 * g).astype(np.float64)
        val = iv_div_exact(num, den)
        return iv_scale_scalar(val, _pi_power_scalar(-2, Fraction(-D * D, 2)))
    if dim == 3:
        y0, y1, y2 = Y
        g01 = y0 - y1
        g02 = y0 - y2
        g12 = y1 - y2
        for arr, what in ((y0, "coordinate"), (y1, "coordinate"), (y2, "coordinate"),
                          (g01, "coordinate gap"), (g02, "coordinate gap"), (g12, "coordinate gap")):
            _require_nonzero(arr, what)
        idx = lambda a: np.mod(a, 2 * D)
        s = lambda a: _table_at(sin_t, idx(a))
        f = np.float64
        terms = [
            iv_scale_exact(s(y0), (y0 * y0 * g12).astype(f)),
            iv_scale_exact(s(y1), (-(y1 * y1) * g02).astype(f)),
            iv_scale_exact(s(y2), (y2 * y2 * g01).astype(f)),
            iv_scale_exact(s(g01), (g01 * g01 * y2).astype(f)),
            iv_scale_exact(s(g02), (-(g02 * g02) * y1).astype(f)),
            iv_scale_exact(s(g12), (g12 * g12 * y0).astype(f)),
        ]
        num = terms[0]
        for t in terms[1:]:
            num = iv_addv(num, t)
        den = (y0 * y1 * y2).astype(f) * (g01 * g02 * g12).astype(f)
        val = iv_div_exact(num, den)
        return iv_scale_scalar(val, _pi_power_scalar(-3, Fraction(-D ** 3, 4)))
    raise NumericError("grid transform implemented for dimensions 1..3 (n = 2..4)")


def sinc_on_grid(N: np.ndarray, D: int, tabs) -> IvArr:
    """Enclosure of sin(pi N / D) / (pi N / D) for nonzero integer N."""
    sin_t, _ = tabs
    _require_nonzero(N, "correlation argument")
    sv = _table_at(sin_t, np.mod(N, 2 * D))
    val = iv_div_exact(sv, N.astype(np.float64))
    return iv_scale_scalar(val, _pi_power_scalar(-1, Fraction(D)))


def det_on_grid(entries: Dict[Tuple[int, int], IvArr], n: int, shape) -> IvArr:
    """Determinant of the symmetric sinc matrix via permutation expansion.

    entries[(i, j)] for i < j holds the off-diagonal interval grid; the
    diagonal is exactly 1.
    """
    total_lo = np.zeros(shape)
    total_hi = np.zeros(shape)
    total = (total_lo, total_hi)
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for i in range(n):
            if seen[i]:
                continue
            ln = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                ln += 1
            if ln % 2 == 0:
                sign = -sign
        factors = [
            entries[(min(i, perm[i]), max(i, perm[i]))]
            for i in range(n)
            if perm[i] != i
        ]
        if not factors:
            term = iv_const(1.0, shape)
        else:
            term = factors[0]
            for fobj in factors[1:]:
                term = iv_mulv(term, fobj)
        total = iv_addv(total, term) if sign > 0 else iv_subv(total, term)
    return total


# ---------------------------------------------------------------------------
# the lattice evaluator


class LatticeEvaluator:
    """Shared grids for one (n, m, C, s) lattice configuration.

    Sampled points are u = j/(m+1) + s with j in the integer box
    [-C, C]^(n-1).  With D the least common denominator of the u
    coordinates, the transform arguments u - mu and the correlation
    arguments m*u are integer multiples of 1/D, hence trig values come
    from one table of size 2D.
    """

    def __init__(self, n: int, m: int, C: int, s: Sequence[Fraction]):
        if n < 2 or n > 4:
            raise NumericError("lattice path implemented for n in {2, 3, 4}")
        self.n = n
        self.m = m
        self.C = C
        self.s = tuple(Fraction(x) for x in s)
        dim = n - 1
        if len(self.s) != dim:
            raise NumericError("shift vector length must be n - 1")
        D = lcm(m + 1, *(x.denominator for x in self.s))
        self.D = D
        step = D // (m + 1)
        axes = [np.arange(-C, C + 1, dtype=np.int64) for _ in range(dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        self.absmax = np.maximum.reduce([np.abs(g).ravel() for g in mesh])
        # integer numerators of u_i over D
        self.B = [
            (mesh[i].ravel() * step + int(D * self.s[i])).astype(np.int64)
            for i in range(dim)
        ]
        self.tabs = trig_tables(D)
        self.shape = self.B[0].shape
        self._w = None
        self._basis: Dict[Tuple, IvArr] = {}

    # -- correlation factor ------------------------------------------------

    def w_grid(self) -> IvArr:
        if self._w is None:
            n, m, D = self.n, self.m, self.D
            coords = [b * m for b in self.B] + [np.zeros(self.shape, dtype=np.int64)]
            entries = {}
            for i in range(n):
                for j in range(i + 1, n):
                    entries[(i, j)] = sinc_on_grid(coords[i] - coords[j], D, self.tabs)
            self._w = det_on_grid(entries, n, self.shape)
        return self._w

    # -- orbit-sum basis functions ------------------------------------------

    def basis_grid(self, orbit: Tuple[Tuple[int, ...], ...]) -> IvArr:
        """Grid enclosure of sum over orbit members mu of the band-limited
        bump value g_(m mu)(m u); members arrive pre-scaled by m."""
        key = tuple(orbit)
        got = self._basis.get(key)
        if got is not None:
            return got
        m, D = self.m, self.D
        total = None
        for member in orbit:
            mu = [c // m for c in member]
            if any(c % m for c in member):
                raise NumericError("orbit member %r is not a multiple of m" % (member,))
            Y = [self.B[i] - D * mu[i] for i in range(len(self.B))]
            val = transform_on_grid(Y, D, self.tabs)
            total = val if total is None else iv_addv(total, val)
        scale = Fraction(1, self.m ** (self.n - 1))
        total = iv_scale_scalar(total, _fraction_bounds(scale))
        self._basis[key] = total
        return total

    # -- entry sums ----------------------------------------------------------

    def entry_sums(self, orbit_a, orbit_b) -> Dict[str, Tuple[float, float]]:
        """Box-truncated sums of g_a(mu) g_b(mu) W_n(mu, 0) over the grid,
        for the full box C and the nested boxes C/2 and 3C/4."""
        fa = self.basis_grid(orbit_a)
        fb = self.basis_grid(orbit_b)
        prod = iv_mulv(iv_mulv(fa, fb), self.w_grid())
        out = {}
        for name, frac in (("half", Fraction(1, 2)), ("threequarter", Fraction(3, 4)),
                           ("full", Fraction(1))):
            cut = int(self.C * frac)
            mask = None if cut >= self.C else (self.absmax <= cut)
            out[name] = iv_sum_masked(prod, mask)
        return out
