"""Fourier transforms of polytope indicator functions.

Three bodies appear throughout the package, always with the analyst's
normalization ft(y) = integral over the body of exp(-2*pi*i*<x, y>) dx:

  * the standard simplex {x >= 0, sum x_i <= 1} in R^n,
  * the cross-polytope (unit L1 ball) in R^n,
  * the hexagon family H_d = {|x_1| + ... + |x_d| + |x_1 + ... + x_d| <= 1}
    in R^d, optionally dilated by a rational factor (`HPolytope`).

The simplex transform is complex-valued; the other two bodies are centrally
symmetric so their transforms are real.  All three closed forms are
rational-trigonometric expressions whose denominators vanish on a finite
union of hyperplanes (a coordinate vanishing, or two coordinates colliding).
Those singularities are removable, and `ft_H` is a total function: it
classifies the singular pattern of its argument exactly, substitutes a
generic rational direction y + eps*v, and expands numerator and denominator
as exact polynomials in eps whose coefficients live in the module
Q[pi, cos(pi*a), sin(pi*a)] with rational a.  Every coefficient below the
denominator's vanishing order must cancel identically; a nonzero residue is
reported as `ExpansionError` because it can only come from a transcription
bug, never from rounding (there is no rounding).  The quotient of leading
coefficients is the limit, returned exactly as a Fraction when no pi or
trigonometric factor survives and as a certified `Interval` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Optional, Sequence, Tuple, Union

from .arith import (
    DEFAULT_PREC,
    Interval,
    Scalar,
    as_fraction,
    iv_cos,
    iv_pi,
    iv_sin,
    to_interval,
)
from .errors import ExpansionError, SingularInputError

__all__ = [
    "HPolytope",
    "SingularPattern",
    "classify_singular",
    "ft_H",
    "ft_H_singular_limit",
    "ft_cross_polytope",
    "ft_cross_via_simplex",
    "ft_simplex",
    "hpolytope_vertices",
]


@dataclass(frozen=True)
class HPolytope:
    """Dilate of H_{n-1} = {|x_1| + ... + |x_{n-1}| + |x_1 + ... + x_{n-1}| <= 1}.

    `n` counts the L1 summands including the trailing sum term, so the body
    lives in dimension n - 1.  The instance represents scale * H_{n-1}:
    n = 2 is the interval [-scale/2, scale/2], n = 3 a hexagon, n = 4 a
    12-vertex solid.
    """

    n: int
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError("need integer n >= 2; the body lives in dimension n - 1")
        object.__setattr__(self, "scale", _exact(self.scale))
        if self.scale <= 0:
            raise ValueError("scale must be a positive rational")

    @property
    def dim(self) -> int:
        return self.n - 1


def _exact(x) -> Fraction:
    # Rational coordinates only.  Floats are rejected rather than converted
    # so a caller cannot silently evaluate at a nearby dyadic point.
    if isinstance(x, float):
        raise TypeError("exact rational input required, got float")
    return as_fraction(x)


def _as_hpoly(h) -> HPolytope:
    if isinstance(h, HPolytope):
        return h
    return HPolytope(h)


def hpolytope_vertices(h) -> Tuple[Tuple[Fraction, ...], ...]:
    """Vertex set of the dilated body, exact and deterministically ordered.

    The unit body is the projection of the slice {sum = 0} of the cross
    polytope in R^n along the last coordinate; its vertices are the
    projections of (e_i - e_j) / 2 for i != j, giving n(n-1) points.
    """
    h = _as_hpoly(h)
    n, s = h.n, h.scale
    verts = set()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            w = [Fraction(0)] * n
            w[i] += s / 2
            w[j] -= s / 2
            verts.add(tuple(w[: n - 1]))
    return tuple(sorted(verts))


# ---------------------------------------------------------------------------
# simplex and cross-polytope
# ---------------------------------------------------------------------------


def _split_coords(y):
    """Classify a coordinate vector: ('rational', tuple of Fraction) or
    ('interval', tuple of Interval)."""
    if any(isinstance(t, Interval) for t in y):
        return "interval", tuple(to_interval(t) for t in y)
    return "rational", tuple(_exact(t) for t in y)


def ft_simplex(
    n: int,
    y: Sequence,
    prec: int = DEFAULT_PREC,
) -> Tuple[Interval, Interval]:
    """Fourier transform of the standard simplex in R^n at y.

    Returns the complex value as a pair (real part, imaginary part) of
    certified intervals.  Requires all coordinates nonzero and pairwise
    distinct; on a vanishing denominator raises `SingularInputError`
    (evaluate nearby or use the dedicated limit path of `ft_H` instead,
    which is the only removable-singularity evaluation this package needs).
    """
    y = tuple(y)
    if n < 1 or len(y) != n:
        raise ValueError("coordinate count must equal n >= 1")
    mode, ys = _split_coords(y)

    # Denominators y_j * prod_{i != j} (y_j - y_i), checked exactly for
    # rational input and by sign certification for interval input.
    dens = []
    for j in range(n):
        d = ys[j]
        for i in range(n):
            if i != j:
                d = d * (ys[j] - ys[i])
        if mode == "rational":
            if d == 0:
                raise SingularInputError(
                    "simplex transform denominator vanishes: coordinates must "
                    "be nonzero and pairwise distinct"
                )
        elif d.contains_zero():
            raise SingularInputError(
                "cannot certify the simplex denominators away from zero; "
                "tighten the input intervals or increase precision"
            )
        dens.append(d)

    two_pi = 2 * iv_pi(prec)
    acc_re = Interval.zero(prec)
    acc_im = Interval.zero(prec)
    for j in range(n):
        ang = two_pi * ys[j]
        # 1 - exp(-2 pi i y_j) = (1 - cos) + i sin
        acc_re = acc_re + (1 - iv_cos(ang)) / dens[j]
        acc_im = acc_im + iv_sin(ang) / dens[j]

    # prefactor (-1)^(n+1) / (2 pi i)^n, applied as magnitude then rotation
    mag = Fraction((-1) ** (n + 1)) / (two_pi ** n)
    re, im = acc_re * mag, acc_im * mag
    k = n % 4  # multiply by (-i)^n
    if k == 1:
        re, im = im, -re
    elif k == 2:
        re, im = -re, -im
    elif k == 3:
        re, im = -im, re
    return re, im


def ft_cross_via_simplex(
    n: int,
    y: Sequence,
    prec: int = DEFAULT_PREC,
) -> Tuple[Interval, Interval]:
    """Cross-polytope transform summed over its 2^n simplex pieces.

    Slow reference route used for cross-validation: the L1 ball is the
    union of sign-reflected copies of the standard simplex, so its
    transform is the sum of `ft_simplex` over all sign patterns.  The
    imaginary part must enclose zero.
    """
    y = tuple(y)
    acc_re = Interval.zero(prec)
    acc_im = Interval.zero(prec)
    for bits in range(1 << n):
        sy = tuple(-t if (bits >> i) & 1 else t for i, t in enumerate(y))
        re, im = ft_simplex(n, sy, prec)
        acc_re = acc_re + re
        acc_im = acc_im + im
    return acc_re, acc_im


def ft_cross_polytope(n: int, y: Sequence, prec: int = DEFAULT_PREC) -> Scalar:
    """Fourier transform of the unit L1 ball in R^n at y (real-valued).

    At y = 0 returns the exact volume 2^n / n!.  Elsewhere the coordinates
    must be nonzero with pairwise distinct squares; otherwise
    `SingularInputError` is raised.
    """
    y = tuple(y)
    if n < 1 or len(y) != n:
        raise ValueError("coordinate count must equal n >= 1")
    mode, ys = _split_coords(y)

    if mode == "rational" and all(t == 0 for t in ys):
        return Fraction(2 ** n, factorial(n))

    sq = [t * t for t in ys]
    dens = []
    for j in range(n):
        d = Fraction(1) if mode == "rational" else Interval.from_int(1, prec)
        for i in range(n):
            if i != j:
                d = (sq[j] - sq[i]) * d
        if mode == "rational":
            if ys[j] == 0 or d == 0:
                raise SingularInputError(
                    "cross-polytope transform needs nonzero coordinates with "
                    "distinct squares; only the all-zero point has a "
                    "dedicated (volume) value"
                )
        elif d.contains_zero():
            raise SingularInputError(
                "cannot certify the cross-polytope denominators away from zero"
            )
        dens.append(d)

    pi = iv_pi(prec)
    acc = Interval.zero(prec)
    if n % 2:
        # odd n: pi^-n (-1)^((n-1)/2) sum_j y_j^(n-2) sin(2 pi y_j) / prod
        for j in range(n):
            num = ys[j] ** (n - 2) if n >= 2 else 1 / ys[j]
            acc = acc + num * iv_sin(2 * pi * ys[j]) / dens[j]
        sign = (-1) ** ((n - 1) // 2)
    else:
        # even n: pi^-n (-1)^(n/2-1) sum_j 2 y_j^(n-2) sin(pi y_j)^2 / prod
        for j in range(n):
            s = iv_sin(pi * ys[j])
            acc = acc + 2 * ys[j] ** (n - 2) * s * s / dens[j]
        sign = (-1) ** (n // 2 - 1)
    return acc * (Fraction(sign) / pi ** n)


# ---------------------------------------------------------------------------
# H-family: singular pattern bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularPattern:
    """Which denominator factors vanish at a point of the H-family formula.

    `zeros` lists 0-based coordinate indices that vanish; `groups` lists the
    equivalence classes (size >= 2) of coordinates sharing a common value.
    A class of zeros appears in both.  The vanishing order of the common
    denominator is len(zeros) + sum of C(|g|, 2).
    """

    zeros: Tuple[int, ...] = ()
    groups: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "zeros", tuple(sorted(set(self.zeros))))
        canon = sorted(
            tuple(sorted(set(g))) for g in self.groups if len(set(g)) >= 2
        )
        object.__setattr__(self, "groups", tuple(canon))

    @property
    def is_singular(self) -> bool:
        return bool(self.zeros or self.groups)

    @property
    def order(self) -> int:
        return len(self.zeros) + sum(comb(len(g), 2) for g in self.groups)


def classify_singular(z: Sequence[Fraction]) -> SingularPattern:
    """Exact singular pattern of a rational point for the H-family formula."""
    zs = tuple(_exact(t) for t in z)
    zeros = tuple(i for i, t in enumerate(zs) if t == 0)
    by_value: Dict[Fraction, list] = {}
    for i, t in enumerate(zs):
        by_value.setdefault(t, []).append(i)
    groups = tuple(tuple(g) for g in by_value.values() if len(g) >= 2)
    return SingularPattern(zeros=zeros, groups=groups)


# ---------------------------------------------------------------------------
# H-family: exact series engine
#
# Coefficients are dictionaries {(pi_power, symbol): Fraction} where symbol
# is None (rational unit) or ("cos"|"sin", a) standing for cos/sin(pi*a)
# with canonical a in (0, 1/2).  Arguments that are half-integers substitute
# to 0, +1 or -1 at creation, so a fully rational limit stays a Fraction end
# to end.  pi is kept symbolic through its exponent, which is what makes the
# cancellation check rigorous: pi is transcendental and, within each pi
# power, the surviving cos/sin values of distinct canonical arguments are
# specializations of functions that are linearly independent over the
# rational functions of the free coordinates.
# ---------------------------------------------------------------------------

_Sym = Optional[Tuple[str, Fraction]]
_Coeff = Dict[Tuple[int, _Sym], Fraction]


def _canon_trig(kind: str, a: Fraction) -> Tuple[Fraction, _Sym]:
    """Reduce cos/sin(pi*a) to (rational multiplier, canonical symbol)."""
    a = a % 2
    sign = Fraction(1)
    if a > 1:
        a = 2 - a
        if kind == "sin":
            sign = -sign
    if a > Fraction(1, 2):
        a = 1 - a
        if kind == "cos":
            sign = -sign
    if a == 0:
        return (sign, None) if kind == "cos" else (Fraction(0), None)
    if a == Fraction(1, 2):
        return (Fraction(0), None) if kind == "cos" else (sign, None)
    return sign, (kind, a)


def _mul_linear(p: Dict[int, Fraction], c0: Fraction, c1: Fraction, cap: int):
    """Multiply an eps-polynomial by (c0 + c1*eps), truncating beyond cap."""
    out: Dict[int, Fraction] = {}
    for k, q in p.items():
        if c0:
            out[k] = out.get(k, Fraction(0)) + q * c0
        if c1 and k + 1 <= cap:
            out[k + 1] = out.get(k + 1, Fraction(0)) + q * c1
    return {k: q for k, q in out.items() if q}


def _accumulate_term(
    series: Dict[int, _Coeff],
    poly: Dict[int, Fraction],
    kind: str,
    a0: Fraction,
    w: Fraction,
    cap: int,
):
    """Add poly(eps) * trig(pi*(a0 + w*eps)) to the numerator series."""
    if not poly:
        return
    mc, sc = _canon_trig("cos", a0)
    ms, ss = _canon_trig("sin", a0)
    base = min(poly)
    for t in range(cap - base + 1):
        q = Fraction(w) ** t / factorial(t)
        if t % 2 == 0:
            q *= (-1) ** (t // 2)
            mult, sym = (mc, sc) if kind == "cos" else (ms, ss)
        else:
            q *= (-1) ** (t // 2)
            if kind == "cos":
                q = -q
                mult, sym = ms, ss
            else:
                mult, sym = mc, sc
        q *= mult
        if not q:
            continue
        for k, qp in poly.items():
            if k + t > cap:
                continue
            bucket = series.setdefault(k + t, {})
            key = (t, sym)
            val = bucket.get(key, Fraction(0)) + qp * q
            if val:
                bucket[key] = val
            else:
                bucket.pop(key, None)


def _assemble(symdict: _Coeff, prec: int) -> Scalar:
    """Evaluate a coefficient dictionary to a Fraction or an Interval."""
    if not symdict:
        return Fraction(0)
    if all(p == 0 and s is None for (p, s) in symdict):
        return sum(symdict.values(), Fraction(0))
    pi = iv_pi(prec)
    acc = Interval.zero(prec)
    for (p, sym), q in sorted(
        symdict.items(), key=lambda kv: (kv[0][0], kv[0][1] or ("", 0))
    ):
        term = Interval.from_fraction(q, prec)
        if p > 0:
            term = term * pi ** p
        elif p < 0:
            term = term / pi ** (-p)
        if sym is not None:
            kind, a = sym
            ang = pi * a
            term = term * (iv_cos(ang) if kind == "cos" else iv_sin(ang))
        acc = acc + term
    return acc


def _ft_H_unit(n: int, z: Tuple[Fraction, ...], prec: int) -> Scalar:
    """Transform of the unit body H_{n-1} at an exact rational point.

    Handles regular and singular points uniformly: the vanishing order V of
    the common denominator along a generic direction is computed exactly,
    the numerator coefficients below order V are checked to cancel, and the
    order-V quotient is the value.
    """
    N = n - 1
    if n == 2:
        # H_1 = [-1/2, 1/2]: the transform is sin(pi y) / (pi y), value 1 at 0.
        t = z[0]
        if t == 0:
            return Fraction(1)
        ang = iv_pi(prec) * t
        return iv_sin(ang) / ang

    pattern = classify_singular(z)
    V = pattern.order
    cap = V
    # Direction with distinct positive entries and distinct differences, so
    # every vanishing linear factor has a nonzero eps coefficient.
    v = tuple(Fraction(3) ** i for i in range(N))

    # denominator prod z_i * prod_{a<b} (z_a - z_b) as an eps-polynomial
    den: Dict[int, Fraction] = {0: Fraction(1)}
    for j in range(N):
        den = _mul_linear(den, z[j], v[j], cap)
    for a in range(N):
        for b in range(a + 1, N):
            den = _mul_linear(den, z[a] - z[b], v[a] - v[b], cap)
    if min(den) != V:
        raise ExpansionError(
            "denominator valuation %d does not match the singular pattern "
            "order %d" % (min(den), V)
        )
    d_lead = den[V]

    kind = "cos" if n % 2 else "sin"
    pair_sign = -1 if n % 2 else 1
    pairs = [(a, b) for a in range(N) for b in range(a + 1, N)]

    series: Dict[int, _Coeff] = {}
    for j in range(N):
        # single-index term: sign * z_j^(n-2) * prod of untouched pair factors
        poly = {0: Fraction((-1) ** j)}
        for _ in range(n - 2):
            poly = _mul_linear(poly, z[j], v[j], cap)
        for a, b in pairs:
            if j not in (a, b):
                poly = _mul_linear(poly, z[a] - z[b], v[a] - v[b], cap)
        _accumulate_term(series, poly, kind, z[j], v[j], cap)
    for a, b in pairs:
        # pair term: sign * (z_a - z_b)^(n-2) * untouched coordinates and pairs
        poly = {0: Fraction(pair_sign * (-1) ** (a + b + 1))}
        for _ in range(n - 2):
            poly = _mul_linear(poly, z[a] - z[b], v[a] - v[b], cap)
        for i in range(N):
            if i not in (a, b):
                poly = _mul_linear(poly, z[i], v[i], cap)
        for c, d in pairs:
            if c not in (a, b) and d not in (a, b):
                poly = _mul_linear(poly, z[c] - z[d], v[c] - v[d], cap)
        _accumulate_term(series, poly, kind, z[a] - z[b], v[a] - v[b], cap)

    for t in range(V):
        if series.get(t):
            raise ExpansionError(
                "numerator coefficient at order %d of %d did not cancel "
                "(residue %r); the closed form was transcribed wrong"
                % (t, V, series[t])
            )

    pref = Fraction((-1) ** ((n - 1) // 2 if n % 2 else n // 2 - 1), 2 ** (n - 2))
    lead = series.get(V, {})
    result: _Coeff = {}
    for (p, sym), q in lead.items():
        result[(p - (n - 1), sym)] = q * pref / d_lead
    return _assemble(result, prec)


def ft_H(h, y: Sequence, prec: int = DEFAULT_PREC) -> Scalar:
    """Fourier transform of a (dilated) H-family body at a rational point.

    Total on rational input: regular points evaluate the closed form,
    singular points take the (removable) limit automatically.  The result
    is an exact Fraction whenever every pi power and trigonometric factor
    cancels to a rational (in particular at y = 0, where it is the volume),
    otherwise a certified Interval.
    """
    h = _as_hpoly(h)
    y = tuple(y)
    if len(y) != h.dim:
        raise ValueError("expected %d coordinates, got %d" % (h.dim, len(y)))
    z = tuple(h.scale * _exact(t) for t in y)
    val = _ft_H_unit(h.n, z, prec)
    return val * h.scale ** h.dim


def ft_H_singular_limit(
    h,
    y: Sequence,
    pattern: Optional[SingularPattern] = None,
    prec: int = DEFAULT_PREC,
) -> Scalar:
    """Limit of the H-family transform at a point of declared singular type.

    Identical to `ft_H` except that a caller stating its expectation gets it
    checked: if `pattern` does not match the exact classification of the
    point, a ValueError is raised before any evaluation.  Scaling does not
    change the pattern (the singular variety is dilation-invariant).
    """
    h = _as_hpoly(h)
    y = tuple(y)
    if len(y) != h.dim:
        raise ValueError("expected %d coordinates, got %d" % (h.dim, len(y)))
    z = tuple(h.scale * _exact(t) for t in y)
    actual = classify_singular(z)
    if pattern is not None:
        declared = SingularPattern(zeros=pattern.zeros, groups=pattern.groups)
        if declared != actual:
            raise ValueError(
                "declared singular pattern %r does not match the point's "
                "actual pattern %r" % (declared, actual)
            )
    val = _ft_H_unit(h.n, z, prec)
    return val * h.scale ** h.dim
