"""Exact rational tables for the degree-3 functional on hexagon data.

The n=3 polynomial parametrization needs, for every pair of test
polynomials p, p' (densities on the hexagon side), three exact integrals:

  overlap      integral over the hexagon of p * p'
  ridge        integral over u in [0,1] of (u-1) * h(-u, u)
  wedge        double integral over {0 <= u2 <= 1, -u2 <= u1 <= 0} of
               u2 * h(u1, u2)

where h(u) = integral of p(x) p'(x-u) over the intersection of the
hexagon with its translate by u.  The intersection regions are piecewise
boxes with affine bounds; every piece is integrated by iterated exact
antiderivatives.

Everything here is monomial-table driven so that the d=20 run stays in
the minutes range on one core: for each piece we expand powers of the
(integer-scaled) affine bounds once, convolve integer numerators, and
only touch rational arithmetic when scattering into the final tables.

Tables are keyed by packed exponent tuples; all values are gmpy2.mpq.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

from gmpy2 import mpq

from .arith import MultiPoly, poly_integrate_iterated

KB = 64  # packing radix for exponent pairs; all exponents stay < KB

HALF = Fraction(1, 2)

# Spatial rotation of order 3 preserving the hexagon; the hexagon is the
# disjoint union (up to measure zero) of BOX, rot BOX, rot^2 BOX with
# BOX = [-1/2, 0] x [0, 1/2].
ROT = ((-1, -1), (1, 0))
ROT2 = ((1, 0), (-1, -1))  # ROT squared is also ROT's inverse
BOX_LIMITS = ((0, Fraction(-1, 2), Fraction(0)), (1, Fraction(0), Fraction(1, 2)))


def _binomials(nmax: int) -> List[List[int]]:
    rows = [[1]]
    for k in range(1, nmax + 1):
        prev = rows[-1]
        rows.append([1] + [prev[i - 1] + prev[i] for i in range(1, k)] + [1])
    return rows


_BINOM = _binomials(2 * KB)


# ---------------------------------------------------------------------------
# hexagon monomial moments


@lru_cache(maxsize=None)
def hexagon_moment(e1: int, e2: int) -> Fraction:
    """Exact integral of x1^e1 x2^e2 over the hexagon."""
    if (e1 + e2) % 2:
        return Fraction(0)
    mono = MultiPoly.monomial((e1, e2))
    total = Fraction(0)
    for rot in (None, ROT, ROT2):
        q = mono if rot is None else mono.compose_linear(rot)
        total += poly_integrate_iterated(q, BOX_LIMITS)
    return total


def hexagon_integral(p: MultiPoly) -> Fraction:
    if p.nvars != 2:
        raise ValueError("expected a polynomial in two variables")
    return sum(
        (c * hexagon_moment(e[0], e[1]) for e, c in p.terms.items()),
        Fraction(0),
    )


# ---------------------------------------------------------------------------
# piece tables
#
# x1 bounds are affine in (1, x2, u1, u2); x2 bounds affine in (1, u1, u2);
# coefficients below are twice the true values so they are integers.
# The wedge pieces come with an iterated u-region:
#   ("u2", lo, hi, in_lo, in_hi): outer u2 in [lo, hi] (constants), inner
#   u1 between the affine forms in_lo/in_hi of u2 (and symmetrically for
#   outer "u1").

_WEDGE_PIECES = [
    # region u2 in [1/2, 1], u1 in [-u2, -1/2]
    dict(
        x1=((-1, 0, 0, 0), (1, 0, 2, 0)),
        x2=((-1, 0, 2), (1, 0, 0)),
        u=("u2", HALF, Fraction(1), (Fraction(0), Fraction(-1)), (Fraction(-1, 2), Fraction(0))),
    ),
    # region u2 in [1/2, 1], u1 in [1/2 - u2, 0]
    dict(
        x1=((-1, -2, 2, 2), (1, -2, 0, 0)),
        x2=((-1, 0, 2), (1, 0, 0)),
        u=("u2", HALF, Fraction(1), (Fraction(1, 2), Fraction(-1)), (Fraction(0), Fraction(0))),
    ),
    # region u1 in [-1/2, 0], u2 in [-2 u1, 1/2 - u1]: three pieces
    dict(
        x1=((-1, 0, 0, 0), (1, -2, 0, 0)),
        x2=((0, 2, 2), (1, 0, 0)),
        u=("u1", Fraction(-1, 2), Fraction(0), (Fraction(0), Fraction(-2)), (Fraction(1, 2), Fraction(-1))),
    ),
    dict(
        x1=((-1, -2, 2, 2), (1, -2, 0, 0)),
        x2=((0, -2, 0), (0, 2, 2)),
        u=("u1", Fraction(-1, 2), Fraction(0), (Fraction(0), Fraction(-2)), (Fraction(1, 2), Fraction(-1))),
    ),
    dict(
        x1=((-1, -2, 2, 2), (1, 0, 2, 0)),
        x2=((-1, 0, 2), (0, -2, 0)),
        u=("u1", Fraction(-1, 2), Fraction(0), (Fraction(0), Fraction(-2)), (Fraction(1, 2), Fraction(-1))),
    ),
    # region u1 in [-1/2, 0], u2 in [-u1, -2 u1]: three pieces
    dict(
        x1=((-1, 0, 0, 0), (1, -2, 0, 0)),
        x2=((0, -2, 0), (1, 0, 0)),
        u=("u1", Fraction(-1, 2), Fraction(0), (Fraction(0), Fraction(-1)), (Fraction(0), Fraction(-2))),
    ),
    dict(
        x1=((-1, 0, 0, 0), (1, 0, 2, 0)),
        x2=((0, 2, 2), (0, -2, 0)),
        u=("u1", Fraction(-1, 2), Fraction(0), (Fraction(0), Fraction(-1)), (Fraction(0), Fraction(-2))),
    ),
    dict(
        x1=((-1, -2, 2, 2), (1, 0, 2, 0)),
        x2=((-1, 0, 2), (0, 2, 2)),
        u=("u1", Fraction(-1, 2), Fraction(0), (Fraction(0), Fraction(-1)), (Fraction(0), Fraction(-2))),
    ),
]

# ridge pieces: x1 bounds affine in (1, x2, u); x2 bounds affine in (1, u);
# u runs over a constant interval with weight (u - 1).
_RIDGE_PIECES = [
    dict(x1=((-1, -2, 0), (1, 0, -2)), x2=((-1, 2), (0, 0)), u=(Fraction(0), HALF)),
    dict(x1=((-1, 0, 0), (1, 0, -2)), x2=((0, 0), (0, 2)), u=(Fraction(0), HALF)),
    dict(x1=((-1, 0, 0), (1, -2, 0)), x2=((0, 2), (1, 0)), u=(Fraction(0), HALF)),
    dict(x1=((-1, 0, 0), (1, 0, -2)), x2=((-1, 2), (1, 0)), u=(HALF, Fraction(1))),
]


# ---------------------------------------------------------------------------
# integer expansions of powers of affine forms


def _powers_x1_wedge(form: Tuple[int, int, int, int], kmax: int) -> List[Dict[Tuple[int, int], int]]:
    """Expansions of form^k, form affine in (1, x2, u1, u2) with integer
    coefficients; keys are (x2 exponent, packed u exponent)."""
    c0, cx, ca, cb = form
    out = [{(0, 0): 1}]
    for _ in range(kmax):
        prev = out[-1]
        cur: Dict[Tuple[int, int], int] = {}
        for (e, pu), c in prev.items():
            if c0:
                k = (e, pu)
                cur[k] = cur.get(k, 0) + c * c0
            if cx:
                k = (e + 1, pu)
                cur[k] = cur.get(k, 0) + c * cx
            if ca:
                k = (e, pu + KB)
                cur[k] = cur.get(k, 0) + c * ca
            if cb:
                k = (e, pu + 1)
                cur[k] = cur.get(k, 0) + c * cb
        out.append({k: v for k, v in cur.items() if v})
    return out


def _powers_u(form: Tuple[int, ...], kmax: int, strides: Tuple[int, ...]) -> List[Dict[int, int]]:
    """Expansions of form^k for a form affine in (1, syms...) where the
    symbol exponent keys advance by the given packing strides."""
    out = [{0: 1}]
    for _ in range(kmax):
        prev = out[-1]
        cur: Dict[int, int] = {}
        for pu, c in prev.items():
            if form[0]:
                cur[pu] = cur.get(pu, 0) + c * form[0]
            for coeff, stride in zip(form[1:], strides):
                if coeff:
                    k = pu + stride
                    cur[k] = cur.get(k, 0) + c * coeff
        out.append({k: v for k, v in cur.items() if v})
    return out


def _diff_tables(pu: List[Dict], pl: List[Dict], kmax: int) -> List[List[Tuple]]:
    """D[k] = items of (U^(k+1) - L^(k+1)) as a list of (key, int)."""
    out = []
    for k in range(kmax + 1):
        d = dict(pu[k + 1])
        for key, c in pl[k + 1].items():
            d[key] = d.get(key, 0) - c
        out.append([(key, c) for key, c in d.items() if c])
    return out


# ---------------------------------------------------------------------------
# u-region monomial moments


def _interval_moment(e: int, lo: Fraction, hi: Fraction) -> Fraction:
    return (hi ** (e + 1) - lo ** (e + 1)) / (e + 1)


def _wedge_region_moments(region, amax: int) -> List[mpq]:
    """Flat table M[a*KB + b] of the integral of u1^a u2^b over the region."""
    outer_var, lo, hi, in_lo, in_hi = region
    flat = [mpq()] * (KB * KB)
    # inner antiderivative power expansions: (c0 + c1 t)^(k+1) in the outer t
    lo0, lo1 = in_lo
    hi0, hi1 = in_hi
    for inner_e in range(amax + 1):
        k = inner_e + 1
        row = _BINOM[k]
        # expansion coefficients over outer powers j of (hi^k - lo^k)/k
        coeffs = [
            Fraction(row[j] * 1, k) * (hi0 ** (k - j) * hi1 ** j - lo0 ** (k - j) * lo1 ** j)
            for j in range(k + 1)
        ]
        for outer_e in range(amax + 1):
            val = Fraction(0)
            for j, cj in enumerate(coeffs):
                if cj:
                    val += cj * _interval_moment(outer_e + j, lo, hi)
            if val:
                if outer_var == "u2":
                    a, b = inner_e, outer_e
                else:
                    a, b = outer_e, inner_e
                flat[a * KB + b] = mpq(val.numerator, val.denominator)
    return flat


def _ridge_u_moments(lo: Fraction, hi: Fraction, emax: int) -> List[mpq]:
    """M[e] = integral of u^e (u - 1) over [lo, hi]."""
    out = []
    for e in range(emax + 1):
        v = _interval_moment(e + 1, lo, hi) - _interval_moment(e, lo, hi)
        out.append(mpq(v.numerator, v.denominator))
    return out


# ---------------------------------------------------------------------------
# core staged integrators
#
# For each piece and exponent pair (g1, g2) = x-monomial, stage one
# integrates x1 (bound-power difference tables), stage two integrates x2
# against its bounds, leaving a polynomial in u; stage three contracts
# with the u-region moments for every u-monomial weight.  Numerators stay
# integers until the per-cell scatter.


def wedge_table(d2: int) -> Dict[int, mpq]:
    """Table of integrals over the wedge of

        u1^d1 u2^(d2w+1) * (x-piece integral of x1^g1 x2^g2)

    for all g1+g2+d1+d2w <= d2 of even total, keyed by
    ((g1*KB+g2)*KB+d1)*KB+d2w.  The u2 weight present in the wedge term is
    folded in here via the +1 on the u2 moment exponent.
    """
    table: Dict[int, mpq] = {}
    inv_k = [mpq(1, (k + 1) << (k + 1)) for k in range(d2 + 3)]
    for piece in _WEDGE_PIECES:
        x1l, x1u = piece["x1"]
        x2l, x2u = piece["x2"]
        p1 = _diff_tables(
            _powers_x1_wedge(x1u, d2 + 1), _powers_x1_wedge(x1l, d2 + 1), d2
        )
        s2 = _diff_tables(
            _powers_u(x2u, d2 + 2, (KB, 1)), _powers_u(x2l, d2 + 2, (KB, 1)), d2 + 1
        )
        moments = _wedge_region_moments(piece["u"], d2 + 3)
        for g1 in range(d2 + 1):
            groups: Dict[int, List[Tuple[int, int]]] = {}
            for (e, pu), c in p1[g1]:
                groups.setdefault(e, []).append((pu, c))
            inv1 = inv_k[g1]
            for g2 in range(d2 - g1 + 1):
                acc: Dict[int, mpq] = {}
                for e, terms1 in groups.items():
                    q = e + g2
                    srow = s2[q]
                    tmp: Dict[int, int] = {}
                    for pu1, c1 in terms1:
                        for pu2, c2 in srow:
                            k = pu1 + pu2
                            if k in tmp:
                                tmp[k] += c1 * c2
                            else:
                                tmp[k] = c1 * c2
                    sc = inv1 * inv_k[q]
                    for k, ci in tmp.items():
                        v = ci * sc
                        if k in acc:
                            acc[k] += v
                        else:
                            acc[k] = v
                t_items = list(acc.items())
                g = g1 + g2
                base = (g1 * KB + g2) * KB
                for d1 in range(d2 - g + 1):
                    off0 = d1 * KB + 1
                    keyrow = (base + d1) * KB
                    start = (g + d1) % 2
                    for dd2 in range(start, d2 - g - d1 + 1, 2):
                        off = off0 + dd2
                        s = mpq()
                        for k, c in t_items:
                            s += c * moments[k + off]
                        nk = keyrow + dd2
                        if nk in table:
                            table[nk] += s
                        else:
                            table[nk] = s
    return table


def ridge_table(d2: int) -> Dict[int, mpq]:
    """Table of integrals over u of (u-1) * (piece integral of x1^g1 x2^g2
    times u^e), for all g1+g2+e <= d2 of even total, keyed by
    (g1*KB+g2)*KB+e."""
    table: Dict[int, mpq] = {}
    inv_k = [mpq(1, (k + 1) << (k + 1)) for k in range(d2 + 3)]
    for piece in _RIDGE_PIECES:
        x1l, x1u = piece["x1"]
        x2l, x2u = piece["x2"]
        # x1 bounds affine in (1, x2, u): reuse the wedge builder with the
        # u coefficient in the "u1" slot and zero in the "u2" slot.
        x1l4 = (x1l[0], x1l[1], x1l[2], 0)
        x1u4 = (x1u[0], x1u[1], x1u[2], 0)
        p1 = _diff_tables(
            _powers_x1_wedge(x1u4, d2 + 1), _powers_x1_wedge(x1l4, d2 + 1), d2
        )
        s2 = _diff_tables(
            _powers_u(x2u, d2 + 2, (KB,)), _powers_u(x2l, d2 + 2, (KB,)), d2 + 1
        )
        lo, hi = piece["u"]
        moments = _ridge_u_moments(lo, hi, 2 * d2 + 4)
        for g1 in range(d2 + 1):
            groups: Dict[int, List[Tuple[int, int]]] = {}
            for (e, pu), c in p1[g1]:
                groups.setdefault(e, []).append((pu >> 6, c))  # pu = eu*KB
            inv1 = inv_k[g1]
            for g2 in range(d2 - g1 + 1):
                acc: Dict[int, mpq] = {}
                for e, terms1 in groups.items():
                    q = e + g2
                    srow = [(pu >> 6, c) for pu, c in s2[q]]
                    tmp: Dict[int, int] = {}
                    for eu1, c1 in terms1:
                        for eu2, c2 in srow:
                            k = eu1 + eu2
                            if k in tmp:
                                tmp[k] += c1 * c2
                            else:
                                tmp[k] = c1 * c2
                    sc = inv1 * inv_k[q]
                    for k, ci in tmp.items():
                        v = ci * sc
                        if k in acc:
                            acc[k] += v
                        else:
                            acc[k] = v
                t_items = list(acc.items())
                g = g1 + g2
                base = (g1 * KB + g2) * KB
                for e in range(g % 2, d2 - g + 1, 2):
                    s = mpq()
                    for k, c in t_items:
                        s += c * moments[k + e]
                    nk = base + e
                    if nk in table:
                        table[nk] += s
                    else:
                        table[nk] = s
    return table


# ---------------------------------------------------------------------------
# pair tables: scatter the translate binomials once per monomial pair


@lru_cache(maxsize=4)
def pair_tables(d: int):
    """For every pair of even-degree monomials a (on p) and bp (on p'),
    the ridge and wedge integrals of p(x) p'(x - shift) with the
    parametrization-specific shift direction:

      ridge: shift = (-u, u), weight (u - 1), u in [0, 1]
      wedge: shift = (u1, u2), weight u2 over the wedge

    Returns (ridge2, wedge2): dicts keyed (a, bp) with mpq values.
    """
    d2 = 2 * d
    wed = wedge_table(d2)
    rid = ridge_table(d2)
    monos = [
        (a1, t - a1) for t in range(0, d + 1, 2) for a1 in range(t + 1)
    ]
    ridge2: Dict[Tuple, mpq] = {}
    wedge2: Dict[Tuple, mpq] = {}
    for bp in monos:
        b1, b2 = bp
        rb1, rb2 = _BINOM[b1], _BINOM[b2]
        jterms = []
        for j1 in range(b1 + 1):
            for j2 in range(b2 + 1):
                cc = rb1[j1] * rb2[j2]
                jterms.append((j1, j2, b1 - j1, b2 - j2, cc))
        for a in monos:
            a1, a2 = a
            sw = mpq()
            sr = mpq()
            for j1, j2, r1, r2, cc in jterms:
                g1 = a1 + j1
                g2 = a2 + j2
                base = (g1 * KB + g2) * KB
                # wedge: p'(x1-u1, x2-u2) has sign (-1)^(r1+r2)
                w = wed[(base + r1) * KB + r2]
                sw += -cc * w if (r1 + r2) % 2 else cc * w
                # ridge: p'(x1+u, x2-u) has sign (-1)^r2, u power r1+r2
                r = rid[base + r1 + r2]
                sr += -cc * r if r2 % 2 else cc * r
            wedge2[(a, bp)] = sw
            ridge2[(a, bp)] = sr
    return ridge2, wedge2


def _mpq_terms(p: MultiPoly) -> List[Tuple[Tuple[int, int], mpq]]:
    out = []
    for e, c in p.terms.items():
        if (e[0] + e[1]) % 2:
            raise ValueError(
                "polynomial has an odd-degree monomial %r; test densities "
                "must be even (invariant under negation)" % (e,)
            )
        out.append((e, mpq(c.numerator, c.denominator)))
    return out


def nu3_pair(p: MultiPoly, pp: MultiPoly, tables=None) -> Fraction:
    """Exact nu3 of the band-limited product pair (p, p')."""
    if tables is None:
        dmax = max(
            max((e[0] + e[1] for e in p.terms), default=0),
            max((e[0] + e[1] for e in pp.terms), default=0),
        )
        tables = pair_tables(dmax)
    ridge2, wedge2 = tables
    tp = _mpq_terms(p)
    tq = _mpq_terms(pp)
    overlap = mpq()
    ridge = mpq()
    wedge = mpq()
    for a, ca in tp:
        for b, cb in tq:
            c = ca * cb
            hm = hexagon_moment(a[0] + b[0], a[1] + b[1])
            if hm:
                overlap += c * mpq(hm.numerator, hm.denominator)
            ridge += c * ridge2[(a, b)]
            wedge += c * wedge2[(a, b)]
    bp = hexagon_integral(p)
    bq = hexagon_integral(pp)
    total = 2 * mpq(bp.numerator, bp.denominator) * mpq(bq.numerator, bq.denominator)
    total += overlap + 6 * ridge - 12 * wedge
    return Fraction(total.numerator, total.denominator)
