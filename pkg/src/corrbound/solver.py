"""Rank-1 reduction of the single-constraint semidefinite program.

For a PSD Gram matrix A and value vector b, the optimal feasible quadratic
form is attained at rank one, so the program collapses to the linear system
Ac = b with objective 1/(c'b).  Rigor never rests on the solve itself: the
certificate re-evaluates c'Ac/(c'b)^2 in exact or interval arithmetic, and
that quotient is a valid upper bound for ANY coefficient vector, optimal or
not.  A sloppy solve can only loosen the bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .arith import DEFAULT_PREC, Interval, Scalar
from .errors import ConfigError, SingularSystemError
from .functionals import GramSystem

__all__ = [
    "BoundCertificate",
    "solve_rank1",
    "certify_bound",
    "fraction_bound",
    "interval_cholesky",
]

# A pivot whose magnitude bound falls under scale * 2^-DROP_BITS is treated
# as a dependent basis direction and dropped rather than reported singular.
_DROP_BITS = 40


def _is_exact(values) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def _to_iv(x: Scalar, prec: int) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.from_fraction(Fraction(x), prec)


def _system_prec(sys: GramSystem) -> int:
    prec = DEFAULT_PREC
    for row in sys.A:
        for v in row:
            if isinstance(v, Interval):
                prec = max(prec, v.prec)
    return prec


def solve_rank1(sys: GramSystem, dropped: Optional[List[int]] = None) -> List[Scalar]:
    """Solve Ac = b: exact elimination when every entry is rational,
    interval elimination with sign-verified pivots otherwise.

    Interval pivots that enclose zero at negligible magnitude mark a
    dependent basis element; the corresponding coefficient is fixed to zero
    and the principal subsystem is re-solved.  Pass a list to receive the
    dropped indices.  A zero-enclosing pivot at non-negligible magnitude
    means interval elimination cannot track this near-dependent system; the
    solve falls back to exact elimination on the rational midpoints, which
    is safe because the certificate downstream holds for any coefficient
    vector and intervals here only buy tightness.
    """
    flat = [v for row in sys.A for v in row] + list(sys.b)
    if _is_exact(flat):
        return _solve_exact(sys.A, sys.b, dropped)
    prec = _system_prec(sys)
    A = [[_to_iv(v, prec) for v in row] for row in sys.A]
    b = [_to_iv(v, prec) for v in sys.b]
    keep = list(range(len(b)))
    while True:
        sub_A = [[A[i][j] for j in keep] for i in keep]
        sub_b = [b[i] for i in keep]
        try:
            result = _solve_interval(sub_A, sub_b, prec)
        except SingularSystemError:
            mid_A = [[v.mid_fraction for v in row] for row in sub_A]
            mid_b = [v.mid_fraction for v in sub_b]
            sub_drop: List[int] = []
            vals = _solve_exact(mid_A, mid_b, sub_drop)
            if dropped is not None:
                dropped.extend(keep[j] for j in sub_drop)
            result = [Interval.from_fraction(v, prec) for v in vals]
        if isinstance(result, list):
            full: List[Scalar] = [Interval.zero(prec)] * len(b)
            for idx, val in zip(keep, result):
                full[idx] = val
            return full
        # result is the index (within keep) of a droppable pivot column
        drop = keep.pop(result)
        if dropped is not None:
            dropped.append(drop)
        if not keep:
            raise SingularSystemError("every pivot was negligible; empty system")


def _solve_exact(A, b, dropped: Optional[List[int]]) -> List[Scalar]:
    k = len(b)
    M = [[Fraction(A[i][j]) for j in range(k)] + [Fraction(b[i])] for i in range(k)]
    cols = list(range(k))
    row = 0
    pivots: List[Tuple[int, int]] = []
    for col in range(k):
        piv = next((r for r in range(row, k) if M[r][col] != 0), None)
        if piv is None:
            if dropped is not None:
                dropped.append(col)
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = 1 / M[row][col]
        M[row] = [v * inv for v in M[row]]
        for r in range(k):
            if r != row and M[r][col] != 0:
                f = M[r][col]
                M[r] = [vr - f * vp for vr, vp in zip(M[r], M[row])]
        pivots.append((row, col))
        row += 1
    for r in range(row, k):
        if M[r][k] != 0:
            raise SingularSystemError(
                "exact system is inconsistent (rank-deficient with b outside "
                "the column space)"
            )
    c = [Fraction(0)] * k
    for r, col in pivots:
        c[col] = M[r][k]
    return c


def _solve_interval(A: List[List[Interval]], b: List[Interval], prec: int):
    """Forward elimination with partial pivoting on midpoint magnitude.

    Returns the solution list, or the column index to drop when every pivot
    candidate in a column encloses zero at negligible magnitude.
    """
    k = len(b)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    scale = max(
        (max(abs(v.lo_fraction), abs(v.hi_fraction)) for row in A for v in row),
        default=Fraction(0),
    )
    drop_tol = scale / (1 << _DROP_BITS)
    for col in range(k):
        best, best_mag = None, Fraction(-1)
        all_zero_small = True
        for r in range(col, k):
            piv = M[r][col]
            mag = max(abs(piv.lo_fraction), abs(piv.hi_fraction))
            if not piv.contains_zero():
                all_zero_small = False
                if mag > best_mag:
                    best, best_mag = r, mag
            elif mag > drop_tol:
                all_zero_small = False
        if best is None:
            if all_zero_small:
                return col
            raise SingularSystemError(
                "interval pivot in column %d encloses zero; increase working "
                "precision or the truncation scale C" % col
            )
        M[col], M[best] = M[best], M[col]
        pivot = M[col][col]
        for r in range(col + 1, k):
            f = M[r][col] / pivot
            M[r] = [
                vr - f * vp if j >= col else vr
                for j, (vr, vp) in enumerate(zip(M[r], M[col]))
            ]
    c: List[Interval] = [Interval.zero(prec)] * k
    for r in range(k - 1, -1, -1):
        acc = M[r][k]
        for j in range(r + 1, k):
            acc = acc - M[r][j] * c[j]
        c[r] = acc / M[r][r]
    return c


def fraction_bound(n: int, bound: Scalar) -> Scalar:
    """Lower bound on the limiting fraction with multiplicity below n:
    1 - bound/(n-1)!, exact for rational input, outward for intervals."""
    if n < 2:
        raise ConfigError("fraction bound needs n >= 2")
    fact = factorial(n - 1)
    if isinstance(bound, Fraction):
        return 1 - bound / fact
    return Interval.from_int(1, bound.prec) - bound * Fraction(1, fact)


@dataclass
class BoundCertificate:
    """A self-contained witness: coefficients, the certified quadratic-form
    value, and the fraction bound it implies."""

    c: List[Scalar]
    bound: Scalar
    fraction: Scalar
    meta: Dict
    dropped: List[int] = field(default_factory=list)

    def to_json(self, digits: int = 36) -> str:
        def dec(x: Scalar) -> Dict:
            if isinstance(x, Fraction):
                return {"mid": _dec_str(x, digits), "rad": "0", "exact": str(x)}
            return {
                "mid": _dec_str(x.mid_fraction, digits),
                "rad": _dec_str(x.rad_fraction, 6),
            }

        payload = {
            "meta": self.meta,
            "c": [_dec_str(v, digits) if isinstance(v, Fraction)
                  else _dec_str(v.mid_fraction, digits) for v in self.c],
            "bound": dec(self.bound),
            "fraction": dec(self.fraction),
            "dropped": self.dropped,
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def _dec_str(x: Fraction, digits: int) -> str:
    from decimal import Decimal, localcontext

    with localcontext() as ctx:
        ctx.prec = max(digits, 2)
        d = Decimal(int(x.numerator)) / Decimal(int(x.denominator))
        return format(d, "f")


def certify_bound(sys: GramSystem, c: Sequence[Scalar]) -> BoundCertificate:
    """Enclosure of c'Ac/(c'b)^2 plus its fraction bound.

    Valid as an upper bound on the optimum for any c with c'b bounded away
    from zero, because the underlying quadratic form is the functional of an
    admissible square.  This is the rigor backbone; the solve only picks a
    good c.  Interval coefficients are snapped to their rational midpoints
    first: any fixed c certifies, and a point c avoids the quadratic-form
    dependency blowup that interval coefficients would feed back into the
    enclosure.
    """
    if len(c) != len(sys):
        raise ConfigError("coefficient length does not match the system")
    c = [v.mid_fraction if isinstance(v, Interval) else Fraction(v) for v in c]
    flat = [v for row in sys.A for v in row] + list(sys.b) + list(c)
    n = sys.meta["n"]
    if _is_exact(flat):
        cb = sum(ci * bi for ci, bi in zip(c, sys.b))
        if cb == 0:
            raise SingularSystemError("normalization c'b is zero")
        cac = sum(
            c[i] * c[j] * sys.A[i][j] for i in range(len(c)) for j in range(len(c))
        )
        bound: Scalar = cac / cb**2
    else:
        prec = _system_prec(sys)
        civ = [_to_iv(v, prec) for v in c]
        biv = [_to_iv(v, prec) for v in sys.b]
        cb = Interval.zero(prec)
        for ci, bi in zip(civ, biv):
            cb = cb + ci * bi
        if cb.contains_zero():
            raise SingularSystemError("normalization c'b encloses zero")
        cac = Interval.zero(prec)
        for i in range(len(civ)):
            row = sys.A[i]
            for j in range(len(civ)):
                cac = cac + civ[i] * civ[j] * _to_iv(row[j], prec)
        bound = cac / (cb * cb)
    return BoundCertificate(
        c=list(c),
        bound=bound,
        fraction=fraction_bound(n, bound),
        meta=dict(sys.meta),
    )


def interval_cholesky(sys: GramSystem) -> List[Scalar]:
    """Pivot sequence of the Cholesky-style LDL' factorization.

    All pivots having positive lower bounds certifies positive definiteness;
    a pivot enclosing zero at negligible magnitude is tolerated (the shift
    basis is not orthogonal and may be numerically dependent), anything
    worse raises.
    """
    k = len(sys)
    prec = _system_prec(sys)
    exact = _is_exact([v for row in sys.A for v in row])
    if exact:
        M = [[Fraction(v) for v in row] for row in sys.A]
    else:
        M = [[_to_iv(v, prec) for v in row] for row in sys.A]
    scale = Fraction(0)
    for row in sys.A:
        for v in row:
            mag = abs(v) if isinstance(v, Fraction) else max(
                abs(v.lo_fraction), abs(v.hi_fraction)
            )
            scale = max(scale, mag)
    drop_tol = scale / (1 << _DROP_BITS)
    pivots: List[Scalar] = []
    for i in range(k):
        piv = M[i][i]
        ok = (piv > 0) if exact else piv.is_positive()
        if not ok:
            mag = abs(piv) if exact else max(
                abs(piv.lo_fraction), abs(piv.hi_fraction)
            )
            if mag <= drop_tol:
                pivots.append(piv)
                continue
            raise SingularSystemError(
                "pivot %d is not positive; matrix fails the PSD check" % i
            )
        pivots.append(piv)
        for r in range(i + 1, k):
            f = M[r][i] / piv
            for cidx in range(i, k):
                M[r][cidx] = M[r][cidx] - f * M[i][cidx]
    return pivots
