"""Exact rational arithmetic, rigorous interval enclosures, and exact
multivariate polynomial algebra.

Every numeric statement the package certifies is ultimately reduced either
to arithmetic on `fractions.Fraction` (exact) or to an `Interval`, a pair of
arbitrary-precision dyadic endpoints with outward rounding on every
operation.  Intervals are backed by mpmath's libmpi kernels, which operate
on raw mantissa/exponent tuples; no global mpmath context is mutated, so
all operations here are pure and thread-safe.

Transcendental functions (sin, cos, cot, pi, sqrt) are available only in
interval mode.  The exact mode is restricted to field operations so that
the rational pipeline stays fully symbolic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

from mpmath import mp
from mpmath.libmp import (
    fhalf,
    finf,
    fninf,
    from_int,
    from_rational,
    fzero,
    mpf_add,
    mpf_cmp,
    mpf_neg,
    mpf_shift,
    mpf_sub,
    to_int,
)
from mpmath.libmp.libmpi import (
    mpi_abs,
    mpi_add,
    mpi_cos,
    mpi_cot,
    mpi_div,
    mpi_exp,
    mpi_mul,
    mpi_neg,
    mpi_pi,
    mpi_pow_int,
    mpi_sin,
    mpi_sqrt,
    mpi_sub,
)

__all__ = [
    "DEFAULT_PREC",
    "Interval",
    "Rational",
    "Scalar",
    "as_fraction",
    "interval_contains",
    "iv_cos",
    "iv_cot",
    "iv_pi",
    "iv_sin",
    "iv_sqrt",
    "MultiPoly",
    "poly_integrate_iterated",
    "poly_symmetrize",
    "rref_fraction",
    "solve_fraction",
    "int_matrix_inverse",
    "mat_mul_int",
    "mat_transpose",
]

# Reported bounds carry 9 decimals and the exact linear systems up to
# degree 60 are mildly ill-conditioned; 256 bits leaves a wide margin.
DEFAULT_PREC = 256

Rational = Fraction


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions, gmpy2.mpq and numeric strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    # works for gmpy2.mpq/mpz, decimal strings, "p/q" strings
    return Fraction(x)


def _fraction_to_mpf(q: Fraction, prec: int, rnd: str):
    # raw libmp tuple for q rounded in direction rnd ('f' floor / 'c' ceiling)
    return from_rational(q.numerator, q.denominator, prec, rnd)


def _mpf_to_fraction(t) -> Fraction:
    # raw tuples are (sign, man, exp, bc); value = (-1)^sign * man * 2^exp
    if t == fzero:
        return Fraction(0)
    if t in (finf, fninf):
        raise OverflowError("cannot convert infinite endpoint to Fraction")
    sign, man, exp, _ = t
    v = Fraction(man) * (Fraction(2) ** exp)
    return -v if sign else v


class Interval:
    """Closed real interval [lo, hi] with dyadic endpoints.

    Invariant: lo <= hi and every operation encloses the exact image of its
    operands (outward rounding at the working precision).  The working
    precision of a binary result is the max of the operand precisions.
    """

    __slots__ = ("_v", "prec")

    def __init__(self, v, prec: int = DEFAULT_PREC):
        self._v = v  # pair of raw libmp mpf tuples (lo, hi)
        self.prec = prec
        if mpf_cmp(v[0], v[1]) > 0:
            raise ValueError("interval endpoints out of order")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_fraction(cls, q, prec: int = DEFAULT_PREC) -> "Interval":
        q = as_fraction(q)
        lo = _fraction_to_mpf(q, prec, "f")
        hi = _fraction_to_mpf(q, prec, "c")
        return cls((lo, hi), prec)

    @classmethod
    def from_int(cls, k: int, prec: int = DEFAULT_PREC) -> "Interval":
        t = from_int(k)
        return cls((t, t), prec)

    @classmethod
    def from_endpoints(cls, lo, hi, prec: int = DEFAULT_PREC) -> "Interval":
        lo = as_fraction(lo)
        hi = as_fraction(hi)
        if lo > hi:
            raise ValueError("lo > hi")
        return cls((_fraction_to_mpf(lo, prec, "f"), _fraction_to_mpf(hi, prec, "c")), prec)

    @classmethod
    def zero(cls, prec: int = DEFAULT_PREC) -> "Interval":
        return cls((fzero, fzero), prec)

    # -- coercion ------------------------------------------------------

    @staticmethod
    def _coerce(x, prec: int):
        if isinstance(x, Interval):
            return x
        if isinstance(x, (int, Fraction)):
            return Interval.from_fraction(x, prec)
        try:
            return Interval.from_fraction(as_fraction(x), prec)
        except (TypeError, ValueError):
            return NotImplemented

    # -- accessors -----------------------------------------------------

    @property
    def lo(self):
        return mp.make_mpf(self._v[0])

    @property
    def hi(self):
        return mp.make_mpf(self._v[1])

    @property
    def lo_fraction(self) -> Fraction:
        return _mpf_to_fraction(self._v[0])

    @property
    def hi_fraction(self) -> Fraction:
        return _mpf_to_fraction(self._v[1])

    @property
    def mid_fraction(self) -> Fraction:
        return (self.lo_fraction + self.hi_fraction) / 2

    @property
    def rad_fraction(self) -> Fraction:
        return (self.hi_fraction - self.lo_fraction) / 2

    @property
    def midpoint(self):
        m = mpf_shift(mpf_add(self._v[0], self._v[1], self.prec + 8, "n"), -1)
        return mp.make_mpf(m)

    @property
    def radius(self):
        # rounded up so that [midpoint - radius, midpoint + radius] covers self
        r = mpf_shift(mpf_sub(self._v[1], self._v[0], self.prec + 8, "u"), -1)
        return mp.make_mpf(r)

    def __float__(self):
        return float(self.midpoint)

    # -- arithmetic ----------------------------------------------------

    def _binary(self, other, op):
        o = Interval._coerce(other, self.prec)
        if o is NotImplemented:
            return NotImplemented
        prec = max(self.prec, o.prec)
        return Interval(op(self._v, o._v, prec), prec)

    def __add__(self, other):
        return self._binary(other, mpi_add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, mpi_sub)

    def __rsub__(self, other):
        o = Interval._coerce(other, self.prec)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        return self._binary(other, mpi_mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval._coerce(other, self.prec)
        if o is NotImplemented:
            return NotImplemented
        if o.contains_zero():
            raise ZeroDivisionError("interval divisor encloses zero")
        prec = max(self.prec, o.prec)
        return Interval(mpi_div(self._v, o._v, prec), prec)

    def __rtruediv__(self, other):
        o = Interval._coerce(other, self.prec)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return Interval(mpi_pow_int(self._v, k, self.prec), self.prec)

    def __neg__(self):
        return Interval(mpi_neg(self._v, self.prec), self.prec)

    def __abs__(self):
        return Interval(mpi_abs(self._v, self.prec), self.prec)

    # -- predicates ------------------------------------------------------

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo_fraction <= x.lo_fraction and x.hi_fraction <= self.hi_fraction
        q = as_fraction(x)
        return self.lo_fraction <= q <= self.hi_fraction

    def contains_zero(self) -> bool:
        return self.contains(0)

    def overlaps(self, other: "Interval") -> bool:
        return not (
            self.hi_fraction < other.lo_fraction or other.hi_fraction < self.lo_fraction
        )

    def is_positive(self) -> bool:
        return self.lo_fraction > 0

    def is_negative(self) -> bool:
        return self.hi_fraction < 0

    def sign(self):
        """-1, 0 or +1 when determinable, None when the enclosure straddles 0."""
        lo, hi = self.lo_fraction, self.hi_fraction
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        if lo == 0 and hi == 0:
            return 0
        return None

    def hull(self, other: "Interval") -> "Interval":
        prec = max(self.prec, other.prec)
        lo = self._v[0] if mpf_cmp(self._v[0], other._v[0]) <= 0 else other._v[0]
        hi = self._v[1] if mpf_cmp(self._v[1], other._v[1]) >= 0 else other._v[1]
        return Interval((lo, hi), prec)

    def widened(self, slack) -> "Interval":
        """Enclosure enlarged by +-slack (a nonnegative rational)."""
        s = as_fraction(slack)
        if s < 0:
            raise ValueError("slack must be nonnegative")
        if s == 0:
            return self
        pad = Interval.from_endpoints(-s, s, self.prec)
        return self + pad

    # -- formatting ------------------------------------------------------

    def decimal_str(self, digits: int = 20) -> str:
        with mp.workprec(max(self.prec, 53)):
            return mp.nstr(self.midpoint, digits, strip_zeros=False)

    def __repr__(self):
        with mp.workprec(max(self.prec, 53)):
            return "Interval(%s +- %s, prec=%d)" % (
                mp.nstr(self.midpoint, 20),
                mp.nstr(self.radius, 5),
                self.prec,
            )


Scalar = Union[int, Fraction, Interval]


def interval_contains(a: Interval, x) -> bool:
    """True iff the rational x lies in the enclosure a (exact comparison)."""
    return a.contains(x)


def to_interval(x: Scalar, prec: int = DEFAULT_PREC) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.from_fraction(as_fraction(x), prec)


def iv_pi(prec: int = DEFAULT_PREC) -> Interval:
    return Interval(mpi_pi(prec), prec)


def _unary(x: Interval, op) -> Interval:
    return Interval(op(x._v, x.prec), x.prec)


def iv_sin(x: Interval) -> Interval:
    return _unary(x, mpi_sin)


def iv_cos(x: Interval) -> Interval:
    return _unary(x, mpi_cos)


def iv_sqrt(x: Interval) -> Interval:
    return _unary(x, mpi_sqrt)


def iv_exp(x: Interval) -> Interval:
    return _unary(x, mpi_exp)


def iv_cot(x: Interval) -> Interval:
    if iv_sin(x).contains_zero():
        raise ZeroDivisionError("cot argument encloses a multiple of pi")
    return _unary(x, mpi_cot)


# ----------------------------------------------------------------------
# exact multivariate polynomials
# ----------------------------------------------------------------------


class MultiPoly:
    """Multivariate polynomial with exact Fraction coefficients.

    Terms map exponent tuples (length nvars) to nonzero coefficients.
    Instances are treated as immutable; all operations return new objects.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        clean = {}
        if terms:
            for expo, c in terms.items():
                c = as_fraction(c)
                if c == 0:
                    continue
                expo = tuple(int(e) for e in expo)
                if len(expo) != nvars or any(e < 0 for e in expo):
                    raise ValueError("bad exponent vector %r" % (expo,))
                clean[expo] = clean.get(expo, Fraction(0)) + c
                if clean[expo] == 0:
                    del clean[expo]
        self.nvars = nvars
        self.terms = clean

    # -- constructors ----------------------------------------------------

    @classmethod
    def const(cls, c, nvars: int) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: as_fraction(c)})

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars, {})

    @classmethod
    def var(cls, i: int, nvars: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, expo: Sequence[int], coeff=1) -> "MultiPoly":
        expo = tuple(expo)
        return cls(len(expo), {expo: as_fraction(coeff)})

    @classmethod
    def affine(cls, c0, coeffs: Sequence) -> "MultiPoly":
        """c0 + sum coeffs[i] * x_i."""
        n = len(coeffs)
        terms = {(0,) * n: as_fraction(c0)}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = as_fraction(c)
        return cls(n, terms)

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def variables_used(self):
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(i)
        return used

    # -- ring operations ----------------------------------------------------

    def _check_compat(self, other: "MultiPoly"):
        if self.nvars != other.nvars:
            raise ValueError("variable-count mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other, self.nvars)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check_compat(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, Fraction(0)) + c
        return MultiPoly(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other, self.nvars)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = as_fraction(other)
            return MultiPoly(self.nvars, {e: k * c for e, k in self.terms.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check_compat(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = MultiPoly.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other, self.nvars)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- evaluation and substitution ---------------------------------------

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact evaluation at a rational point."""
        pt = [as_fraction(x) for x in point]
        if len(pt) != self.nvars:
            raise ValueError("point has wrong dimension")
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v *= x**k
            total += v
        return total

    def evaluate_interval(self, point: Sequence[Interval], prec: int = DEFAULT_PREC) -> Interval:
        total = Interval.zero(prec)
        for e, c in self.terms.items():
            v = Interval.from_fraction(c, prec)
            for x, k in zip(point, e):
                if k:
                    v = v * (x**k)
            total = total + v
        return total

    def substitute(self, var: int, replacement: "MultiPoly") -> "MultiPoly":
        """Substitute replacement (same variable space) for x_var."""
        self._check_compat(replacement)
        powers = {0: MultiPoly.const(1, self.nvars)}

        def power(k):
            if k not in powers:
                powers[k] = power(k - 1) * replacement
            return powers[k]

        out = MultiPoly.zero(self.nvars)
        for e, c in self.terms.items():
            k = e[var]
            rest = list(e)
            rest[var] = 0
            out = out + MultiPoly(self.nvars, {tuple(rest): c}) * power(k)
        return out

    def compose_linear(self, matrix) -> "MultiPoly":
        """Return q with q(x) = p(M x); M given as rows of rationals."""
        n = self.nvars
        rows = [list(r) for r in matrix]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("matrix shape mismatch")
        images = [
            MultiPoly(n, {tuple(1 if j == k else 0 for k in range(n)): as_fraction(rows[i][j])
                          for j in range(n) if rows[i][j] != 0})
            for i in range(n)
        ]
        cache = [{0: MultiPoly.const(1, n)} for _ in range(n)]

        def power(i, k):
            c = cache[i]
            if k not in c:
                c[k] = power(i, k - 1) * images[i]
            return c[k]

        out = MultiPoly.zero(n)
        for e, coeff in self.terms.items():
            term = MultiPoly.const(coeff, n)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def antiderivative(self, var: int) -> "MultiPoly":
        t = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[var] += 1
            t[tuple(e2)] = c / e2[var]
        return MultiPoly(self.nvars, t)

    def __repr__(self):
        if not self.terms:
            return "MultiPoly(0)"
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), e), reverse=True):
            c = self.terms[e]
            mono = "*".join(
                "x%d" % i if k == 1 else "x%d^%d" % (i, k) for i, k in enumerate(e) if k
            )
            parts.append(("%s*%s" % (c, mono)) if mono else str(c))
        return "MultiPoly(%s)" % " + ".join(parts)


def _as_bound_poly(bound, nvars: int) -> MultiPoly:
    if isinstance(bound, MultiPoly):
        return bound
    return MultiPoly.const(as_fraction(bound), nvars)


def poly_integrate_iterated(p: MultiPoly, limits: Iterable) -> Fraction:
    """Iterated exact integral of p; limits are (variable, lower, upper),
    innermost first, bounds polynomial (typically affine) in variables not
    yet integrated.  Raises ValueError if a bound references a variable
    that has already been integrated out.
    """
    acc = p
    done = set()
    for var, lower, upper in limits:
        if var in done:
            raise ValueError("variable %d integrated twice" % var)
        lo = _as_bound_poly(lower, p.nvars)
        hi = _as_bound_poly(upper, p.nvars)
        for b in (lo, hi):
            bad = b.variables_used() & (done | {var})
            if bad:
                raise ValueError(
                    "integration bound references integrated variable(s) %s" % sorted(bad)
                )
        anti = acc.antiderivative(var)
        acc = anti.substitute(var, hi) - anti.substitute(var, lo)
        done.add(var)
    if not acc.is_constant():
        raise ValueError("free variables remain after integration: %s"
                         % sorted(acc.variables_used()))
    return acc.constant_value()


def _group_matrices(G):
    # accept a Group-like object (with .matrices()) or a bare iterable
    if hasattr(G, "matrices"):
        return list(G.matrices())
    return [tuple(tuple(int(x) for x in row) for row in m) for m in G]


def poly_symmetrize(p: MultiPoly, G) -> MultiPoly:
    """Average (1/|G|) sum_gamma p(gamma^{-1} x) over a finite matrix group."""
    mats = _group_matrices(G)
    total = MultiPoly.zero(p.nvars)
    for m in mats:
        total = total + p.compose_linear(int_matrix_inverse(m))
    return total * Fraction(1, len(mats))


# ----------------------------------------------------------------------
# exact linear algebra helpers
# ----------------------------------------------------------------------


def rref_fraction(rows):
    """Reduced row echelon form over Fraction.  Returns (rref_rows, pivots)."""
    m = [list(map(as_fraction, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def solve_fraction(A, b):
    """Exact solution of A x = b (square, nonsingular) over Fraction."""
    n = len(A)
    m = [[as_fraction(A[i][j]) for j in range(n)] + [as_fraction(b[i])] for i in range(n)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        m[c], m[pivot] = m[pivot], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b_ for a, b_ in zip(m[i], m[c])]
    return [m[i][n] for i in range(n)]


def int_matrix_inverse(mat):
    """Exact inverse of an integer matrix, returned as Fraction rows."""
    n = len(mat)
    cols = [solve_fraction(mat, [1 if i == j else 0 for i in range(n)]) for j in range(n)]
    return [tuple(cols[j][i] for j in range(n)) for i in range(n)]


def mat_mul_int(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def mat_transpose(a):
    n = len(a)
    return tuple(tuple(a[j][i] for j in range(n)) for i in range(n))
