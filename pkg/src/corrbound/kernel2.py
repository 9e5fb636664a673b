"""Closed-form two-point reproducing kernel and the bound it implies.

The kernel splits into even and odd parts in the first argument.  Both
parts are ratios whose denominators vanish at the tuned abscissas +-u_m,
where numerator and denominator vanish together; near those points the
quotient is enclosed by the Cauchy mean-value form N'(xi)/D'(xi) evaluated
over the hull of the argument and the abscissa.  Everywhere else the
cleared-denominator formulas below are exact interval arithmetic:

    P(x) = 2 (pi m x)^2                      P(u_m) = 1
    A(x) = (1 - 2m) pi x sin(pi x) + cos(pi x)
    B(x) = x cos(pi x)

    k_plus  = [P A(u) s_plus(x,y)  - A(x) s_plus(u,y)]  / [A(u) (P - 1)]
    k_minus = [P B(u) s_minus(x,y) - B(x) s_minus(u,y)] / [B(u) (P - 1)]

with s_plus, s_minus the even and odd combinations of the sinc translates.
The full kernel is K(x, y) = (k_plus + k_minus)(x/m, y/m) / m, and its
value at the origin has the one-line closed form exposed by k00.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from .arith import (
    DEFAULT_PREC,
    Interval,
    as_fraction,
    iv_cos,
    iv_cot,
    iv_pi,
    iv_sin,
    iv_sqrt,
)
from .errors import ConfigError, ExpansionError

# series window: |t| below this uses the power series with an explicit
# remainder bound; the term ratio there is under (pi/4)^2/20 < 1/30, so
# doubling the first omitted term covers the whole tail
_WINDOW = Fraction(1, 4)
_TERMS = 24

# switch to the mean-value enclosure once |P - 1| drops below this; the
# direct quotient loses only ~20 bits at the boundary, far inside budget
_MVT_WINDOW = Fraction(1, 10**6)


def _abs_max(v: Interval) -> Fraction:
    return max(abs(v.lo_fraction), abs(v.hi_fraction))


def _inside_window(t: Interval) -> bool:
    return -_WINDOW < t.lo_fraction and t.hi_fraction < _WINDOW


def _sinc(t: Interval, pi: Interval, prec: int) -> Interval:
    """sin(pi t)/(pi t) with the removable point handled by series."""
    if _inside_window(t):
        q = pi * pi * t * t
        total = Interval.from_int(1, prec)
        power = Interval.from_int(1, prec)
        for k in range(1, _TERMS):
            power = power * q
            term = power * Fraction((-1) ** k, math.factorial(2 * k + 1))
            total = total + term
        rem = 2 * _abs_max(q) ** _TERMS / math.factorial(2 * _TERMS + 1)
        return total + Interval.from_endpoints(-rem, rem, prec)
    if t.contains_zero():
        raise ExpansionError(
            "sinc argument encloses zero but is too wide for the series"
        )
    arg = pi * t
    return iv_sin(arg) / arg


def _sinc_deriv(t: Interval, pi: Interval, prec: int) -> Interval:
    """d/dt of sin(pi t)/(pi t); series near zero avoids the 0/0 form."""
    if _inside_window(t):
        q = pi * pi * t * t
        acc = Interval.zero(prec)
        power = Interval.from_int(1, prec)
        for k in range(1, _TERMS):
            acc = acc + power * Fraction((-1) ** k * 2 * k, math.factorial(2 * k + 1))
            power = power * q
        rem = (
            2
            * (2 * _TERMS + 2)
            * _abs_max(q) ** (_TERMS - 1)
            / math.factorial(2 * _TERMS + 1)
        )
        g = acc + Interval.from_endpoints(-rem, rem, prec)
        return t * (pi * pi) * g
    if t.contains_zero():
        raise ExpansionError(
            "sinc derivative argument encloses zero but is too wide for the series"
        )
    return (iv_cos(pi * t) - _sinc(t, pi, prec)) / t


@dataclass(frozen=True)
class Kernel2Params:
    """Evaluation context: the band parameter and the tuned abscissa u_m.

    All derived quantities are interval evaluations at the stored
    precision; u_m = 1/(pi m sqrt(2)) is where the denominator P - 1 of
    both kernel parts vanishes.
    """

    m: int
    precision: int = DEFAULT_PREC

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError("band parameter m must be a positive integer")
        if self.precision < 16:
            raise ConfigError("precision below 16 bits is not supported")

    @property
    def pi(self) -> Interval:
        return iv_pi(self.precision)

    @property
    def u_m(self) -> Interval:
        two = Interval.from_int(2, self.precision)
        return Interval.from_int(1, self.precision) / (self.pi * self.m * iv_sqrt(two))

    def P(self, x: Interval) -> Interval:
        w = self.pi * self.m * x
        return 2 * w * w

    def P_deriv(self, x: Interval) -> Interval:
        return 4 * self.pi * self.pi * (self.m * self.m) * x

    def A(self, x: Interval) -> Interval:
        px = self.pi * x
        return (1 - 2 * self.m) * px * iv_sin(px) + iv_cos(px)

    def A_deriv(self, x: Interval) -> Interval:
        px = self.pi * x
        sin, cos = iv_sin(px), iv_cos(px)
        return (1 - 2 * self.m) * (self.pi * sin + self.pi * px * cos) - self.pi * sin

    def B(self, x: Interval) -> Interval:
        return x * iv_cos(self.pi * x)

    def B_deriv(self, x: Interval) -> Interval:
        px = self.pi * x
        return iv_cos(px) - px * iv_sin(px)

    def a(self, x: Interval) -> Interval:
        """The uncleared ratio A/P; singular at x = 0."""
        P = self.P(x)
        if P.contains_zero():
            raise ExpansionError("a(x) is singular where P(x) encloses zero")
        return self.A(x) / P

    def b(self, x: Interval) -> Interval:
        P = self.P(x)
        if P.contains_zero():
            raise ExpansionError("b(x) is singular where P(x) encloses zero")
        return self.B(x) / P


def _s_pair(x: Interval, y: Interval, pi: Interval, prec: int) -> Tuple[Interval, Interval]:
    lo = _sinc(x - y, pi, prec)
    hi = _sinc(x + y, pi, prec)
    half = Fraction(1, 2)
    return (lo + hi) * half, (lo - hi) * half


def _s_pair_dx(x: Interval, y: Interval, pi: Interval, prec: int) -> Tuple[Interval, Interval]:
    lo = _sinc_deriv(x - y, pi, prec)
    hi = _sinc_deriv(x + y, pi, prec)
    half = Fraction(1, 2)
    return (lo + hi) * half, (lo - hi) * half


def _k_parts(par: Kernel2Params, X: Fraction, y: Interval) -> Interval:
    """k_plus + k_minus at exact scaled abscissa X and enclosed ordinate y."""
    prec = par.precision
    pi = par.pi
    x = Interval.from_fraction(X, prec)
    u = par.u_m
    P = par.P(x)
    den = P - 1
    Au = par.A(u)
    Bu = par.B(u)
    spu, smu = _s_pair(u, y, pi, prec)

    if den.contains_zero() or _abs_max(den) < _MVT_WINDOW:
        # x sits against one of the denominator zeros +-u_m; enclose the
        # quotient by N'(xi)/D'(xi) over the hull of x and that zero
        pole = u if X > 0 else Interval.zero(prec) - u
        hull = x.hull(pole)
        Pd = par.P_deriv(hull)
        if Pd.contains_zero():
            raise ExpansionError(
                "mean-value window spans both denominator zeros; "
                "the abscissa is too close to zero for this branch"
            )
        sp, sm = _s_pair(hull, y, pi, prec)
        spd, smd = _s_pair_dx(hull, y, pi, prec)
        Ph = par.P(hull)
        num_p = Pd * Au * sp + Ph * Au * spd - par.A_deriv(hull) * spu
        num_m = Pd * Bu * sm + Ph * Bu * smd - par.B_deriv(hull) * smu
        return num_p / (Au * Pd) + num_m / (Bu * Pd)

    sp, sm = _s_pair(x, y, pi, prec)
    kp = (P * Au * sp - par.A(x) * spu) / (Au * den)
    km = (P * Bu * sm - par.B(x) * smu) / (Bu * den)
    return kp + km


def kernel2_eval(m: int, x, y, precision: int = DEFAULT_PREC) -> Interval:
    """Enclosure of the kernel K(x, y); removable points are safe.

    Arguments are exact rationals (floats are taken at their exact binary
    value).  The only interior work point is the scaled abscissa hitting
    +-u_m, which the mean-value branch covers.
    """
    par = Kernel2Params(m=m, precision=precision)
    X = as_fraction(x) / m
    Y = Interval.from_fraction(as_fraction(y) / m, precision)
    return _k_parts(par, X, Y) * Fraction(1, m)


def k00(m: int, precision: int = DEFAULT_PREC) -> Tuple[Interval, Interval]:
    """(K(0,0), 1/K(0,0)) from the one-line closed form.

    The second component is the two-point bound for band parameter m; the
    cot argument lies in (0, 1) so there is no pole to dodge.
    """
    if m < 1:
        raise ConfigError("band parameter m must be a positive integer")
    one = Interval.from_int(1, precision)
    sqrt2 = iv_sqrt(Interval.from_int(2, precision))
    theta = one / (sqrt2 * m)
    c = iv_cot(theta) / sqrt2 - Fraction(2 * m - 1, 2 * m)
    if not c.is_positive():
        raise ExpansionError("closed form failed to certify a positive bound")
    return one / c, c
