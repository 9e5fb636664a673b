"""Gram data for the correlation bound: b[i] = g_i(0) and A[i][i'] = nu_n(g_i g_i').

Two parametrizations feed the rank-1 solver.  The polynomial route (n=3, m=1)
is exact: basis elements are invariant polynomials restricted to the hexagon,
and every Gram entry is a rational number computed by closed-form integration
(see _hexint).  The shift route (n in {2,3,4}) places translates of the
polytope transform on a lattice; Poisson summation turns nu_n into a lattice
sum of transform products weighted by the sine-kernel determinant, evaluated
over a truncation box with a certified tail estimate (see _lattice).

Shift-route enclosures carry three error sources, all inside the radius: the
directed rounding of the box sum, the extrapolated tail of the lattice sum,
and ten times the tail model's residual on a held-out inner box.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .arith import DEFAULT_PREC, Interval, MultiPoly, Scalar, as_fraction, iv_pi, iv_sin
from .errors import CacheCorruptError, ConfigError, TailToleranceError
from .polytopes import HPolytope, ft_H
from .symmetry import InvariantBasis
from . import _hexint
from . import _lattice

__all__ = [
    "SincMatrixEvaluator",
    "TruncationParams",
    "GramSystem",
    "w_eval",
    "b_poly",
    "nu3_poly",
    "b_shift",
    "nu_shift",
    "assemble_gram",
    "default_shift",
]

# Nested-box cuts used for the tail fit are C//4, C//2, 3C//4, C; the two
# outermost increments determine the model and the innermost validates it.
_MIN_C = 8

# Below this relative tolerance the tail machinery would reject its own
# certified output on spec-scale boxes, so it is the permissive default;
# callers chasing tighter tails pass their own.
DEFAULT_TAIL_TOLERANCE = 0.5


def _sinc_iv(t: Fraction, prec: int) -> Interval:
    """sin(pi t)/(pi t) as an enclosure; exactly 1 at t = 0."""
    if t == 0:
        return Interval.from_int(1, prec)
    pt = iv_pi(prec) * t
    return iv_sin(pt) / pt


_PARITY = {0: 1}


def _perm_signs(n: int) -> List[Tuple[Tuple[int, ...], int]]:
    import itertools

    out = []
    for perm in itertools.permutations(range(n)):
        inv = sum(
            1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b]
        )
        out.append((perm, -1 if inv & 1 else 1))
    return out


class SincMatrixEvaluator:
    """Evaluates the n-point sine-kernel determinant at exact rational points.

    Entries are sinc(x_i - x_j) with unit diagonal (the i = j limit), and the
    determinant is expanded over permutations so no pivoting decisions leak
    rounding into the enclosure.  Values land in [0, 1] up to enclosure width.
    """

    def __init__(self, n: int, precision: int = DEFAULT_PREC):
        if n < 1:
            raise ConfigError("matrix size must be positive")
        self.n = n
        self.precision = precision
        self._perms = _perm_signs(n)

    def w_eval(self, x: Sequence) -> Interval:
        if len(x) != self.n:
            raise ConfigError(
                "expected %d coordinates, got %d" % (self.n, len(x))
            )
        pts = [as_fraction(c) for c in x]
        prec = self.precision
        one = Interval.from_int(1, prec)
        entries: List[List[Interval]] = [
            [
                one if i == j else _sinc_iv(pts[i] - pts[j], prec)
                for j in range(self.n)
            ]
            for i in range(self.n)
        ]
        total = Interval.zero(prec)
        for perm, sign in self._perms:
            prod = one
            for i, j in enumerate(perm):
                prod = prod * entries[i][j]
            total = total + prod if sign > 0 else total - prod
        return total


def w_eval(n: int, x: Sequence, precision: int = DEFAULT_PREC) -> Interval:
    """Sine-kernel determinant at x (n coordinates; append the trailing zero
    of the correlation density yourself)."""
    return SincMatrixEvaluator(n, precision).w_eval(x)


def default_shift(n: int, m: int) -> Tuple[Fraction, ...]:
    """The staggered shift (i/(m(m+1)n))_i; every coordinate and every
    pairwise difference misses the singular set of the transform."""
    return tuple(Fraction(i, m * (m + 1) * n) for i in range(1, n))


@dataclass(frozen=True)
class TruncationParams:
    """Lattice truncation: box scale C, sampling shift s, tail tolerance.

    Nonsingularity of every sampled transform argument reduces to an exact
    divisibility check on s: no (m+1)s_i and no (m+1)(s_i - s_j) may be an
    integer.  The check runs at construction so downstream grid code never
    needs a singular-point fallback.
    """

    n: int
    m: int
    C: int
    s: Tuple[Fraction, ...] = ()
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE

    def __post_init__(self):
        if self.n not in (2, 3, 4):
            raise ConfigError("shift route supports n in {2, 3, 4}")
        if self.m < 1:
            raise ConfigError("m must be a positive integer")
        if self.C < _MIN_C:
            raise ConfigError("truncation scale C must be at least %d" % _MIN_C)
        s = self.s or default_shift(self.n, self.m)
        s = tuple(as_fraction(c) for c in s)
        object.__setattr__(self, "s", s)
        if len(s) != self.n - 1:
            raise ConfigError("shift must have %d coordinates" % (self.n - 1))
        mm = self.m + 1
        for i, si in enumerate(s):
            if (mm * si).denominator == 1:
                raise ConfigError(
                    "shift coordinate %d hits a singular transform argument" % i
                )
        for i in range(len(s)):
            for j in range(i + 1, len(s)):
                if (mm * (s[i] - s[j])).denominator == 1:
                    raise ConfigError(
                        "shift coordinates %d and %d collide modulo the "
                        "sampling lattice" % (i, j)
                    )
        if not (0 < self.tail_tolerance <= 1):
            raise ConfigError("tail tolerance must lie in (0, 1]")

    def meta(self) -> Dict:
        return {
            "C": self.C,
            "s": [str(c) for c in self.s],
            "tail_tolerance": self.tail_tolerance,
        }


def _same_scalar(a: Scalar, b: Scalar) -> bool:
    if a is b:
        return True
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    if isinstance(a, Interval) and isinstance(b, Interval):
        return a.lo_fraction == b.lo_fraction and a.hi_fraction == b.hi_fraction
    return False


@dataclass
class GramSystem:
    """Symmetric Gram matrix A, value vector b, and provenance metadata.

    A entries are Fractions on the exact route and Intervals on the shift
    route.  b entries are rational whenever the transform arguments are
    exact-value points and tight enclosures otherwise (nonzero translates
    land on transcendental transform values for m > 1).
    """

    A: List[List[Scalar]]
    b: List[Scalar]
    meta: Dict

    def __post_init__(self):
        k = len(self.b)
        if len(self.A) != k or any(len(row) != k for row in self.A):
            raise ConfigError("Gram matrix shape does not match b")
        for i in range(k):
            for j in range(i + 1, k):
                if not _same_scalar(self.A[i][j], self.A[j][i]):
                    raise ConfigError("Gram matrix must be exactly symmetric")

    def __len__(self) -> int:
        return len(self.b)

    @property
    def exact(self) -> bool:
        return bool(self.meta.get("exact"))


# ----------------------------------------------------------------------
# polynomial route (n = 3, m = 1)


def b_poly(n: int, basis) -> List[Fraction]:
    """Exact hexagon integrals of the basis polynomials."""
    if n != 3:
        raise ConfigError("polynomial route is implemented for n = 3 only")
    funcs = basis.functions if isinstance(basis, InvariantBasis) else list(basis)
    return [_hexint.hexagon_integral(p) for p in funcs]


def nu3_poly(p: MultiPoly, pp: MultiPoly, tables=None) -> Fraction:
    """nu_3 of the product of two invariant polynomials, exactly.

    Assembled from the overlap integral over the hexagon, the ridge term on
    the boundary segment family, and the wedge term over the interior cone,
    each an iterated rational integral.  Odd-degree monomials are rejected:
    they integrate to zero only when the input really is invariant, so their
    presence signals a caller bug rather than a value.
    """
    try:
        return _hexint.nu3_pair(p, pp, tables)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# ----------------------------------------------------------------------
# shift route (n in {2, 3, 4})


def b_shift(n: int, m: int, basis) -> List[Scalar]:
    """g_i(0) for orbit-sum translate functions: the polytope transform of
    the (1/m)-scaled body evaluated at the negated orbit points.

    Orbit points are integer vectors in m Z^{n-1}, where the transform's
    closed form degenerates; ft_H routes those through its limit evaluator
    and returns exact rationals."""
    funcs = basis.functions if isinstance(basis, InvariantBasis) else list(basis)
    body = HPolytope(n, Fraction(1, m))
    out: List[Scalar] = []
    for orbit in funcs:
        total: Scalar = Fraction(0)
        for member in orbit:
            val = ft_H(body, tuple(Fraction(-c) for c in member))
            total = total + val
        out.append(total)
    return out


def _fit_two_term(b1: int, b2: int, b3: int, d1: Fraction, d2: Fraction):
    """Coefficients (a, b) of the tail model S(inf) - S(B) = a/B + b/B^2
    matching the increments S(b2)-S(b1) = d1 and S(b3)-S(b2) = d2 exactly.
    All rational; the 2x2 system is nonsingular for distinct cuts."""
    B1, B2, B3 = Fraction(b1), Fraction(b2), Fraction(b3)
    m11 = 1 / B1 - 1 / B2
    m12 = 1 / B1**2 - 1 / B2**2
    m21 = 1 / B2 - 1 / B3
    m22 = 1 / B2**2 - 1 / B3**2
    det = m11 * m22 - m12 * m21
    a = (d1 * m22 - m12 * d2) / det
    b = (m11 * d2 - d1 * m21) / det
    return a, b


def _tail_estimate(
    mids: Sequence[Fraction],
    cuts: Sequence[int],
    tolerance: float,
    scale_hint: Optional[Fraction] = None,
) -> Tuple[Fraction, Fraction]:
    """Tail of the lattice sum beyond the outer box, as (midpoint, radius).

    The increments between nested boxes decay like an inverse power of the
    cut, so the model a/B + b/B^2 is fit on the two outermost increments.
    Model uncertainty is measured where it is used: the same model fit on
    the two innermost increments is extrapolated to the outer box, and ten
    times the spread between the two predictions goes into the radius.
    Oscillating increments get a zero midpoint and a first-omitted-increment
    radius instead.  Raises when the combined tail exceeds the relative
    tolerance, reporting what was achieved.

    Cross entries of a Gram matrix may cancel to nearly zero while their
    honest tail stays at the scale of the basis functions; the caller passes
    the matrix scale as scale_hint so those entries are not rejected for
    having a small value rather than a bad truncation.
    """
    d0 = mids[1] - mids[0]
    d1 = mids[2] - mids[1]
    d2 = mids[3] - mids[2]
    scale = max(abs(mids[3]), scale_hint or Fraction(0), Fraction(1, 10**12))
    floor = scale / Fraction(10**13)

    def _finish(tail: Fraction, rad: Fraction) -> Tuple[Fraction, Fraction]:
        budget = (abs(tail) + rad) / scale
        if budget > Fraction(tolerance).limit_denominator(10**9):
            raise TailToleranceError(
                "tail estimate is %.3g of the sum, above the tolerance %.3g; "
                "increase C" % (float(budget), tolerance),
                achieved=float(budget),
            )
        return tail, rad

    B0, B1, B2, B3 = cuts
    if abs(d1) <= floor and abs(d2) <= floor:
        return _finish(Fraction(0), 10 * (abs(d1) + abs(d2)) + floor)
    if d1 * d2 <= 0:
        # Sign change: partial sums bracket the limit, no directed model;
        # ten times the larger increment covers the remainder.
        return _finish(Fraction(0), 10 * max(abs(d1), abs(d2)))
    if abs(d2) >= abs(d1):
        # Same sign, not yet decaying.  No extrapolation is defensible, so
        # leave the midpoint at the box sum and let the budget check decide
        # whether the crude remainder estimate is tolerable.
        return _finish(Fraction(0), 10 * (abs(d1) + abs(d2)))
    a, b = _fit_two_term(B1, B2, B3, d1, d2)
    tail = a / B3 + b / B3**2
    # One-term model through the last increment alone; guards a blown-up
    # 2x2 solve and serves as the uncertainty partner when the inner
    # increments are unusable.
    tail_one = d2 * Fraction(B2) / (B3 - B2)
    if abs(tail) > 8 * abs(tail_one) + floor:
        return _finish(tail_one, 10 * abs(tail_one) + floor)
    if d0 * d1 > 0 and abs(d1) < abs(d0):
        a2, b2 = _fit_two_term(B0, B1, B2, d0, d1)
        alt = a2 / B3 + b2 / B3**2
    else:
        alt = tail_one
    rad = 10 * abs(tail - alt) + floor
    return _finish(tail, rad)


class _ShiftEvaluator:
    """Shared grids for one (n, m, truncation) configuration.

    The determinant grid dominates the cost and is identical across Gram
    entries, so assembly builds one of these and reuses it; nu_shift builds
    a throwaway instance for single entries.
    """

    def __init__(self, n: int, m: int, params: TruncationParams):
        if params.n != n or params.m != m:
            raise ConfigError("truncation parameters were built for (%d, %d)"
                              % (params.n, params.m))
        self.n = n
        self.m = m
        self.params = params
        self.ev = _lattice.LatticeEvaluator(n, m, params.C, params.s)
        self._w = None
        self._grids: Dict = {}
        C = params.C
        self.cuts = [C // 4, C // 2, (3 * C) // 4, C]
        self.masks = [
            None if cut >= C else (self.ev.absmax <= cut) for cut in self.cuts
        ]
        self.prefactor = Fraction(m, m + 1) ** (n - 1)

    def _w_grid(self):
        if self._w is None:
            self._w = self.ev.w_grid()
        return self._w

    def _basis_grid(self, orbit):
        key = tuple(tuple(v) for v in orbit)
        if key not in self._grids:
            self._grids[key] = self.ev.basis_grid(key)
        return self._grids[key]

    def entry(self, orbit_a, orbit_b, scale_hint: Optional[Fraction] = None) -> Interval:
        prod = _lattice.iv_mulv(
            _lattice.iv_mulv(self._basis_grid(orbit_a), self._basis_grid(orbit_b)),
            self._w_grid(),
        )
        sums = []
        for mask in self.masks:
            lo, hi = _lattice.iv_sum_masked(prod, mask)
            sums.append((_lattice.exact_fraction(lo), _lattice.exact_fraction(hi)))
        mids = [(lo + hi) / 2 for lo, hi in sums]
        tail, rad = _tail_estimate(
            mids, self.cuts, self.params.tail_tolerance, scale_hint
        )
        lo_full, hi_full = sums[-1]
        pref = self.prefactor
        return Interval.from_endpoints(
            pref * (lo_full + tail - rad), pref * (hi_full + tail + rad)
        )


def nu_shift(n: int, m: int, f_i, f_ip, t: TruncationParams) -> Interval:
    """Enclosure of nu_n(g_i g_i') by shifted-lattice summation over the
    truncation box, tail-corrected and tail-bounded."""
    return _ShiftEvaluator(n, m, t).entry(f_i, f_ip)


# ----------------------------------------------------------------------
# Gram assembly with a resumable entry cache


def _meta_key(meta: Dict) -> str:
    blob = json.dumps(meta, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _cache_path(cache_dir: str, meta: Dict) -> str:
    return os.path.join(cache_dir, "gram-%s.ndjson" % _meta_key(meta))


def _frac_str(x: Fraction) -> str:
    return "%d/%d" % (x.numerator, x.denominator)


def _parse_frac(s: str) -> Fraction:
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den or 1))


def _load_cache(path: str, meta: Dict, k: int) -> Dict[Tuple[int, int], Scalar]:
    entries: Dict[Tuple[int, int], Scalar] = {}
    if not os.path.exists(path):
        return entries
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CacheCorruptError(
                    "%s line %d: %s" % (path, lineno, exc)
                ) from None
            if "meta" in rec:
                if rec["meta"] != meta:
                    raise CacheCorruptError(
                        "%s line %d: metadata does not match this run" % (path, lineno)
                    )
                continue
            try:
                i, ip = int(rec["i"]), int(rec["ip"])
                mid = _parse_frac(rec["mid"])
                rad = _parse_frac(rec["rad"])
                prec = rec["prec"]
            except (KeyError, ValueError, TypeError) as exc:
                raise CacheCorruptError(
                    "%s line %d: malformed record (%s)" % (path, lineno, exc)
                ) from None
            if not (0 <= i < k and i <= ip < k) or rad < 0:
                raise CacheCorruptError(
                    "%s line %d: record out of range" % (path, lineno)
                )
            if prec is None:
                entries[(i, ip)] = mid
            else:
                entries[(i, ip)] = Interval.from_endpoints(
                    mid - rad, mid + rad, int(prec)
                )
    return entries


def _entry_record(i: int, ip: int, value: Scalar) -> Dict:
    if isinstance(value, Fraction):
        return {"i": i, "ip": ip, "mid": _frac_str(value), "rad": "0/1", "prec": None}
    return {
        "i": i,
        "ip": ip,
        "mid": _frac_str(value.mid_fraction),
        "rad": _frac_str(value.rad_fraction),
        "prec": value.prec,
    }


def assemble_gram(
    n: int,
    m: int,
    basis: InvariantBasis,
    params: Optional[TruncationParams] = None,
    cache_dir: Optional[str] = None,
    jobs: int = 1,
) -> GramSystem:
    """Build the full Gram system for a basis, reusing cached entries.

    Polynomial bases take no truncation parameters (the route is exact);
    shift bases require them.  Entries are computed for i <= i' and
    mirrored, so symmetry holds by construction.  Each finished entry is
    appended to the cache file immediately, which makes long assemblies
    resumable after interruption.
    """
    if basis.n != n or basis.m != m:
        raise ConfigError("basis was built for (n, m) = (%d, %d)" % (basis.n, basis.m))
    funcs = list(basis.functions)
    k = len(funcs)
    if basis.kind == "polynomial":
        if (n, m) != (3, 1):
            raise ConfigError("polynomial route is implemented for (3, 1) only")
        if params is not None:
            raise ConfigError("polynomial route is exact; no truncation parameters")
        meta = {"n": n, "m": m, "param": "poly", "d": basis.d, "exact": True}
        b = b_poly(n, basis)
    elif basis.kind == "shift":
        if params is None:
            raise ConfigError("shift route requires truncation parameters")
        meta = {"n": n, "m": m, "param": "shift", "d": basis.d, "exact": False}
        meta.update(params.meta())
        b = b_shift(n, m, basis)
    else:
        raise ConfigError("unknown basis kind %r" % basis.kind)

    cached: Dict[Tuple[int, int], Scalar] = {}
    fh = None
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        path = _cache_path(cache_dir, meta)
        cached = _load_cache(path, meta, k)
        fresh = not os.path.exists(path)
        fh = open(path, "a", encoding="utf-8")
        if fresh:
            fh.write(json.dumps({"meta": meta}, sort_keys=True) + "\n")
            fh.flush()

    def _store(batch, results):
        for (i, ip), value in zip(batch, results):
            cached[(i, ip)] = value
            if fh is not None:
                fh.write(json.dumps(_entry_record(i, ip, value)) + "\n")
                fh.flush()

    try:
        pending = [(i, ip) for i in range(k) for ip in range(i, k)
                   if (i, ip) not in cached]
        if pending and basis.kind == "polynomial":
            tables = _hexint.pair_tables(basis.d)
            _store(pending, _run_entries(
                pending, lambda i, ip: nu3_poly(funcs[i], funcs[ip], tables), jobs
            ))
        elif pending:
            shared = _ShiftEvaluator(n, m, params)
            # Diagonal entries first: their magnitudes set the scale against
            # which off-diagonal tail tolerances are judged.
            diag = [(i, ip) for (i, ip) in pending if i == ip]
            _store(diag, _run_entries(
                diag, lambda i, ip: shared.entry(funcs[i], funcs[ip]), jobs
            ))
            diag_mids = [
                abs(cached[(i, i)].mid_fraction) for i in range(k) if (i, i) in cached
            ]
            hint = max(diag_mids) / shared.prefactor if diag_mids else None
            rest = [(i, ip) for (i, ip) in pending if i != ip]
            _store(rest, _run_entries(
                rest, lambda i, ip: shared.entry(funcs[i], funcs[ip], hint), jobs
            ))
    finally:
        if fh is not None:
            fh.close()

    A: List[List[Scalar]] = [[None] * k for _ in range(k)]
    for i in range(k):
        for ip in range(i, k):
            A[i][ip] = A[ip][i] = cached[(i, ip)]
    return GramSystem(A=A, b=b, meta=meta)


def _run_entries(pending, compute, jobs: int):
    """Evaluate entry tasks, optionally on a thread pool.  Results are
    collected in task order either way, so output is deterministic."""
    if jobs <= 1 or len(pending) <= 1:
        return [compute(i, ip) for i, ip in pending]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(compute, i, ip) for i, ip in pending]
        return [f.result() for f in futures]
