"""Symmetry group of the hexagon family and invariant function bases.

The band-limited test functions in this package live on R^(n-1) and are
symmetrized under a finite matrix group `Gamma_n`.  The group is built from
the coordinate-permutation action of S_n on the hyperplane slice
{x in R^n : sum x_i = 0} (identified with R^(n-1) by dropping the last
coordinate) together with global negation, and then transposed: elements of
`Gamma_n` act on frequency-space shift vectors directly, while their
transposes are the matrices that map the body H_{n-1} onto itself.  Both
facts are verified exactly during construction, not trusted.

Two invariant bases feed the bound pipeline:

  * `invariant_poly_basis`: polynomials p with p(transpose(g) x) = p(x) for
    every group element g, obtained by Reynolds averaging of monomials and
    exact rank reduction per homogeneous degree;
  * `invariant_shift_basis`: orbits of integer lattice shifts under the
    group action, one basis function (orbit sum) per orbit.

Irreducible representations of the order-12 group (n = 3) are provided for
validating the vanishing lemma: symmetry-adapted functions built from any
nontrivial irreducible representation vanish at the origin.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .arith import MultiPoly, int_matrix_inverse, mat_transpose
from .polytopes import hpolytope_vertices

__all__ = [
    "Group",
    "GroupElement",
    "InvariantBasis",
    "Representation",
    "build_gamma",
    "gamma3_irreps",
    "invariant_poly_basis",
    "invariant_shift_basis",
    "projection_operator",
]

IntMatrix = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class GroupElement:
    """An integer matrix acting on frequency-space shift vectors."""

    matrix: IntMatrix

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def apply(self, vec: Sequence[int]) -> Tuple[int, ...]:
        return tuple(
            sum(row[j] * vec[j] for j in range(len(vec))) for row in self.matrix
        )


def _mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    k = len(a)
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(k))
        for i in range(k)
    )


def _identity(k: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(k)) for i in range(k))


def _neg(m: IntMatrix) -> IntMatrix:
    return tuple(tuple(-x for x in row) for row in m)


def _int_inverse(m: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular integer matrix, as an integer matrix."""
    inv = int_matrix_inverse(m)
    out = []
    for row in inv:
        cells = []
        for x in row:
            f = Fraction(x)
            if f.denominator != 1:
                raise RuntimeError("matrix is not unimodular")
            cells.append(int(f))
        out.append(tuple(cells))
    return tuple(out)


def _det(m: IntMatrix) -> int:
    k = len(m)
    tot = 0
    for perm in itertools.permutations(range(k)):
        sign = 1
        seen = [False] * k
        # parity by cycle counting
        for i in range(k):
            if seen[i]:
                continue
            j, clen = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                clen += 1
            if clen % 2 == 0:
                sign = -sign
        term = sign
        for i in range(k):
            term *= m[i][perm[i]]
        tot += term
    return tot


class Group:
    """A finite matrix group with exact inverses and verified closure."""

    def __init__(self, elements: Sequence[GroupElement],
                 generators: Sequence[GroupElement]):
        self.elements: Tuple[GroupElement, ...] = tuple(
            sorted(elements, key=lambda e: e.matrix)
        )
        self.generators: Tuple[GroupElement, ...] = tuple(generators)
        index = {e.matrix: e for e in self.elements}
        if len(index) != len(self.elements):
            raise RuntimeError("duplicate group elements")
        self._index = index
        k = self.elements[0].dim
        self.identity = index[_identity(k)]
        inv: Dict[GroupElement, GroupElement] = {}
        for e in self.elements:
            m = _int_inverse(e.matrix)
            if m not in index:
                raise RuntimeError("group element has no inverse in the set")
            inv[e] = index[m]
        self._inv = inv
        for a in self.elements:
            for b in self.elements:
                if _mat_mul(a.matrix, b.matrix) not in index:
                    raise RuntimeError("element set is not closed under product")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, e) -> bool:
        m = e.matrix if isinstance(e, GroupElement) else tuple(map(tuple, e))
        return m in self._index

    def inverse(self, e: GroupElement) -> GroupElement:
        return self._inv[e]

    def matrices(self) -> Tuple[IntMatrix, ...]:
        return tuple(e.matrix for e in self.elements)

    def transposed_matrices(self) -> Tuple[IntMatrix, ...]:
        """Matrices of the spatial action, i.e. the symmetries of H_{n-1}."""
        return tuple(mat_transpose(e.matrix) for e in self.elements)

    def element_order(self, e: GroupElement) -> int:
        k, acc = 1, e.matrix
        ident = self.identity.matrix
        while acc != ident:
            acc = _mat_mul(acc, e.matrix)
            k += 1
            if k > len(self):
                raise RuntimeError("element order exceeds group order")
        return k


def _slice_permutation_matrix(perm: Tuple[int, ...], n: int) -> IntMatrix:
    """Action of a permutation of S_n on the slice {sum x_i = 0} in the
    first n-1 coordinates: coordinate i receives x_{perm^-1(i)}, where the
    dropped coordinate x_{n-1} stands for -(x_0 + ... + x_{n-2})."""
    inv = [0] * n
    for i, p in enumerate(perm):
        inv[p] = i
    rows = []
    for i in range(n - 1):
        src = inv[i]
        if src < n - 1:
            rows.append(tuple(int(j == src) for j in range(n - 1)))
        else:
            rows.append(tuple(-1 for _ in range(n - 1)))
    return tuple(rows)


_CLOSURE_CAP_FACTOR = 4  # generated set may not exceed 4 * 2 * n!


def build_gamma(n: int) -> Group:
    """The frequency-space symmetry group for the weight of rank n.

    Candidates are the transposes of +-T_perm where T_perm is the
    coordinate-permutation action on the zero-sum slice; every candidate's
    transpose is checked to permute the vertex set of H_{n-1} exactly, the
    set is checked to be closed, and the three natural generators are
    checked to generate everything (with a safety cap, so a wrong generator
    list fails loudly instead of looping).

    Validated sizes: 2 * n! with n = 3 giving 12 and n = 4 giving 48.
    n = 2 (the group {+1, -1} on one coordinate) is supported for the
    degenerate interval body.
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError("need integer n >= 2")

    candidates = set()
    for perm in itertools.permutations(range(n)):
        t = _slice_permutation_matrix(perm, n)
        candidates.add(mat_transpose(t))
        candidates.add(_neg(mat_transpose(t)))

    verts = set(hpolytope_vertices(n))
    for m in candidates:
        spatial = mat_transpose(m)
        image = {
            tuple(
                sum(Fraction(spatial[i][j]) * v[j] for j in range(n - 1))
                for i in range(n - 1)
            )
            for v in verts
        }
        if image != verts:
            raise RuntimeError(
                "candidate symmetry does not permute the vertex set; the "
                "slice action was transcribed wrong"
            )

    # generators: negation, a transposition, an n-cycle
    swap = tuple([1, 0] + list(range(2, n)))
    cycle = tuple(list(range(1, n)) + [0])
    gen_mats = [
        _neg(_identity(n - 1)),
        mat_transpose(_slice_permutation_matrix(swap, n)),
        mat_transpose(_slice_permutation_matrix(cycle, n)),
    ]
    cap = _CLOSURE_CAP_FACTOR * 2 * factorial(n)
    reached = {_identity(n - 1)}
    frontier = list(reached)
    while frontier:
        nxt = []
        for m in frontier:
            for g in gen_mats:
                prod = _mat_mul(m, g)
                if prod not in reached:
                    reached.add(prod)
                    nxt.append(prod)
                    if len(reached) > cap:
                        raise RuntimeError(
                            "group closure exceeded the safety cap; "
                            "generators are wrong"
                        )
        frontier = nxt
    if reached != candidates:
        raise RuntimeError("generated group differs from the candidate set")

    elements = [GroupElement(m) for m in candidates]
    by_matrix = {e.matrix: e for e in elements}
    generators = [by_matrix[m] for m in gen_mats]
    return Group(elements, generators)


# ---------------------------------------------------------------------------
# invariant bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantBasis:
    """A linearly independent family of group-invariant basis functions.

    kind 'polynomial': `functions` are MultiPoly objects p with
    p(transpose(g) x) = p(x) for all group elements g.  kind 'shift':
    `functions` are orbits, each a sorted tuple of integer shift vectors
    (already scaled by m); the basis function is the sum of the band-limited
    bumps centered at the orbit members.
    """

    kind: str
    functions: Tuple
    n: int
    d: int
    m: int = 1

    def __len__(self) -> int:
        return len(self.functions)


def invariant_poly_basis(n: int, d: int) -> InvariantBasis:
    """Invariant polynomials of total degree <= d, as an exact basis.

    Implemented for n = 3 (two variables, the hexagon group).  Averaging a
    monomial over the spatial action kills odd degrees (negation is in the
    group) and preserves homogeneous degree, so the rank reduction runs per
    degree with exact rational elimination.
    """
    if n != 3:
        raise ValueError("polynomial basis is implemented for n = 3 only")
    if d < 0:
        raise ValueError("degree bound must be nonnegative")
    group = build_gamma(n)
    spatial = group.transposed_matrices()
    nv = n - 1

    basis: List[MultiPoly] = []
    for deg in range(0, d + 1, 2):
        monos = [
            alpha
            for alpha in itertools.product(range(deg + 1), repeat=nv)
            if sum(alpha) == deg
        ]
        averaged = []
        for alpha in monos:
            p = MultiPoly.monomial(alpha)
            q = _reynolds_spatial(p, spatial)
            if not q.is_zero():
                averaged.append(q)
        basis.extend(_independent_rows(averaged, monos, nv))
    return InvariantBasis(kind="polynomial", functions=tuple(basis), n=n, d=d)


def _reynolds_spatial(p: MultiPoly, spatial_mats) -> MultiPoly:
    acc = MultiPoly.zero(p.nvars)
    for m in spatial_mats:
        acc = acc + p.compose_linear(m)
    return acc * Fraction(1, len(spatial_mats))


def _independent_rows(polys: Sequence[MultiPoly], monos, nv) -> List[MultiPoly]:
    """Exact row reduction of polynomials over a fixed monomial frame."""
    if not polys:
        return []
    frame = {alpha: j for j, alpha in enumerate(sorted(monos, reverse=True))}
    rows = []
    for p in polys:
        row = [Fraction(0)] * len(frame)
        for alpha, c in p.terms.items():
            row[frame[alpha]] = c
        rows.append(row)
    out: List[MultiPoly] = []
    pivots: List[int] = []
    for row in rows:
        row = list(row)
        for prow, pcol in zip(out, pivots):
            if row[pcol]:
                f = row[pcol]
                row = [a - f * b for a, b in zip(row, prow)]
        lead = next((j for j, a in enumerate(row) if a), None)
        if lead is None:
            continue
        row = [a / row[lead] for a in row]
        out.append(row)
        pivots.append(lead)
    inv_frame = {j: alpha for alpha, j in frame.items()}
    result = []
    for row in out:
        terms = {inv_frame[j]: c for j, c in enumerate(row) if c}
        result.append(MultiPoly(nv, terms))
    return result


def invariant_shift_basis(n: int, m: int, d: int) -> InvariantBasis:
    """Orbit basis of lattice shifts m * lambda with |lambda|_1 <= d.

    One basis function per group orbit.  Orbits are closed under the full
    action, so members may leave the L1 ball; the ball only selects which
    orbits participate.  Ordering is deterministic: orbits sorted by their
    minimal member under (L1 norm, lexicographic), members sorted
    lexicographically.
    """
    if m < 1:
        raise ValueError("shift spacing m must be >= 1")
    if d < 0:
        raise ValueError("L1 radius d must be nonnegative")
    group = build_gamma(n)
    nv = n - 1

    def ball_points():
        rng = range(-d, d + 1)
        for vec in itertools.product(rng, repeat=nv):
            if sum(abs(c) for c in vec) <= d:
                yield vec

    seen = set()
    orbits = []
    for start in ball_points():
        if start in seen:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for v in frontier:
                for e in group:
                    w = e.apply(v)
                    if w not in orbit:
                        orbit.add(w)
                        nxt.append(w)
            frontier = nxt
        seen |= orbit
        orbits.append(tuple(sorted(orbit)))

    def orbit_key(orb):
        return min((sum(abs(c) for c in v), v) for v in orb)

    orbits.sort(key=orbit_key)
    scaled = tuple(
        tuple(tuple(m * c for c in v) for v in orb) for orb in orbits
    )
    return InvariantBasis(kind="shift", functions=scaled, n=n, d=d, m=m)


# ---------------------------------------------------------------------------
# representations and projections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Representation:
    """An explicit matrix representation of a finite group."""

    name: str
    dim: int
    mapping: Tuple[Tuple[GroupElement, Tuple[Tuple[Fraction, ...], ...]], ...]

    def __call__(self, e: GroupElement):
        for el, mat in self.mapping:
            if el == e:
                return mat
        raise KeyError(e)

    @property
    def is_trivial(self) -> bool:
        one = ((Fraction(1),),)
        return self.dim == 1 and all(mat == one for _, mat in self.mapping)


def _decompose_sign(e: GroupElement) -> int:
    """The global-negation sign: e = sign * transpose(T_perm)."""
    for sign in (1, -1):
        t = mat_transpose(tuple(tuple(sign * x for x in row) for row in e.matrix))
        k = len(t)
        used, ok, wild = set(), True, 0
        for row in t:
            if all(x == -1 for x in row):
                wild += 1
            elif sum(abs(x) for x in row) == 1 and 1 in row:
                j = row.index(1)
                if j in used:
                    ok = False
                    break
                used.add(j)
            else:
                ok = False
                break
        if ok and wild <= 1:
            return sign
    raise ValueError("element is not of the expected +-T_perm^T shape")


def gamma3_irreps(group: Group) -> Dict[str, Representation]:
    """The six irreducible representations of the order-12 hexagon group.

    All are rational: four one-dimensional characters (trivial, determinant,
    global-negation sign, their product) and two two-dimensional
    representations (the defining matrices and their determinant twist).
    Dimensions satisfy 4 * 1 + 2 * 4 = 12, so the list is complete.
    """
    if len(group) != 12:
        raise ValueError("expected the order-12 group from build_gamma(3)")

    def onedim(name, fn):
        mapping = tuple(
            (e, ((Fraction(fn(e)),),)) for e in group.elements
        )
        return Representation(name, 1, mapping)

    def twodim(name, fn):
        mapping = tuple(
            (e, tuple(tuple(Fraction(x) for x in row) for row in fn(e)))
            for e in group.elements
        )
        return Representation(name, 2, mapping)

    reps = {
        "trivial": onedim("trivial", lambda e: 1),
        "det": onedim("det", lambda e: _det(e.matrix)),
        "center": onedim("center", _decompose_sign),
        "det_center": onedim(
            "det_center", lambda e: _det(e.matrix) * _decompose_sign(e)
        ),
        "vector": twodim("vector", lambda e: e.matrix),
        "vector_det": twodim(
            "vector_det",
            lambda e: tuple(
                tuple(_det(e.matrix) * x for x in row) for row in e.matrix
            ),
        ),
    }
    return reps


class _ProjectionOperator:
    """(d/|G|) sum_g rep(g^-1)[j][jp] L(g) with (L(g) f)(x) = f(g^-1 x).

    Acts on three function encodings: MultiPoly (exact composition), formal
    shift sums as dicts {shift vector: coefficient} (using L(g) g_mu =
    g_{g mu}), and plain callables on coordinate tuples.
    """

    def __init__(self, group: Group, rep: Representation, j: int, jp: int):
        self.group = group
        self.rep = rep
        self.j = j
        self.jp = jp
        weights = []
        for e in group:
            c = Fraction(rep.dim, len(group)) * rep(group.inverse(e))[j][jp]
            if c:
                weights.append((e, c))
        self.weights = tuple(weights)

    def __call__(self, f):
        if isinstance(f, MultiPoly):
            acc = MultiPoly.zero(f.nvars)
            for e, c in self.weights:
                acc = acc + f.compose_linear(_int_inverse(e.matrix)) * c
            return acc
        if isinstance(f, dict):
            out: Dict[Tuple[int, ...], Fraction] = {}
            for e, c in self.weights:
                for mu, q in f.items():
                    key = e.apply(mu)
                    val = out.get(key, Fraction(0)) + c * q
                    if val:
                        out[key] = val
                    else:
                        out.pop(key, None)
            return out
        if callable(f):
            weights = self.weights

            def projected(x):
                acc = None
                for e, c in weights:
                    ginv = _int_inverse(e.matrix)
                    y = tuple(
                        sum(ginv[i][k] * x[k] for k in range(len(x)))
                        for i in range(len(x))
                    )
                    term = c * f(y)
                    acc = term if acc is None else acc + term
                return acc

            return projected
        raise TypeError("cannot project objects of type %r" % type(f))


def projection_operator(group: Group, rep: Representation,
                        j: int = 0, jp: int = 0) -> _ProjectionOperator:
    """Symmetry-adapted projection; the trivial representation gives the
    Reynolds (group averaging) operator."""
    if not (0 <= j < rep.dim and 0 <= jp < rep.dim):
        raise ValueError("matrix-entry indices out of range for the rep")
    return _ProjectionOperator(group, rep, j, jp)
