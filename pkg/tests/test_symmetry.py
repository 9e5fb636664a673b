"""Group construction, invariant bases, representations, projections.

Basis-size references: the invariant polynomial ring for the hexagon group
is freely generated in degrees 2 and 6, so the number of invariants of
degree <= d is #{(a, b) : 2a + 6b <= d}; d = 10 gives 9 and d = 20 gives
26.  Orbit counts for small L1 balls were enumerated by hand: d = 1 has the
fixed point and one orbit of 6 neighbors, d = 2 adds the doubled orbit and
the orbit of (1, -1).
"""

import itertools
from fractions import Fraction as F

import pytest

from corrbound.arith import Interval, MultiPoly, poly_symmetrize
from corrbound.polytopes import ft_H, hpolytope_vertices
from corrbound.symmetry import (
    GroupElement,
    Representation,
    build_gamma,
    gamma3_irreps,
    invariant_poly_basis,
    invariant_shift_basis,
    projection_operator,
)


@pytest.fixture(scope="module")
def g3():
    return build_gamma(3)


@pytest.fixture(scope="module")
def g4():
    return build_gamma(4)


# ---------------------------------------------------------------------------
# group construction
# ---------------------------------------------------------------------------


def test_group_orders(g3, g4):
    assert len(build_gamma(2)) == 2
    assert len(g3) == 12
    assert len(g4) == 48


def test_contains_center_and_rotation(g3):
    dim = 2
    ident = tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim))
    neg = tuple(tuple(-x for x in row) for row in ident)
    assert ident in [e.matrix for e in g3]
    assert neg in [e.matrix for e in g3]
    assert max(g3.element_order(e) for e in g3) == 6


def test_spatial_matrices_contain_hexagon_rotation(g3):
    # the order-3 rotation used by the exact integration path
    assert ((-1, -1), (1, 0)) in g3.transposed_matrices()


def test_transposes_permute_vertices(g3, g4):
    for group, n in ((g3, 3), (g4, 4)):
        verts = set(hpolytope_vertices(n))
        for m in group.transposed_matrices():
            image = {
                tuple(sum(F(m[i][j]) * v[j] for j in range(n - 1))
                      for i in range(n - 1))
                for v in verts
            }
            assert image == verts


def test_group_inverses_and_membership(g3):
    for e in g3:
        assert g3.inverse(e) in g3
        assert g3.inverse(g3.inverse(e)) == e
    assert g3.identity in g3


def test_build_gamma_rejects_bad_n():
    with pytest.raises(ValueError):
        build_gamma(1)
    with pytest.raises(ValueError):
        build_gamma(0)


# ---------------------------------------------------------------------------
# invariant polynomial basis
# ---------------------------------------------------------------------------


def test_poly_basis_small_degrees():
    assert len(invariant_poly_basis(3, 0)) == 1
    assert invariant_poly_basis(3, 0).functions[0] == MultiPoly.const(F(1), 2)
    # negation kills degree 1
    assert len(invariant_poly_basis(3, 1)) == 1
    basis2 = invariant_poly_basis(3, 2)
    assert len(basis2) == 2
    q = MultiPoly(2, {(2, 0): F(1), (1, 1): F(1), (0, 2): F(1)})
    assert basis2.functions[1] == q


def test_poly_basis_counts():
    assert len(invariant_poly_basis(3, 10)) == 9
    assert len(invariant_poly_basis(3, 20)) == 26


def test_poly_basis_invariance_and_idempotence(g3):
    basis = invariant_poly_basis(3, 6)
    spatial = g3.transposed_matrices()
    for p in basis.functions:
        for m in spatial:
            assert p.compose_linear(m) == p
        assert poly_symmetrize(p, spatial) == p


def test_odd_monomials_average_to_zero(g3):
    spatial = g3.transposed_matrices()
    assert poly_symmetrize(MultiPoly.monomial((1, 0)), spatial).is_zero()
    assert poly_symmetrize(MultiPoly.monomial((2, 1)), spatial).is_zero()


def test_poly_basis_rejects_other_n():
    with pytest.raises(ValueError):
        invariant_poly_basis(4, 2)


# ---------------------------------------------------------------------------
# invariant shift basis
# ---------------------------------------------------------------------------


def test_shift_orbit_counts():
    assert len(invariant_shift_basis(3, 1, 0)) == 1
    assert len(invariant_shift_basis(3, 1, 1)) == 2
    assert len(invariant_shift_basis(3, 1, 2)) == 4
    assert len(invariant_shift_basis(4, 1, 1)) == 2


def test_shift_orbit_structure(g3):
    basis = invariant_shift_basis(3, 1, 2)
    assert basis.functions[0] == ((0, 0),)
    for orbit in basis.functions:
        members = set(orbit)
        for e in g3:
            assert {e.apply(v) for v in members} == members
        assert tuple(sorted(members)) == orbit
    # orbits partition: no vector in two orbits
    all_members = list(itertools.chain.from_iterable(basis.functions))
    assert len(all_members) == len(set(all_members))


def test_shift_orbit_representative_independence(g3):
    # the orbit through gamma * lambda is the orbit through lambda
    basis = invariant_shift_basis(3, 1, 1)
    orbit = basis.functions[1]
    for e in g3:
        seed = e.apply(orbit[0])
        assert seed in orbit


def test_shift_basis_m_scaling():
    b1 = invariant_shift_basis(3, 1, 1)
    b2 = invariant_shift_basis(3, 2, 1)
    for o1, o2 in zip(b1.functions, b2.functions):
        assert tuple(tuple(2 * c for c in v) for v in o1) == o2


def test_shift_basis_validation():
    with pytest.raises(ValueError):
        invariant_shift_basis(3, 0, 1)
    with pytest.raises(ValueError):
        invariant_shift_basis(3, 1, -1)


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------


def test_irrep_dimensions_complete(g3):
    reps = gamma3_irreps(g3)
    dims = sorted(r.dim for r in reps.values())
    assert dims == [1, 1, 1, 1, 2, 2]
    assert sum(d * d for d in dims) == len(g3)


def test_irreps_are_homomorphisms(g3):
    reps = gamma3_irreps(g3)
    by_matrix = {e.matrix: e for e in g3}

    def matmul(a, b):
        k = len(a)
        return tuple(
            tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(k))
            for i in range(k)
        )

    for rep in reps.values():
        for e1 in g3:
            for e2 in g3:
                prod = by_matrix[matmul(e1.matrix, e2.matrix)]
                assert rep(prod) == matmul(rep(e1), rep(e2))


def test_nontrivial_irreps_sum_to_zero(g3):
    # the coefficient identity behind the vanishing lemma
    reps = gamma3_irreps(g3)
    for name, rep in reps.items():
        total = [[F(0)] * rep.dim for _ in range(rep.dim)]
        for e in g3:
            m = rep(e)
            for i in range(rep.dim):
                for j in range(rep.dim):
                    total[i][j] += m[i][j]
        if name == "trivial":
            assert total[0][0] == len(g3)
        else:
            assert all(all(x == 0 for x in row) for row in total)


def test_one_dim_characters_distinct(g3):
    reps = gamma3_irreps(g3)
    neg = next(e for e in g3 if e.matrix == ((-1, 0), (0, -1)))
    assert reps["det"](neg)[0][0] == 1
    assert reps["center"](neg)[0][0] == -1
    onedim = [r for r in reps.values() if r.dim == 1]
    sigs = {tuple(r(e)[0][0] for e in g3) for r in onedim}
    assert len(sigs) == 4


# ---------------------------------------------------------------------------
# projection operators
# ---------------------------------------------------------------------------


def test_trivial_projection_is_group_average(g3):
    proj = projection_operator(g3, gamma3_irreps(g3)["trivial"])
    p = MultiPoly.monomial((2, 0))
    avg = proj(p)
    assert poly_symmetrize(p, g3.matrices()) == avg
    assert proj(avg) == avg  # idempotent


def test_projection_idempotence_two_dim(g3):
    rep = gamma3_irreps(g3)["vector"]
    p11 = projection_operator(g3, rep, 0, 0)
    for p in (MultiPoly.monomial((2, 0)), MultiPoly.monomial((3, 1)),
              MultiPoly.affine(F(5), [F(1), F(-2)])):
        assert p11(p11(p)) == p11(p)


def test_nontrivial_projection_kills_constant_term(g3):
    # polynomial encoding: the projected function must vanish at 0
    reps = gamma3_irreps(g3)
    p = MultiPoly.affine(F(7), [F(1), F(3)]) * MultiPoly.affine(
        F(1), [F(2), F(-1)])
    for name in ("det", "center", "vector", "vector_det"):
        rep = reps[name]
        for j in range(rep.dim):
            out = projection_operator(g3, rep, j, 0)(p)
            assert out.evaluate((F(0), F(0))) == 0


def test_vanishing_lemma_on_shift_space(g3):
    # formal shift sums: project a single bump, then evaluate the orbit
    # combination at the origin through the actual transform values
    reps = gamma3_irreps(g3)
    f0 = {(1, 0): F(1)}
    for name in ("det", "center", "vector"):
        rep = reps[name]
        p11 = projection_operator(g3, rep, 0, 0)
        for j in range(rep.dim):
            pj1 = projection_operator(g3, rep, j, 0)
            combo = pj1(p11(f0))
            total = Interval.zero(128)
            for mu, c in combo.items():
                val = ft_H(3, (-mu[0], -mu[1]), prec=128)
                total = total + c * val
            assert total.contains_zero()
            assert total.radius < 1e-30


def test_trivial_projection_fixes_shift_orbit_sums(g3):
    rep = gamma3_irreps(g3)["trivial"]
    proj = projection_operator(g3, rep)
    basis = invariant_shift_basis(3, 1, 1)
    orbit = basis.functions[1]
    f = {mu: F(1) for mu in orbit}
    assert proj(f) == f


def test_projection_on_callables(g3):
    rep = gamma3_irreps(g3)["trivial"]
    proj = projection_operator(g3, rep)

    def f(x):
        return (x[0] + 2 * x[1] + 3) ** 2

    pf = proj(f)
    x = (F(1, 3), F(-1, 5))
    # averaged function is invariant under the group action
    e = g3.elements[5]
    y = e.apply((0, 0))  # identity only on integer vecs; use matrix directly
    gx = tuple(
        sum(F(e.matrix[i][j]) * x[j] for j in range(2)) for i in range(2)
    )
    assert pf(gx) == pf(x)


def test_projection_index_validation(g3):
    rep = gamma3_irreps(g3)["vector"]
    with pytest.raises(ValueError):
        projection_operator(g3, rep, 2, 0)
