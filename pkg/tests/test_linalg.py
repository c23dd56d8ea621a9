import pytest
from hypothesis import given, settings, strategies as st

from loopss.groups import FGAbelianGroup
from loopss.linalg import (
    ChainConditionError,
    IntMatrix,
    NotInLatticeError,
    Subquotient,
    homology_of_pair,
    kernel_basis,
    smith_normal_form,
)

from oracles import det, invariant_factors_by_minors, minor_gcds


def M(rows, cols=None):
    return IntMatrix.from_rows(rows, cols)


def check_snf(A):
    res = smith_normal_form(A)
    assert res.U @ A @ res.V == res.D
    assert abs(det(res.U.to_rows())) == 1
    assert abs(det(res.V.to_rows())) == 1
    assert res.U @ res.U_inv == IntMatrix.identity(A.rows)
    assert res.V @ res.V_inv == IntMatrix.identity(A.cols)
    for i in range(res.D.rows):
        for j in range(res.D.cols):
            if i != j:
                assert res.D[i, j] == 0
    diag = res.diagonal
    assert all(x >= 0 for x in diag)
    nz = [x for x in diag if x]
    assert diag[:len(nz)] == nz
    for a, b in zip(nz, nz[1:]):
        assert b % a == 0
    return res


@pytest.mark.parametrize("rows, expected", [
    ([[2, 0], [0, 3]], [1, 6]),            # g1 = 1, g2 = 6
    ([[2, 4], [6, 8]], [2, 4]),            # g1 = 2, g2 = |det| = 8
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 1, 1]),
])
def test_snf_examples(rows, expected):
    assert invariant_factors_by_minors(rows) == expected
    res = check_snf(M(rows))
    assert res.invariant_factors == expected


def test_snf_identity_has_identity_transforms():
    res = smith_normal_form(IntMatrix.identity(3))
    assert res.U == res.V == res.D == IntMatrix.identity(3)


def test_snf_zero_size():
    for shape in [(0, 0), (0, 3), (2, 0)]:
        res = check_snf(IntMatrix.zeros(*shape))
        assert res.rank == 0


def test_snf_is_deterministic():
    A = M([[4, 6, 10], [6, 9, 15], [2, 3, 5]])
    assert smith_normal_form(A) == smith_normal_form(A)


def test_snf_large_entries_stay_exact():
    A = M([[10**30 + 1, 10**30], [10**30, 10**30 - 1]])
    res = check_snf(A)
    assert res.invariant_factors == [1, 1]   # det = -1


matrices = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_properties(rows):
    check_snf(M(rows))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n),
                           min_size=m, max_size=m))))
def test_snf_matches_gcd_of_minors(rows):
    res = smith_normal_form(M(rows))
    gs = minor_gcds(rows)
    running = 1
    for k, d in enumerate(res.invariant_factors):
        running *= d
        assert gs[k] == running
    assert all(g == 0 for g in gs[res.rank:])


def test_kernel_examples():
    assert kernel_basis(M([[2]])) == []
    ker = kernel_basis(IntMatrix.zeros(1, 3))
    assert len(ker) == 3
    assert Subquotient(3, ker).group == FGAbelianGroup(3)  # spans Z^3
    (v,) = kernel_basis(M([[1, 1]]))
    assert v in [(1, -1), (-1, 1)]


def test_kernel_spans_small_solutions():
    A = M([[1, 2, 3], [2, 4, 6]])
    ker = kernel_basis(A)
    assert len(ker) == 2
    lattice = Subquotient(3, ker)
    for x in range(-4, 5):
        for y in range(-4, 5):
            for z in range(-4, 5):
                v = (x, y, z)
                assert lattice.contains(v) == (not any(A.apply(v)))


def test_homology_trivial_pair():
    g, cmap = homology_of_pair(IntMatrix.zeros(3, 0), IntMatrix.zeros(0, 3))
    assert g == FGAbelianGroup(3)
    assert cmap == IntMatrix.identity(3)


def test_homology_times_two_gives_z2():
    g, cmap = homology_of_pair(M([[2]]), IntMatrix.zeros(0, 1))
    assert g == FGAbelianGroup(0, (2,))
    assert cmap.apply((1,)) == (1,)


def test_homology_times_three_gives_z3():
    g, _ = homology_of_pair(M([[3]]), IntMatrix.zeros(0, 1))
    assert g == FGAbelianGroup(0, (3,))


def test_homology_injective_out_is_trivial():
    g, cmap = homology_of_pair(IntMatrix.zeros(1, 0), M([[2]]))
    assert g.is_zero()
    assert cmap.shape == (0, 1)


def test_homology_rejects_non_complex():
    with pytest.raises(ChainConditionError):
        homology_of_pair(M([[1]]), M([[1]]))
    with pytest.raises(ValueError):
        homology_of_pair(M([[1, 0]]), M([[1, 0]]))


def test_homology_class_map_on_mixed_group():
    # C: Z --(2,0,0)--> Z^3 --(0,0,1)--> Z ; H = Z/2 + Z
    d_in = M([[2], [0], [0]])
    d_out = M([[0, 0, 1]])
    g, cmap = homology_of_pair(d_in, d_out)
    assert g == FGAbelianGroup(1, (2,))
    assert cmap.rows == 2
    # the boundary goes to zero, e1 to the torsion generator
    zero = cmap.apply((2, 0, 0))
    assert zero[0] == 0 and zero[1] % 2 == 0
    assert cmap.apply((1, 0, 0))[1] % 2 == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=9, max_size=9),
       st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_homology_invariant_under_change_of_basis(entries, ker_coeffs):
    # Build a complex on Z^3 whose d_in lands in ker(d_out), then conjugate by
    # a unimodular P: (P d_in, d_out P^-1) has the same homology.
    d_out = M([[1, 1, 0]])
    k1, k2 = (1, -1, 0), (0, 0, 1)
    cols = [tuple(a * x + b * y for x, y in zip(k1, k2))
            for a, b in zip(ker_coeffs, entries[:3])]
    d_in = IntMatrix.from_columns(cols, rows=3)
    base = homology_of_pair(d_in, d_out)[0]
    P = M([[1, entries[3] % 3, 0], [0, 1, entries[4] % 2], [0, 0, 1]])
    Pi = smith_normal_form(P)  # P is unimodular upper triangular
    Pinv = Pi.V @ Pi.U  # D = I so P^-1 = V U
    assert P @ Pinv == IntMatrix.identity(3)
    assert homology_of_pair(P @ d_in, d_out @ Pinv)[0] == base


def test_subquotient_non_saturated_cycles():
    # Z = 2Z inside Z, B = 6Z: Z/B = Z/3
    sq = Subquotient(1, [(2,)], [(6,)])
    assert sq.group == FGAbelianGroup(0, (3,))
    assert sq.class_map() is None
    assert sq.coords((4,)) in [(2,), (1,)]
    with pytest.raises(NotInLatticeError):
        sq.coords((1,))


def test_subquotient_prefers_monomial_representatives():
    sq = Subquotient(2, [(1, 0), (0, 1)], [(0, 2)])
    sq.prefer_representatives([(1, 0), (0, 1)])
    assert sorted(sq.reps) == [(0, 1), (1, 0)]
    assert sq.coords((0, 1)) == (0, 1)
    assert sq.coords((1, 0)) == (1, 0)
