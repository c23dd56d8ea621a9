import pytest
from hypothesis import given, settings, strategies as st

from loopss.algebra import (
    AlgebraPresentation,
    EXTERIOR,
    GeneratorDecl,
    POLYNOMIAL,
    LAURENT,
    Relation,
    bidegree_of,
    enumerate_basis,
    monomial_mul,
    normal_form_reduce,
    poly_mul,
    validate_presentation,
)
from loopss.groups import FGAbelianGroup
from loopss.models import cpn_model, sphere_model

from oracles import brute_force_basis


# -- groups ------------------------------------------------------------------

@pytest.mark.parametrize("orders, rank, torsion", [
    ([2, 3], 0, (6,)),
    ([4, 2], 0, (2, 4)),
    ([0, 6, 10, 1], 1, (2, 30)),
    ([], 0, ()),
    ([1, 1], 0, ()),
])
def test_group_from_orders(orders, rank, torsion):
    assert FGAbelianGroup.from_orders(orders) == FGAbelianGroup(rank, torsion)


def test_group_rejects_noncanonical():
    with pytest.raises(ValueError):
        FGAbelianGroup(0, (3, 2))
    with pytest.raises(ValueError):
        FGAbelianGroup(0, (1,))


def test_group_direct_sum_and_str():
    g = FGAbelianGroup(1) + FGAbelianGroup(0, (3,))
    assert g == FGAbelianGroup(1, (3,))
    assert str(g) == "Z + Z/3"
    assert g.torsion_order == 3
    assert str(FGAbelianGroup()) == "0"


# -- monomial arithmetic -----------------------------------------------------

CP2 = cpn_model(2).presentation          # c, y, u
S2 = sphere_model(2).presentation        # a, u (u odd)
S3 = sphere_model(3).presentation        # a odd, u even


def test_exterior_square_vanishes():
    y = CP2.monomial(y=1)
    assert monomial_mul(y, y, CP2) is None


def test_koszul_sign_for_odd_generators():
    p = AlgebraPresentation((GeneratorDecl("g", 0, 1, EXTERIOR),
                             GeneratorDecl("h", 0, 3, EXTERIOR)))
    g, h = p.monomial(g=1), p.monomial(h=1)
    assert monomial_mul(h, g, p) == (-1, p.monomial(g=1, h=1))
    assert monomial_mul(g, h, p) == (1, p.monomial(g=1, h=1))


def test_truncation_kills_top_power():
    c2, c = CP2.monomial(c=2), CP2.monomial(c=1)
    assert monomial_mul(c2, c, CP2) is None


def test_base_square_vanishes_on_spheres():
    a = S2.monomial(a=1)
    assert monomial_mul(a, a, S2) is None
    assert monomial_mul(S3.monomial(a=1), S3.monomial(a=1), S3) is None


def test_normal_form_reduce_examples():
    even = AlgebraPresentation(
        (GeneratorDecl("b", -2, 1, EXTERIOR), GeneratorDecl("a", -2, 0, POLYNOMIAL),
         GeneratorDecl("v", 0, 2, POLYNOMIAL)),
        (Relation(0, (0, 2, 0)), Relation(0, (1, 1, 0)), Relation(2, (0, 1, 1))),
    )
    assert normal_form_reduce(2, even.monomial(a=1, v=1), even) is None
    torsion = AlgebraPresentation(CP2.generators, CP2.relations + (Relation(3, (2, 0, 1)),))
    c2u = torsion.monomial(c=2, u=1)
    assert normal_form_reduce(4, c2u, torsion) == (1, c2u)
    u3 = torsion.monomial(u=3)
    assert normal_form_reduce(5, u3, torsion) == (5, u3)


def test_bidegree_examples():
    assert bidegree_of(S2.unit, S2) == (0, 0)
    for n in (2, 4, 6):
        p = sphere_model(n).presentation
        m = p.monomial(a=1, u=2)
        assert bidegree_of(m, p) == (-n, 2 * n - 2)
        assert sum(bidegree_of(m, p)) == n - 2
    yc = CP2.monomial(c=1, y=1)
    assert bidegree_of(yc, CP2) == (-2, 1)
    assert sum(bidegree_of(yc, CP2)) == -1


def test_enumerate_basis_examples():
    assert enumerate_basis(S3, 0, 4) == [S3.monomial(u=2)]
    for p in (S2, S3, CP2):
        assert enumerate_basis(p, 0, 0) == [p.unit]
    assert enumerate_basis(CP2, -2, 1) == [CP2.monomial(c=1, y=1)]


@pytest.mark.parametrize("model", [sphere_model(2), sphere_model(3), cpn_model(2), cpn_model(3)])
def test_enumerate_basis_matches_brute_force(model):
    p, d = model.presentation, model.dimension
    for s in range(-d, 1):
        for t in range(0, 14):
            got = enumerate_basis(p, s, t)
            assert got == brute_force_basis(p, s, t, max_exp=14)
            assert len(set(got)) == len(got)
            assert all(bidegree_of(m, p) == (s, t) for m in got)


def test_enumerate_basis_rejects_laurent():
    p = AlgebraPresentation((GeneratorDecl("t", 0, 0, LAURENT),))
    with pytest.raises(ValueError):
        enumerate_basis(p, 0, 0)


def test_validate_reports_indices():
    p = AlgebraPresentation(
        (GeneratorDecl("x", 0, 2, EXTERIOR), GeneratorDecl("x", 1, 0, POLYNOMIAL),
         GeneratorDecl("t", 0, 1, LAURENT)),
        (Relation(1, (0, 1, 0)),),
    )
    problems = validate_presentation(p, dimension=2)
    text = "\n".join(problems)
    assert "generator 0 (x): exterior generator of even total degree" in text
    assert "generator 1 (x): duplicate of generator 0" in text
    assert "generator 1 (x): column 1 is positive" in text
    assert "generator 2 (t): laurent generator must have total degree 0" in text
    assert "relation 0: coefficient 1" in text


def test_validate_accepts_builtin_models():
    for m in (sphere_model(2), sphere_model(5), cpn_model(1), cpn_model(3)):
        assert validate_presentation(m.presentation, m.dimension) == []


# -- properties ---------------------------------------------------------------

def monomials(p, max_exp=4):
    parts = [st.integers(0, 1) if g.kind == EXTERIOR else st.integers(0, max_exp)
             for g in p.generators]
    return st.tuples(*parts)


def shared_odd_polynomial(m1, m2, p):
    return sum(a * b for a, b, g in zip(m1, m2, p.generators)
               if g.is_odd and g.kind == POLYNOMIAL)


PRESENTATIONS = [S2, S3, CP2, sphere_model(4).presentation, cpn_model(3).presentation]


@pytest.mark.parametrize("p", PRESENTATIONS)
@settings(max_examples=80, deadline=None)
@given(data=st.data())
def test_graded_commutativity(p, data):
    m1, m2 = data.draw(monomials(p)), data.draw(monomials(p))
    x, y = monomial_mul(m1, m2, p), monomial_mul(m2, m1, p)
    assert (x is None) == (y is None)
    if x is None:
        return
    d1, d2 = p.total_degree(m1), p.total_degree(m2)
    # equal odd polynomial generators never swap (Pontryagin ring Z[u], |u| odd)
    expected = (-1) ** (d1 * d2 - shared_odd_polynomial(m1, m2, p))
    assert x[1] == y[1]
    assert x[0] == expected * y[0]


def test_odd_polynomial_square_is_not_antisymmetric():
    u = S2.monomial(u=1)
    assert monomial_mul(u, u, S2) == (1, S2.monomial(u=2))


@pytest.mark.parametrize("p", PRESENTATIONS)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_associativity(p, data):
    m1, m2, m3 = (data.draw(monomials(p, 3)) for _ in range(3))
    f1, f2, f3 = {m1: 1}, {m2: 1}, {m3: 1}
    assert poly_mul(poly_mul(f1, f2, p), f3, p) == poly_mul(f1, poly_mul(f2, f3, p), p)


@pytest.mark.parametrize("p", PRESENTATIONS)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_bidegree_additive(p, data):
    m1, m2 = data.draw(monomials(p)), data.draw(monomials(p))
    prod = monomial_mul(m1, m2, p)
    if prod is not None:
        s1, t1 = bidegree_of(m1, p)
        s2, t2 = bidegree_of(m2, p)
        assert bidegree_of(prod[1], p) == (s1 + s2, t1 + t2)


@settings(max_examples=100, deadline=None)
@given(st.integers(-50, 50), monomials(CP2, 4))
def test_normal_form_reduce_idempotent(coef, m):
    p = AlgebraPresentation(CP2.generators, CP2.relations + (Relation(3, (2, 0, 1)),))
    once = normal_form_reduce(coef, m, p)
    if once is None:
        return
    assert normal_form_reduce(*once, p) == once
