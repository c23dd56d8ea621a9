import pytest

from loopss.engine import WindowError
from loopss.groups import FGAbelianGroup
from loopss.modelfile import ModelSyntaxError, dumps, eval_int, parse
from loopss.models import (
    IncompatibleCandidateError,
    PresentationCandidate,
    assemble_total_degree,
    circle_loop_homology,
    cpn_model,
    custom_model_parse,
    expected_names,
    laurent_piece,
    load_expected,
    match_presentation,
    model_from_selector,
    sphere_model,
    ziller_reference,
)

CP2_TEXT = """\
# CP^2 written out by hand
dim 4
base c (-2,0) polynomial
fiber y (0,1) exterior
fiber u (0,4) polynomial
rel 0 c^3
diff r=4 d(y) = 3 c^2*u
"""


def test_sphere_models():
    s2, s3 = sphere_model(2), sphere_model(3)
    assert [g.bidegree for g in s2.presentation.generators] == [(-2, 0), (0, 1)]
    assert s2.differentials[0].r == 2
    assert s3.differentials == ()
    with pytest.raises(ValueError):
        sphere_model(1)


def test_cpn_model_bidegrees():
    m = cpn_model(3)
    assert m.dimension == 6
    assert [g.bidegree for g in m.presentation.generators] == [(-2, 0), (0, 1), (0, 6)]
    assert m.differentials[0].r == 6
    with pytest.raises(ValueError):
        cpn_model(0)


def test_circle_pieces():
    p = circle_loop_homology()
    assert [g.total_degree for g in p.generators] == [-1, 0]
    assert laurent_piece(p, 0).describe() == "free, countable basis indexed by k: {t^k}"
    assert laurent_piece(p, -1).describe() == "free, countable basis indexed by k: {a*t^k}"
    assert laurent_piece(p, 1).is_zero()
    assert laurent_piece(p, 1).describe() == "0"


# -- model files ----------------------------------------------------------------

def test_eval_int():
    assert eval_int("2*n+1", {"n": 3}) == 7
    assert eval_int("(n+1)//2", {"n": 4}) == 2
    with pytest.raises(ValueError):
        eval_int("n**2", {"n": 2})
    with pytest.raises(ValueError):
        eval_int("m", {"n": 2})


def test_custom_model_reproduces_builtin():
    custom = custom_model_parse(CP2_TEXT)
    builtin = cpn_model(2)
    assert custom.presentation == builtin.presentation
    assert custom.differentials[0].assignments == builtin.differentials[0].assignments
    assert custom.e_infinity(12).group(-4, 4) == FGAbelianGroup(0, (3,))


def test_dumps_round_trip():
    parsed = parse(CP2_TEXT)
    again = parse(dumps(parsed))
    assert again.presentation == parsed.presentation
    assert again.differentials == parsed.differentials


@pytest.mark.parametrize("text, line", [
    ("dim 2\nbase a (-2,0) exterior\nfiber u (0,1) polynomial\nrel 0 a^2\nfrob\n", 5),
    ("dim 3\nbase a (-3,0) exterior\nfiber u (0,2) exterior\n", 3),
    ("dim 2\nbase a (-2,0) exterior\nfiber u (0,1) polynomial\nrel 0 a^2\n"
     "diff r=2 d(u) = 2 a*u\n", 5),
    ("dim 2\nbase a (-2,0) exterior\nrel 0 b^2\n", 3),
])
def test_syntax_errors_name_the_line(text, line):
    with pytest.raises(ModelSyntaxError) as err:
        custom_model_parse(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


def test_missing_dim_is_an_error():
    with pytest.raises(ModelSyntaxError):
        custom_model_parse("base a (-2,0) exterior\n")


def test_expected_templates():
    assert {"theorem2-odd", "theorem2-even", "theorem3", "circle"} <= set(expected_names())
    t3 = load_expected("theorem3", 2)
    assert t3.dimension == 4 and t3.bound == 12
    assert [g.name for g in t3.presentation.generators] == ["w", "c", "u"]


def test_model_selector():
    assert model_from_selector("sphere:4").name == "sphere:4"
    assert model_from_selector("cpn:2").dimension == 4
    assert model_from_selector("circle") == circle_loop_homology()
    for bad in ("torus", "sphere:x", "custom:"):
        with pytest.raises(ValueError):
            model_from_selector(bad)


# -- total degrees and the Ziller reference ----------------------------------------

def test_ziller_reference_values():
    assert ziller_reference(2, 0) == FGAbelianGroup(1)
    assert ziller_reference(2, 4) == FGAbelianGroup(1, (3,))
    assert ziller_reference(2, 5) == FGAbelianGroup(1)
    assert ziller_reference(3, 12) == FGAbelianGroup(1, (4,))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_assembled_degrees_match_ziller(n):
    m = cpn_model(n)
    d = m.dimension
    einf = m.e_infinity(6 * n + d + 2)
    for k in range(0, 6 * n + 1):
        got = assemble_total_degree(einf, k - d)
        want = ziller_reference(n, k)
        assert (got.rank, got.torsion_order) == (want.rank, want.torsion_order), k


def test_assemble_outside_window():
    einf = sphere_model(2).e_infinity(6)
    with pytest.raises(WindowError):
        assemble_total_degree(einf, 6)


# -- presentation matching -----------------------------------------------------------

def candidate(name, n):
    parsed = load_expected(name, n)
    return PresentationCandidate(parsed.presentation, parsed.bound, name)


@pytest.mark.parametrize("n, name", [(3, "theorem2-odd"), (2, "theorem2-even"),
                                     (4, "theorem2-even"), (5, "theorem2-odd")])
def test_sphere_matches_its_form(n, name):
    c = candidate(name, n)
    einf = sphere_model(n).e_infinity(c.degree_bound + 2 * n + 2)
    assert match_presentation(einf, c).passed


def test_even_sphere_fails_odd_form_with_location():
    c = candidate("theorem2-odd", 2)
    verdict = match_presentation(sphere_model(2).e_infinity(c.degree_bound + 6), c)
    assert not verdict.passed
    assert verdict.bidegree == (-2, 2)
    assert "Z/2" in verdict.reason


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cpn_matches_theorem3(n):
    c = candidate("theorem3", n)
    einf = cpn_model(n).e_infinity(c.degree_bound + 4 * n + 2)
    assert match_presentation(einf, c).passed


def test_match_needs_a_large_enough_window():
    c = candidate("theorem3", 2)
    with pytest.raises(WindowError):
        match_presentation(cpn_model(2).e_infinity(8), c)


def test_candidate_generator_outside_window():
    # the S^5 form has a at column -5, outside the two columns of S^2
    c = PresentationCandidate(load_expected("theorem2-odd", 5).presentation, 4)
    with pytest.raises(IncompatibleCandidateError):
        match_presentation(sphere_model(2).e_infinity(30), c)
