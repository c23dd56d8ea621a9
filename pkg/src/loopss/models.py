"""Loop homology inputs for spheres, complex projective spaces, the circle
and user models, plus comparison of an E^inf page with candidate rings."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .algebra import (
    AlgebraPresentation,
    EXTERIOR,
    GeneratorDecl,
    LAURENT,
    POLYNOMIAL,
    Poly,
    Relation,
    _raw_monomials,
    bidegree_of,
    enumerate_basis,
    is_killed,
    killed_monomials,
    monomial_mul,
    poly_mul,
    torsion_order,
)
from .engine import (
    DifferentialSpec,
    Element,
    Page,
    WindowError,
    build_initial_page,
    element_of_poly,
    element_poly,
    multiply,
    run_to_infinity,
)
from .groups import FGAbelianGroup
from .linalg import IntMatrix, NotInLatticeError, smith_normal_form
from . import modelfile


@dataclass(frozen=True)
class ManifoldModel:
    name: str
    dimension: int
    presentation: AlgebraPresentation
    base: tuple[str, ...]
    fiber: tuple[str, ...]
    differentials: tuple[DifferentialSpec, ...] = ()

    def initial_page(self, t_max: int) -> Page:
        return build_initial_page(self.presentation, self.dimension, t_max)

    def e_infinity(self, t_max: int) -> Page:
        return run_to_infinity(self.initial_page(t_max), self.differentials)


def sphere_model(n: int) -> ManifoldModel:
    """S^n for n >= 2: a = iota (x) 1 at (-n, 0), u = sigma (x) x at (0, n-1)."""
    if n < 2:
        raise ValueError("sphere_model needs n >= 2; use circle_loop_homology() for S^1")
    gens = (GeneratorDecl("a", -n, 0, EXTERIOR), GeneratorDecl("u", 0, n - 1, POLYNOMIAL))
    rels = (Relation(0, (2, 0)),) if n % 2 == 0 else ()
    p = AlgebraPresentation(gens, rels)
    specs = ()
    if n % 2 == 0:
        specs = (DifferentialSpec(n, {"u": {(1, 2): 2}}),)
    return ManifoldModel(f"sphere:{n}", n, p, ("a",), ("u",), specs)


def cpn_model(n: int) -> ManifoldModel:
    """CP^n: c at (-2, 0) with c^(n+1) = 0, y at (0, 1), u at (0, 2n)."""
    if n < 1:
        raise ValueError("cpn_model needs n >= 1")
    gens = (
        GeneratorDecl("c", -2, 0, POLYNOMIAL),
        GeneratorDecl("y", 0, 1, EXTERIOR),
        GeneratorDecl("u", 0, 2 * n, POLYNOMIAL),
    )
    p = AlgebraPresentation(gens, (Relation(0, (n + 1, 0, 0)),))
    spec = DifferentialSpec(2 * n, {"y": {(n, 0, 1): n + 1}})
    return ManifoldModel(f"cpn:{n}", 2 * n, p, ("c",), ("y", "u"), (spec,))


def circle_loop_homology() -> AlgebraPresentation:
    """Lambda[a] (x) Z[t, t^-1], a in degree -1, t in degree 0."""
    return AlgebraPresentation(
        (GeneratorDecl("a", -1, 0, EXTERIOR), GeneratorDecl("t", 0, 0, LAURENT)), ()
    )


@dataclass(frozen=True)
class LaurentPiece:
    """One total degree of an algebra with laurent generators.

    Free with basis ``stem * (laurent monomial)`` for every stem, indexed by
    the laurent exponents.
    """

    degree: int
    stems: tuple[str, ...]
    laurent: tuple[str, ...]

    def is_zero(self) -> bool:
        return not self.stems

    def describe(self) -> str:
        if not self.stems:
            return "0"
        idx = ",".join(f"k{i}" if len(self.laurent) > 1 else "k"
                       for i in range(len(self.laurent)))
        bases = []
        for stem in self.stems:
            tail = "*".join(f"{g}^{'k' if len(self.laurent) == 1 else f'k{i}'}"
                            for i, g in enumerate(self.laurent))
            bases.append(tail if stem == "1" else f"{stem}*{tail}")
        return f"free, countable basis indexed by {idx}: {{{', '.join(bases)}}}"


def laurent_piece(p: AlgebraPresentation, degree: int) -> LaurentPiece:
    laurent = [g.name for g in p.generators if g.kind == LAURENT]
    core = AlgebraPresentation(
        tuple(g for g in p.generators if g.kind != LAURENT),
        tuple(Relation(r.coefficient,
                       tuple(e for e, g in zip(r.monomial, p.generators) if g.kind != LAURENT))
              for r in p.relations),
    )
    if any(g.kind == POLYNOMIAL and g.column for g in core.generators):
        raise ValueError("laurent pieces need polynomial generators in column 0")
    d = -sum(g.column for g in core.generators)
    stems = []
    for s in range(-d, 1):
        t = degree - s
        if t < 0:
            continue
        for m in sorted(_raw_monomials(core, s, t), key=lambda m: (sum(m), m)):
            if not is_killed(m, core) and torsion_order(m, core) == 0:
                stems.append(core.format_monomial(m))
    return LaurentPiece(degree, tuple(stems), tuple(laurent))


def assemble_total_degree(einf: Page, j: int) -> FGAbelianGroup:
    """Direct sum of the E^inf cells on the line ``s + t = j``.

    This is the loop homology in degree ``j`` only up to extensions; compare
    rank and torsion order, not the group.
    """
    if j + einf.d > einf.t_max:
        raise WindowError(f"degree {j} needs t up to {j + einf.d} > t_max = {einf.t_max}")
    total = FGAbelianGroup()
    for s in range(-einf.d, 1):
        t = j - s
        if t < 0:
            continue
        if not einf.is_reliable(s, t):
            raise WindowError(f"cell ({s},{t}) is unreliable")
        total = total + einf.group(s, t)
    return total


def ziller_reference(n: int, k: int) -> FGAbelianGroup:
    """H_k(LCP^n): Z + Z/(n+1) when k = 2mn with m >= 1, else Z."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    if k > 0 and k % (2 * n) == 0:
        return FGAbelianGroup(1, (n + 1,))
    return FGAbelianGroup(1, ())


@dataclass(frozen=True)
class PresentationCandidate:
    presentation: AlgebraPresentation
    degree_bound: int
    name: str = "candidate"


@dataclass(frozen=True)
class MatchVerdict:
    passed: bool
    bidegree: tuple[int, int] | None = None
    reason: str = ""

    def __bool__(self):
        return self.passed

    def __str__(self):
        if self.passed:
            return "PASS"
        where = f" at {self.bidegree}" if self.bidegree is not None else ""
        return f"FAIL{where}: {self.reason}"


class IncompatibleCandidateError(ValueError):
    pass


def _fail(bideg, reason):
    return MatchVerdict(False, bideg, reason)


def match_presentation(einf: Page, cand: PresentationCandidate) -> MatchVerdict:
    """Compare E^inf with a candidate as associated graded rings.

    Each candidate generator is sent to the generator of its (cyclic) E^inf
    cell.  Through the degree bound this checks, cell by cell, that the groups
    agree, that the induced map is well defined and onto, and that products of
    candidate basis monomials match products of their images.
    """
    q = cand.presentation
    d, bound = einf.d, cand.degree_bound
    for g in q.generators:
        if g.kind == LAURENT or not (-d <= g.column <= 0) or g.row < 0:
            raise IncompatibleCandidateError(
                f"generator {g.name} at {g.bidegree} does not fit the window of E^inf"
            )
    if bound + d > einf.t_max:
        raise WindowError(f"degree bound {bound} needs t_max >= {bound + d}")

    keys = sorted(((s, j - s) for j in range(-d, bound + 1) for s in range(0, -d - 1, -1)
                   if j - s >= 0), key=lambda k: (k[0] + k[1], -k[0]))
    for key in keys:
        if not einf.is_reliable(*key):
            raise WindowError(f"cell {key} is unreliable; raise t_max")

    # (i) groups
    cand_basis = {}
    for key in keys:
        basis = enumerate_basis(q, *key)
        cand_basis[key] = basis
        mine = FGAbelianGroup.from_orders(torsion_order(m, q) for m in basis)
        theirs = einf.group(*key)
        if mine != theirs:
            return _fail(key, f"candidate has {mine}, E^inf has {theirs}")
    for s in range(-2 * d, -d):
        for tot in range(s, bound + 1):
            if tot - s >= 0 and enumerate_basis(q, s, tot - s):
                return _fail((s, tot - s), "candidate is nonzero outside the column window")

    # generator images
    images: list[Poly] = []
    for g in q.generators:
        cell = einf.cell(*g.bidegree)
        if cell is None or not cell.group.is_cyclic():
            group = cell.group if cell else FGAbelianGroup()
            return _fail(g.bidegree, f"cannot pin generator {g.name}: E^inf cell is {group}")
        images.append(cell.basis_reps[0])

    def image(m) -> Poly:
        f: Poly = {einf.presentation.unit: 1}
        for gi, e in enumerate(m):
            for _ in range(e):
                f = poly_mul(f, images[gi], einf.presentation)
        return f

    def element(m) -> Element:
        s, t = bidegree_of(m, q)
        try:
            return element_of_poly(einf, s, t, image(m))
        except (NotInLatticeError, ValueError) as exc:
            raise IncompatibleCandidateError(str(exc)) from None

    # relations must map to zero
    for key in keys:
        for m in killed_monomials(q, *key):
            if not element(m).is_zero():
                return _fail(key, f"{q.format_monomial(m)} vanishes in the candidate but not in E^inf")
        for i, gdecl in enumerate(q.generators):
            if gdecl.kind == EXTERIOR:
                sq = tuple(2 if j == i else 0 for j in range(len(q.generators)))
                if bidegree_of(sq, q) == key and not element(sq).is_zero():
                    return _fail(key, f"{gdecl.name}^2 is nonzero in E^inf")

    # (ii) the induced map is an isomorphism on each cell
    elements = {}
    for key in keys:
        basis = cand_basis[key]
        if not basis:
            continue
        cell = einf.cell(*key)
        orders = cell.orders
        cols = []
        for m in basis:
            e = element(m)
            elements[m] = e
            o = torsion_order(m, q)
            if any((o * x) % oo if oo else o * x for x, oo in zip(e.coords, orders)):
                return _fail(key, f"{o}*{q.format_monomial(m)} is not zero in E^inf")
            cols.append(e.coords)
        M = IntMatrix.from_columns(cols, rows=len(orders)).hstack(
            IntMatrix.diagonal(list(orders)))
        if smith_normal_form(M).invariant_factors != [1] * len(orders):
            return _fail(key, "candidate monomials do not generate the E^inf cell")

    # products of basis monomials
    for k1 in keys:
        for k2 in keys:
            k3 = (k1[0] + k2[0], k1[1] + k2[1])
            if k3[0] < -d or k3[0] + k3[1] > bound:
                continue
            for m1 in cand_basis[k1]:
                for m2 in cand_basis[k2]:
                    got = multiply(einf, elements[m1], elements[m2])
                    prod = monomial_mul(m1, m2, q)
                    orders = einf.cell(*k3).orders if einf.cell(*k3) else ()
                    if prod is None or torsion_order(prod[1], q) == 1:
                        want = (0,) * len(orders)
                    else:
                        sign, m3 = prod
                        want = tuple(sign * x for x in elements[m3].coords)
                    if any(((a - b) % o if o else a - b) for a, b, o in zip(got.coords, want, orders)):
                        return _fail(k3, f"product {q.format_monomial(m1)} * "
                                         f"{q.format_monomial(m2)} disagrees with E^inf")
    return MatchVerdict(True)


def expected_names() -> list[str]:
    return sorted(p.name[:-6] for p in resources.files("loopss.data").iterdir()
                  if p.name.endswith(".model"))


def load_expected(name: str, n: int | None = None) -> modelfile.ParsedModel:
    """A built-in expected presentation, instantiated at ``n``."""
    text = resources.files("loopss.data").joinpath(f"{name}.model").read_text()
    return modelfile.parse(text, {"n": n} if n is not None else {})


def custom_model_parse(text: str, name: str = "custom") -> ManifoldModel:
    parsed = modelfile.parse(text)
    if parsed.dimension is None:
        raise modelfile.ModelSyntaxError(0, "missing 'dim' line")
    return ManifoldModel(name, parsed.dimension, parsed.presentation, parsed.base,
                         parsed.fiber, parsed.differentials)


def load_custom_model(path: str | Path) -> ManifoldModel:
    return custom_model_parse(Path(path).read_text(), name=f"custom:{path}")


def model_from_selector(selector: str):
    """``sphere:N``, ``cpn:N``, ``circle`` or ``custom:PATH``.

    Returns a :class:`ManifoldModel`, or the closed-form presentation for
    the circle.
    """
    kind, _, arg = selector.partition(":")
    if kind == "sphere":
        return sphere_model(int(arg))
    if kind == "cpn":
        return cpn_model(int(arg))
    if kind == "circle" and not arg:
        return circle_loop_homology()
    if kind == "custom" and arg:
        return load_custom_model(arg)
    raise ValueError(f"unknown model selector {selector!r}")
