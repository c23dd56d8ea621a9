"""Pages, derivation differentials and page turning for the loop homology
spectral sequence.

Cells are stored as subquotients of the free group on their E^2 monomials:
cycles ``Z`` modulo boundaries ``B``, both as lattices of E^2 coordinate
vectors.  A differential is a derivation of the E^2 algebra fixed on
generators; on page ``r`` it acts on class representatives.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .algebra import (
    AlgebraPresentation,
    LAURENT,
    Monomial,
    Poly,
    bidegree_of,
    check_presentation,
    enumerate_basis,
    poly_add,
    poly_mul,
    reduce_poly,
    torsion_order,
)
from .groups import FGAbelianGroup
from .linalg import (
    ChainConditionError,
    IntMatrix,
    NotInLatticeError,
    Subquotient,
    kernel_basis,
)

log = logging.getLogger(__name__)


class InconsistentDifferentialError(ValueError):
    """The supplied differentials do not define a spectral sequence."""


class WindowError(ValueError):
    """A request reaches outside the reliably computed window."""


@dataclass(frozen=True)
class DifferentialSpec:
    """``d_r`` on generators; generators not listed go to zero."""

    r: int
    assignments: Mapping[str, Poly] = field(default_factory=dict)

    @classmethod
    def zero(cls, r: int) -> DifferentialSpec:
        return cls(r, {})

    def target(self, name: str) -> Poly:
        return self.assignments.get(name, {})

    def is_zero(self) -> bool:
        return not any(self.assignments.values())


def validate_spec(spec: DifferentialSpec, p: AlgebraPresentation) -> list[str]:
    problems = []
    if spec.r < 1:
        problems.append(f"d_{spec.r}: page index must be >= 1")
    for name, target in spec.assignments.items():
        if name not in p.names:
            problems.append(f"d_{spec.r}({name}): unknown generator")
            continue
        g = p.generator(name)
        if g.kind == LAURENT and target:
            problems.append(f"d_{spec.r}({name}): laurent generators carry no differential")
        want = (g.column - spec.r, g.row + spec.r - 1)
        for m in target:
            if len(m) != len(p.generators):
                problems.append(f"d_{spec.r}({name}): malformed monomial {m}")
            elif bidegree_of(m, p) != want:
                problems.append(
                    f"d_{spec.r}({name}): term {p.format_monomial(m)} has bidegree "
                    f"{bidegree_of(m, p)}, expected {want}"
                )
    return problems


def leibniz_extend(spec: DifferentialSpec, m: Monomial, p: AlgebraPresentation) -> Poly:
    """``d_r(m)`` by the graded Leibniz rule, reduced modulo the relations."""
    out: Poly = {}
    n = len(m)
    degrees = [g.total_degree for g in p.generators]
    for i, e in enumerate(m):
        if e <= 0:
            continue
        target = spec.target(p.names[i])
        if not target:
            continue
        head_degree = sum(m[k] * degrees[k] for k in range(i))
        for j in range(e):
            left = m[:i] + (j,) + (0,) * (n - i - 1)
            right = (0,) * i + (e - 1 - j,) + m[i + 1:]
            sign = -1 if (head_degree + j * degrees[i]) % 2 else 1
            term = poly_mul(poly_mul({left: 1}, target, p), {right: 1}, p)
            out = poly_add(out, term, sign)
    return reduce_poly(out, p)


@dataclass
class Cell:
    s: int
    t: int
    basis: tuple[Monomial, ...]
    quotient: Subquotient
    reliable: bool = True

    @property
    def group(self) -> FGAbelianGroup:
        return self.quotient.group

    @property
    def orders(self) -> tuple[int, ...]:
        return self.quotient.orders

    @property
    def basis_reps(self) -> list[Poly]:
        return [self._poly(v) for v in self.quotient.reps]

    def _poly(self, v: Sequence[int]) -> Poly:
        return {m: c for m, c in zip(self.basis, v) if c}

    def vector(self, f: Mapping[Monomial, int]) -> tuple[int, ...]:
        index = {m: i for i, m in enumerate(self.basis)}
        v = [0] * len(self.basis)
        for m, c in f.items():
            try:
                v[index[m]] += c
            except KeyError:
                raise ValueError(f"monomial {m} is not in cell ({self.s},{self.t})") from None
        return tuple(v)

    def coords(self, f: Mapping[Monomial, int]) -> tuple[int, ...]:
        """Class coordinates of the E^2 element ``f`` (which must be a cycle)."""
        return self.quotient.coords(self.vector(f))


@dataclass
class Page:
    r: int
    presentation: AlgebraPresentation
    d: int
    t_max: int
    cells: dict[tuple[int, int], Cell]
    infinity: bool = False

    @property
    def window(self) -> tuple[int, int]:
        return (self.d, self.t_max)

    def in_window(self, s: int, t: int) -> bool:
        return -self.d <= s <= 0 and 0 <= t <= self.t_max

    def cell(self, s: int, t: int) -> Cell | None:
        return self.cells.get((s, t))

    def group(self, s: int, t: int) -> FGAbelianGroup:
        c = self.cells.get((s, t))
        return c.group if c else FGAbelianGroup()

    def is_reliable(self, s: int, t: int) -> bool:
        if not self.in_window(s, t):
            return s < -self.d or s > 0 or t < 0
        c = self.cells.get((s, t))
        return c is None or c.reliable

    def nonzero_cells(self) -> list[Cell]:
        """Nonzero cells sorted by ``(s desc, t asc)``."""
        cells = [c for c in self.cells.values() if not c.group.is_zero()]
        return sorted(cells, key=lambda c: (-c.s, c.t))

    def unreliable_cells(self) -> list[tuple[int, int]]:
        return sorted(k for k, c in self.cells.items() if not c.reliable)

    def format_class(self, s: int, t: int, i: int) -> str:
        return self.presentation.format_poly(self.cells[(s, t)].basis_reps[i])


def _e2_cell(p: AlgebraPresentation, s: int, t: int) -> Cell | None:
    basis = tuple(enumerate_basis(p, s, t))
    if not basis:
        return None
    n = len(basis)
    units = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rels = [tuple(o * x for x in units[i])
            for i, o in enumerate(torsion_order(m, p) for m in basis) if o]
    q = Subquotient(n, units, rels)
    q.prefer_representatives(units)
    return Cell(s, t, basis, q)


def build_initial_page(p: AlgebraPresentation, d: int, t_max: int) -> Page:
    """The E^2 page on the window ``-d <= s <= 0``, ``0 <= t <= t_max``."""
    if p.has_laurent:
        raise ValueError("laurent presentations do not enter the spectral sequence")
    if d < 1 or t_max < 0:
        raise ValueError("need d >= 1 and t_max >= 0")
    check_presentation(p, d)
    cells = {}
    for s in range(-d, 1):
        for t in range(t_max + 1):
            c = _e2_cell(p, s, t)
            if c is not None:
                cells[(s, t)] = c
    return Page(2, p, d, t_max, cells)


def _images(page: Page, spec: DifferentialSpec, vectors: Iterable[Sequence[int]],
            cell: Cell) -> list[Poly]:
    p = page.presentation
    out = []
    for v in vectors:
        img: Poly = {}
        for m, c in zip(cell.basis, v):
            if c:
                img = poly_add(img, leibniz_extend(spec, m, p), c)
        out.append(reduce_poly(img, p))
    return out


def _target_key(spec: DifferentialSpec, s: int, t: int):
    return (s - spec.r, t + spec.r - 1)


def differential_matrix(page: Page, spec: DifferentialSpec, s: int, t: int) -> IntMatrix:
    """Matrix of ``d_r`` from the classes at ``(s, t)`` to those at the target."""
    if spec.r != page.r:
        raise ValueError(f"spec is for page {spec.r}, page is E^{page.r}")
    src = page.cell(s, t)
    ts, tt = _target_key(spec, s, t)
    tgt = page.cell(ts, tt)
    n_src = len(src.quotient) if src else 0
    if src is None or n_src == 0:
        return IntMatrix.zeros(len(tgt.quotient) if tgt else 0, 0)
    images = _images(page, spec, src.quotient.reps, src)
    if ts < -page.d or tgt is None:
        if any(images):
            where = "outside the column window" if ts < -page.d else "in a zero cell"
            if ts >= -page.d and tt > page.t_max:
                raise WindowError(f"d_{spec.r} from ({s},{t}) lands above t_max")
            raise InconsistentDifferentialError(
                f"d_{spec.r} from ({s},{t}) has a nonzero image {where} ({ts},{tt})"
            )
        return IntMatrix.zeros(len(tgt.quotient) if tgt else 0, n_src)
    cols = []
    for i, img in enumerate(images):
        try:
            cols.append(tgt.coords(img))
        except (NotInLatticeError, ValueError):
            raise InconsistentDifferentialError(
                f"d_{spec.r} of class {i} at ({s},{t}) is not a class at ({ts},{tt})"
            ) from None
    return IntMatrix.from_columns(cols, rows=len(tgt.quotient))


def _check_d_squared(page: Page, spec: DifferentialSpec, reliable: set) -> None:
    r = spec.r
    for (s, t) in sorted(page.cells):
        mid = _target_key(spec, s, t)
        end = _target_key(spec, *mid)
        if mid not in page.cells or end not in page.cells:
            continue
        if not {(s, t), mid, end} <= reliable:
            continue
        m1 = differential_matrix(page, spec, s, t)
        m2 = differential_matrix(page, spec, *mid)
        comp = m2 @ m1
        orders = page.cells[end].orders
        for i in range(comp.rows):
            o = orders[i]
            for x in comp.row(i):
                if (x % o if o else x):
                    raise InconsistentDifferentialError(
                        f"d_{r} o d_{r} is nonzero from ({s},{t}) to {end}"
                    )


def turn_page(page: Page, spec: DifferentialSpec) -> Page:
    """E^{r+1} from E^r and ``d_r``.

    Cells whose outgoing differential leaves the top of the window with a
    nonzero image, or that touch such a cell, are carried over unchanged and
    marked unreliable.
    """
    if spec.r != page.r:
        raise ValueError(f"spec is for page {spec.r}, page is E^{page.r}")
    problems = validate_spec(spec, page.presentation)
    if problems:
        raise InconsistentDifferentialError("; ".join(problems))
    if spec.is_zero():
        return replace(page, r=page.r + 1, cells=dict(page.cells))

    r, d = spec.r, page.d
    cycle_images: dict[tuple[int, int], list[Poly]] = {}
    escapes = set()
    for key, c in page.cells.items():
        imgs = _images(page, spec, c.quotient.cycle_basis.columns(), c)
        cycle_images[key] = imgs
        ts, tt = _target_key(spec, *key)
        if ts >= -d and tt > page.t_max and any(imgs):
            escapes.add(key)
        elif ts < -d and any(imgs):
            raise InconsistentDifferentialError(
                f"d_{r} from {key} has a nonzero image outside the column window"
            )

    def unreliable(key):
        c = page.cells[key]
        if not c.reliable or key in escapes:
            return True
        tgt = page.cells.get(_target_key(spec, *key))
        src = page.cells.get((key[0] + r, key[1] - r + 1))
        return (tgt is not None and not tgt.reliable) or (src is not None and not src.reliable)

    bad = {k for k in page.cells if unreliable(k)}
    reliable = set(page.cells) - bad
    _check_d_squared(page, spec, reliable)

    new_cells = {}
    for key, c in page.cells.items():
        if key in bad:
            if c.reliable:
                log.debug("E^%d cell %s marked unreliable", r + 1, key)
            new_cells[key] = replace(c, reliable=False)
            continue
        s, t = key
        tgt = page.cells.get(_target_key(spec, s, t))
        zb = c.quotient.cycle_basis.columns()
        imgs = cycle_images[key]
        if tgt is None or not any(imgs):
            if any(imgs):
                raise InconsistentDifferentialError(f"d_{r} from {key} lands in a zero cell")
            new_cycles = zb
        else:
            vecs = []
            for img in imgs:
                v = tgt.vector(img)
                if not tgt.quotient.contains(v):
                    raise InconsistentDifferentialError(
                        f"d_{r} sends a cycle at {key} outside the cycles at ({tgt.s},{tgt.t})"
                    )
                vecs.append(v)
            for b in c.quotient.boundary_generators:
                img = _images(page, spec, [b], c)[0]
                if img and not tgt.quotient.is_boundary(tgt.vector(img)):
                    raise InconsistentDifferentialError(
                        f"d_{r} is not well defined on the class group at {key}"
                    )
            bgens = tgt.quotient.boundary_generators
            M = IntMatrix.from_columns(vecs + list(bgens), rows=len(tgt.basis))
            k = len(vecs)
            new_cycles = []
            for y in kernel_basis(M):
                new_cycles.append(tuple(
                    sum(y[j] * zb[j][i] for j in range(k)) for i in range(len(c.basis))
                ))
        boundaries = list(c.quotient.boundary_generators)
        src = page.cells.get((s + r, t - r + 1))
        if src is not None:
            boundaries += [c.vector(img) for img in cycle_images[src.s, src.t] if img]
        try:
            q = Subquotient(len(c.basis), new_cycles, boundaries)
        except ChainConditionError:
            raise InconsistentDifferentialError(f"d_{r} o d_{r} is nonzero into {key}") from None
        n = len(c.basis)
        units = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        q.prefer_representatives(units + [tuple(-x for x in u) for u in units]
                                 + list(c.quotient.reps))
        new_cells[key] = Cell(s, t, c.basis, q, True)
    return Page(r + 1, page.presentation, d, page.t_max, new_cells)


def run_to_infinity(page: Page, specs: Sequence[DifferentialSpec]) -> Page:
    """Turn pages through ``r = d``; columns span ``[-d, 0]`` so E^{d+1} = E^inf."""
    by_r = {}
    last = 0
    for spec in specs:
        if spec.r <= last:
            raise ValueError("differential specs must be sorted by r, one per page")
        last = spec.r
        if spec.r < page.r and not spec.is_zero():
            raise ValueError(f"spec for d_{spec.r} precedes page E^{page.r}")
        if spec.r > page.d and not spec.is_zero():
            raise InconsistentDifferentialError(
                f"d_{spec.r} cannot be nonzero when the columns span only {page.d + 1}"
            )
        by_r[spec.r] = spec
    while page.r <= page.d:
        page = turn_page(page, by_r.get(page.r, DifferentialSpec.zero(page.r)))
    return replace(page, infinity=True)


@dataclass(frozen=True)
class ClassRef:
    s: int
    t: int
    index: int


@dataclass(frozen=True)
class Element:
    """A page element: coordinates in the classes of cell ``(s, t)``."""

    s: int
    t: int
    coords: tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.coords)


def class_element(page: Page, s: int, t: int, i: int = 0) -> Element:
    c = page.cells[(s, t)]
    return Element(s, t, tuple(int(j == i) for j in range(len(c.quotient))))


def element_poly(page: Page, x: Element) -> Poly:
    c = page.cell(x.s, x.t)
    out: Poly = {}
    if c is None:
        return out
    for coef, rep in zip(x.coords, c.basis_reps):
        if coef:
            out = poly_add(out, rep, coef)
    return out


def element_of_poly(page: Page, s: int, t: int, f: Poly) -> Element:
    """Class of the E^2 element ``f`` at ``(s, t)``."""
    if not page.in_window(s, t):
        if s < -page.d and not f:
            return Element(s, t, ())
        if s < -page.d:
            raise InconsistentDifferentialError(f"nonzero product outside the columns at ({s},{t})")
        raise WindowError(f"({s},{t}) is outside the window")
    if not page.is_reliable(s, t):
        raise WindowError(f"cell ({s},{t}) is unreliable")
    c = page.cell(s, t)
    if c is None:
        if f:
            raise InconsistentDifferentialError(f"nonzero element in the zero cell ({s},{t})")
        return Element(s, t, ())
    try:
        return Element(s, t, c.coords(f))
    except NotInLatticeError:
        raise InconsistentDifferentialError(f"element at ({s},{t}) is not a cycle") from None


def multiply(page: Page, x: Element, y: Element) -> Element:
    f = poly_mul(element_poly(page, x), element_poly(page, y), page.presentation)
    return element_of_poly(page, x.s + y.s, x.t + y.t, f)


def product_table(page: Page) -> dict[tuple[ClassRef, ClassRef], dict[ClassRef, int]]:
    """Products of basis classes, over the reliable part of the window."""
    refs = [ClassRef(c.s, c.t, i)
            for c in page.nonzero_cells() if c.reliable
            for i in range(len(c.quotient))]
    table = {}
    for a in refs:
        for b in refs:
            s, t = a.s + b.s, a.t + b.t
            if s >= -page.d and (t > page.t_max or not page.is_reliable(s, t)):
                continue
            z = multiply(page, class_element(page, a.s, a.t, a.index),
                         class_element(page, b.s, b.t, b.index))
            table[(a, b)] = {ClassRef(s, t, i): v for i, v in enumerate(z.coords) if v}
    return table


@dataclass(frozen=True)
class ExtensionPiece:
    s: int
    t: int
    group: FGAbelianGroup
    representatives: tuple[str, ...]


@dataclass(frozen=True)
class ExtensionReport:
    total_degree: int
    pieces: tuple[ExtensionPiece, ...]
    ambiguous: bool
    reliable: bool = True


def extension_report(einf: Page, total_degree: int) -> ExtensionReport:
    """Filtration pieces of one total degree; never resolves the extension."""
    pieces = []
    reliable = True
    for s in range(0, -einf.d - 1, -1):
        t = total_degree - s
        if t < 0:
            continue
        if t > einf.t_max or not einf.is_reliable(s, t):
            reliable = False
            continue
        c = einf.cell(s, t)
        if c is None or c.group.is_zero():
            continue
        reps = tuple(einf.presentation.format_poly(f) for f in c.basis_reps)
        pieces.append(ExtensionPiece(s, t, c.group, reps))
    ambiguous = len(pieces) > 1 or any(p.group.torsion for p in pieces)
    return ExtensionReport(total_degree, tuple(pieces), ambiguous, reliable)


def _solve_gf2(equations: list[tuple[int, int]]) -> bool:
    """Is the system ``mask . x = rhs`` over GF(2) consistent?"""
    pivots: dict[int, tuple[int, int]] = {}
    for mask, rhs in equations:
        while mask:
            top = mask.bit_length() - 1
            if top not in pivots:
                pivots[top] = (mask, rhs)
                break
            pm, pr = pivots[top]
            mask ^= pm
            rhs ^= pr
        else:
            if rhs:
                return False
    return True


def isomorphic_pages(p1: Page, p2: Page) -> tuple[bool, str]:
    """Compare two pages cell by cell, product tables up to generator signs.

    Cyclic cells may have their generator negated independently; cells with
    several classes must agree in the given bases.
    """
    keys = sorted(set(p1.cells) | set(p2.cells), key=lambda k: (k[0] + k[1], -k[0]))
    for key in keys:
        if not (p1.is_reliable(*key) and p2.is_reliable(*key)):
            continue
        if p1.group(*key) != p2.group(*key):
            return False, f"groups differ at {key}: {p1.group(*key)} vs {p2.group(*key)}"
    t1, t2 = product_table(p1), product_table(p2)
    common = set(t1) & set(t2)
    var = {}
    for c in p1.nonzero_cells():
        if c.group.is_cyclic():
            var[(c.s, c.t)] = len(var)
    eqs = []
    for a, b in sorted(common, key=lambda ab: (ab[0].s, ab[0].t, ab[1].s, ab[1].t,
                                               ab[0].index, ab[1].index)):
        x, y = t1[(a, b)], t2[(a, b)]
        s, t = a.s + b.s, a.t + b.t
        c = p1.cell(s, t)
        if c is None or c.group.is_zero():
            if x or y:
                return False, f"product {a} * {b} nonzero on one side only"
            continue
        orders = c.orders
        for i, o in enumerate(orders):
            u, v = x.get(ClassRef(s, t, i), 0), y.get(ClassRef(s, t, i), 0)
            same = (u - v) % o == 0 if o else u == v
            flipped = (u + v) % o == 0 if o else u == -v
            if same and flipped:
                continue
            if not (same or flipped):
                return False, f"product {a} * {b} differs at {(s, t)}: {u} vs {v}"
            keys3 = [(a.s, a.t), (b.s, b.t), (s, t)]
            if any(k not in var for k in keys3):
                if flipped:
                    return False, f"product {a} * {b} differs by a sign in a non-cyclic cell"
                continue
            mask = 0
            for k in keys3:
                mask ^= 1 << var[k]
            eqs.append((mask, int(flipped)))
    if not _solve_gf2(eqs):
        return False, "no choice of generator signs matches the product tables"
    return True, "isomorphic"
