"""Bigraded-commutative algebras over Z presented by monomial-torsion relations.

A monomial is a tuple of exponents, one per generator in declaration order.
Polynomials are plain dicts ``{monomial: coefficient}`` with no zero entries.
Signs follow the Koszul rule on total degree ``column + row``: moving one odd
generator past another costs a factor of -1.  Equal generators never swap, so
an odd *polynomial* generator ``u`` has ``u*u = u^2`` (this is what the
Pontryagin ring of an even sphere needs).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence

EXTERIOR = "exterior"
POLYNOMIAL = "polynomial"
LAURENT = "laurent"
KINDS = (EXTERIOR, POLYNOMIAL, LAURENT)

Monomial = tuple[int, ...]
Poly = dict[Monomial, int]

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class PresentationError(ValueError):
    def __init__(self, diagnostics: Sequence[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class GeneratorDecl:
    name: str
    column: int
    row: int
    kind: str = POLYNOMIAL

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.column, self.row)

    @property
    def total_degree(self) -> int:
        return self.column + self.row

    @property
    def is_odd(self) -> bool:
        return self.total_degree % 2 == 1


@dataclass(frozen=True)
class Relation:
    """``coefficient * monomial = 0``; coefficient 0 means ``monomial = 0``."""

    coefficient: int
    monomial: Monomial

    @property
    def is_truncation(self) -> bool:
        return self.coefficient == 0


@dataclass(frozen=True)
class AlgebraPresentation:
    generators: tuple[GeneratorDecl, ...] = ()
    relations: tuple[Relation, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relations", tuple(self.relations))

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {g.name: i for i, g in enumerate(self.generators)}

    @cached_property
    def _odd(self) -> tuple[bool, ...]:
        return tuple(g.is_odd for g in self.generators)

    @cached_property
    def _truncations(self) -> tuple[Monomial, ...]:
        return tuple(r.monomial for r in self.relations if r.is_truncation)

    @cached_property
    def _torsion(self) -> tuple[Relation, ...]:
        return tuple(r for r in self.relations if not r.is_truncation)

    @cached_property
    def _exterior(self) -> tuple[int, ...]:
        return tuple(i for i, g in enumerate(self.generators) if g.kind == EXTERIOR)

    @cached_property
    def _laurent(self) -> tuple[bool, ...]:
        return tuple(g.kind == LAURENT for g in self.generators)

    @property
    def has_laurent(self) -> bool:
        return any(self._laurent)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def generator(self, name: str) -> GeneratorDecl:
        return self.generators[self.index(name)]

    @property
    def unit(self) -> Monomial:
        return (0,) * len(self.generators)

    def monomial(self, **exponents: int) -> Monomial:
        m = [0] * len(self.generators)
        for name, e in exponents.items():
            m[self.index(name)] = e
        return tuple(m)

    def parse_monomial(self, text: str) -> Monomial:
        """Read ``g1^e1*g2^e2`` (or ``1``); repeated factors accumulate.

        Factors are multiplied in the order written and the result must carry
        sign +1; use declaration order to stay safe.
        """
        text = text.replace(" ", "")
        if text in ("1", ""):
            return self.unit
        m = list(self.unit)
        for factor in text.split("*"):
            name, _, exp = factor.partition("^")
            e = int(exp) if exp else 1
            m[self.index(name)] += e
        return tuple(m)

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for g, e in zip(self.generators, m):
            if e == 1:
                parts.append(g.name)
            elif e:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) if parts else "1"

    def format_poly(self, f: Mapping[Monomial, int]) -> str:
        if not f:
            return "0"
        terms = []
        for m in sorted(f, key=_graded_lex):
            c = f[m]
            mono = self.format_monomial(m)
            if mono == "1":
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ")

    def total_degree(self, m: Monomial) -> int:
        s, t = bidegree_of(m, self)
        return s + t


def _graded_lex(m: Monomial):
    return (sum(m), m)


def _divides(r: Monomial, m: Monomial, laurent: Sequence[bool]) -> bool:
    return all(lz or a <= b for a, b, lz in zip(r, m, laurent))


def bidegree_of(m: Monomial, p: AlgebraPresentation) -> tuple[int, int]:
    s = t = 0
    for e, g in zip(m, p.generators):
        s += e * g.column
        t += e * g.row
    return (s, t)


def is_killed(m: Monomial, p: AlgebraPresentation) -> bool:
    """True when ``m`` is zero: exterior square or a truncation divides it."""
    if any(m[i] > 1 for i in p._exterior):
        return True
    return any(_divides(r, m, p._laurent) for r in p._truncations)


def torsion_order(m: Monomial, p: AlgebraPresentation) -> int:
    """gcd of torsion coefficients whose monomials divide ``m`` (0 if none)."""
    g = 0
    for r in p._torsion:
        if _divides(r.monomial, m, p._laurent):
            g = gcd(g, r.coefficient)
    return g


def normal_form_reduce(coef: int, m: Monomial, p: AlgebraPresentation):
    """Reduce ``coef * m`` modulo the relations.

    Returns ``(coef, m)`` or ``None`` when the term vanishes.  Coefficients
    of torsion monomials land in ``[0, g)``.
    """
    if is_killed(m, p):
        return None
    g = torsion_order(m, p)
    if g:
        coef %= g
    if coef == 0:
        return None
    return (coef, m)


def koszul_sign(m1: Monomial, m2: Monomial, p: AlgebraPresentation) -> int:
    """Sign from shuffling ``m1 * m2`` into declaration order."""
    flips = 0
    odd_seen = 0  # odd generators of m2 strictly before the current index
    for e1, e2, odd in zip(m1, m2, p._odd):
        if odd:
            flips += e1 * odd_seen
            odd_seen += e2
    return -1 if flips % 2 else 1


def monomial_mul(m1: Monomial, m2: Monomial, p: AlgebraPresentation):
    """``(sign, monomial)`` for ``m1 * m2``, or ``None`` when the product is zero."""
    m = tuple(a + b for a, b in zip(m1, m2))
    if is_killed(m, p):
        return None
    return (koszul_sign(m1, m2, p), m)


def reduce_poly(f: Mapping[Monomial, int], p: AlgebraPresentation) -> Poly:
    out = {}
    for m, c in f.items():
        t = normal_form_reduce(c, m, p)
        if t is not None:
            out[m] = t[0]
    return out


def poly_add(f: Mapping[Monomial, int], g: Mapping[Monomial, int], scale: int = 1) -> Poly:
    out = dict(f)
    for m, c in g.items():
        v = out.get(m, 0) + scale * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def poly_mul(f: Mapping[Monomial, int], g: Mapping[Monomial, int],
             p: AlgebraPresentation) -> Poly:
    out: Poly = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            prod_ = monomial_mul(m1, m2, p)
            if prod_ is None:
                continue
            sign, m = prod_
            out[m] = out.get(m, 0) + sign * c1 * c2
    return reduce_poly(out, p)


def _raw_monomials(p: AlgebraPresentation, s: int, t: int) -> list[Monomial]:
    gens = p.generators
    n = len(gens)
    out = []
    cur = [0] * n

    def rec(i, rs, rt):
        if rs > 0 or rt < 0:
            return
        if i == n:
            if rs == 0 and rt == 0:
                out.append(tuple(cur))
            return
        g = gens[i]
        if g.kind == EXTERIOR:
            bound = 1
        else:
            bounds = []
            if g.column < 0:
                bounds.append(rs // g.column)
            if g.row > 0:
                bounds.append(rt // g.row)
            if not bounds:
                raise ValueError(f"generator {g.name} has bidegree (0,0) and is not exterior")
            bound = min(bounds)
        for e in range(bound + 1):
            cur[i] = e
            rec(i + 1, rs - e * g.column, rt - e * g.row)
        cur[i] = 0

    rec(0, s, t)
    return out


def enumerate_basis(p: AlgebraPresentation, s: int, t: int) -> list[Monomial]:
    """Nonzero normal-form monomials of bidegree ``(s, t)``, graded-lex ordered."""
    if p.has_laurent:
        raise ValueError("presentations with laurent generators have infinite bases")
    out = [m for m in _raw_monomials(p, s, t)
           if not is_killed(m, p) and torsion_order(m, p) != 1]
    return sorted(out, key=_graded_lex)


def killed_monomials(p: AlgebraPresentation, s: int, t: int) -> list[Monomial]:
    """Monomials of bidegree ``(s, t)`` that vanish (exterior exponents <= 1)."""
    out = [m for m in _raw_monomials(p, s, t)
           if is_killed(m, p) or torsion_order(m, p) == 1]
    return sorted(out, key=_graded_lex)


def validate_presentation(p: AlgebraPresentation, dimension: int | None = None) -> list[str]:
    """Diagnostics for ``p``; an empty list means the presentation is usable."""
    problems = []
    seen = {}
    n = len(p.generators)
    for i, g in enumerate(p.generators):
        where = f"generator {i} ({g.name})"
        if not _NAME.match(g.name):
            problems.append(f"{where}: invalid name")
        if g.name in seen:
            problems.append(f"{where}: duplicate of generator {seen[g.name]}")
        seen.setdefault(g.name, i)
        if g.kind not in KINDS:
            problems.append(f"{where}: unknown kind {g.kind!r}")
            continue
        if g.column > 0:
            problems.append(f"{where}: column {g.column} is positive")
        if g.row < 0:
            problems.append(f"{where}: row {g.row} is negative")
        if dimension is not None and g.column < -dimension:
            problems.append(f"{where}: column {g.column} is below -{dimension}")
        if g.kind == LAURENT and g.total_degree != 0:
            problems.append(f"{where}: laurent generator must have total degree 0")
        if g.kind == POLYNOMIAL and g.bidegree == (0, 0):
            problems.append(f"{where}: polynomial generator in bidegree (0,0)")
        if g.kind == EXTERIOR and not g.is_odd:
            square = tuple(2 if j == i else 0 for j in range(n))
            has_trunc = any(
                r.is_truncation and len(r.monomial) == n
                and _divides(r.monomial, square, p._laurent)
                for r in p.relations
            )
            if not has_trunc:
                problems.append(
                    f"{where}: exterior generator of even total degree needs a "
                    f"square-zero truncation relation"
                )
    for j, r in enumerate(p.relations):
        where = f"relation {j}"
        if len(r.monomial) != n:
            problems.append(f"{where}: monomial has {len(r.monomial)} exponents, expected {n}")
            continue
        if r.coefficient < 0 or r.coefficient == 1:
            problems.append(f"{where}: coefficient {r.coefficient} must be 0 or >= 2")
        for i, e in enumerate(r.monomial):
            g = p.generators[i]
            if e < 0 and g.kind != LAURENT:
                problems.append(f"{where}: negative exponent on {g.name}")
            square = r.is_truncation and e == 2 and sum(r.monomial) == 2
            if e > 1 and g.kind == EXTERIOR and not square:
                problems.append(f"{where}: exponent {e} on exterior generator {g.name}")
        if not any(r.monomial) and r.coefficient == 0:
            problems.append(f"{where}: kills the unit")
    return problems


def check_presentation(p: AlgebraPresentation, dimension: int | None = None) -> None:
    problems = validate_presentation(p, dimension)
    if problems:
        raise PresentationError(problems)
