"""Reader for the line-oriented model format.

::

    # comment
    dim 2*n
    base c (-2,0) polynomial
    fiber y (0,1) exterior
    fiber u (0,2*n) polynomial
    rel 0 c^(n+1)
    diff r=2*n d(y) = n+1 c^n*u
    bound 6*n

Integer fields accept arithmetic in the variables passed to :func:`parse`
(``n`` for the built-in templates).  ``bound`` is optional and gives the
total degree through which a candidate presentation is compared.  Several
``diff`` lines for the same page and generator add up.
"""

from __future__ import annotations

import ast
import operator
import re
from dataclasses import dataclass, field

from .algebra import (
    AlgebraPresentation,
    GeneratorDecl,
    KINDS,
    Monomial,
    Relation,
    validate_presentation,
)
from .engine import DifferentialSpec, validate_spec


class ModelSyntaxError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.FloorDiv: operator.floordiv,
}


def eval_int(text: str, variables: dict[str, int] | None = None) -> int:
    """Evaluate an integer expression built from literals, names, + - * //."""
    variables = variables or {}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in variables:
                raise ValueError(f"unknown variable {node.id!r}")
            return variables[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        raise ValueError(f"bad integer expression {text!r}") from None
    return ev(tree)


def _split_factors(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_monomial(text: str, names: list[str], variables: dict[str, int]) -> Monomial:
    text = text.replace(" ", "")
    exps = [0] * len(names)
    if text == "1":
        return tuple(exps)
    index = {nm: i for i, nm in enumerate(names)}
    for factor in _split_factors(text):
        name, _, exp = factor.partition("^")
        if name not in index:
            raise ValueError(f"unknown generator {name!r}")
        if exp.startswith("(") and exp.endswith(")"):
            exp = exp[1:-1]
        exps[index[name]] += eval_int(exp, variables) if exp else 1
    return tuple(exps)


@dataclass
class ParsedModel:
    dimension: int | None
    presentation: AlgebraPresentation
    base: tuple[str, ...]
    fiber: tuple[str, ...]
    differentials: tuple[DifferentialSpec, ...]
    bound: int | None = None
    source: str = field(default="", repr=False)


_BIDEGREE = r"\(\s*([^,]+?)\s*,\s*([^)]+?)\s*\)"
_GEN = re.compile(rf"(base|fiber)\s+([A-Za-z_]\w*)\s*{_BIDEGREE}\s*(\w+)\Z")
_DIFF = re.compile(r"diff\s+r\s*=\s*(.+?)\s+d\s*\(\s*([A-Za-z_]\w*)\s*\)\s*=\s*(\S+)\s+(.+)\Z")


def parse(text: str, variables: dict[str, int] | None = None) -> ParsedModel:
    """Parse model text; every error carries the offending line number."""
    variables = dict(variables or {})
    dimension = None
    bound = None
    gens: list[GeneratorDecl] = []
    roles: dict[str, str] = {}
    raw_rels: list[tuple[int, str, str]] = []
    raw_diffs: list[tuple[int, str, str, str, str]] = []
    gen_line: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword = line.split(None, 1)[0]
        try:
            if keyword == "dim":
                dimension = eval_int(line[3:], variables)
                if dimension < 1:
                    raise ValueError("dimension must be positive")
            elif keyword == "bound":
                bound = eval_int(line[5:], variables)
            elif keyword in ("base", "fiber"):
                m = _GEN.match(line)
                if not m:
                    raise ValueError(f"expected '{keyword} <name> (<s>,<t>) <kind>'")
                role, name, s, t, kind = m.groups()
                if kind not in KINDS or (role == "base" and kind == "laurent"):
                    raise ValueError(f"invalid kind {kind!r} for {role} generator")
                col, row = eval_int(s, variables), eval_int(t, variables)
                if role == "fiber" and col != 0:
                    raise ValueError("fiber generators live in column 0")
                if name in roles:
                    raise ValueError(f"generator {name!r} declared twice")
                gens.append(GeneratorDecl(name, col, row, kind))
                roles[name] = role
                gen_line[name] = lineno
            elif keyword == "rel":
                parts = line.split(None, 2)
                if len(parts) != 3:
                    raise ValueError("expected 'rel <coef> <monomial>'")
                raw_rels.append((lineno, parts[1], parts[2]))
            elif keyword == "diff":
                m = _DIFF.match(line)
                if not m:
                    raise ValueError("expected 'diff r=<r> d(<gen>) = <coef> <monomial>'")
                raw_diffs.append((lineno,) + m.groups())
            else:
                raise ValueError(f"unknown keyword {keyword!r}")
        except ValueError as exc:
            raise ModelSyntaxError(lineno, str(exc)) from None

    names = [g.name for g in gens]
    relations = []
    for lineno, coef, mono in raw_rels:
        try:
            relations.append(Relation(eval_int(coef, variables),
                                      parse_monomial(mono, names, variables)))
        except ValueError as exc:
            raise ModelSyntaxError(lineno, str(exc)) from None
    p = AlgebraPresentation(tuple(gens), tuple(relations))
    problems = validate_presentation(p, dimension)
    if problems:
        first = problems[0]
        m = re.match(r"(generator|relation) (\d+)", first)
        if m and m.group(1) == "generator":
            lineno = gen_line[names[int(m.group(2))]]
        elif m:
            lineno = raw_rels[int(m.group(2))][0]
        else:
            lineno = 0
        raise ModelSyntaxError(lineno, "; ".join(problems))

    assignments: dict[int, dict[str, dict]] = {}
    diff_line: dict[int, int] = {}
    for lineno, r, gen, coef, mono in raw_diffs:
        try:
            rr = eval_int(r, variables)
            if gen not in names:
                raise ValueError(f"unknown generator {gen!r}")
            c = eval_int(coef, variables)
            mon = parse_monomial(mono, names, variables)
        except ValueError as exc:
            raise ModelSyntaxError(lineno, str(exc)) from None
        target = assignments.setdefault(rr, {}).setdefault(gen, {})
        target[mon] = target.get(mon, 0) + c
        if target[mon] == 0:
            del target[mon]
        diff_line.setdefault(rr, lineno)
    specs = []
    for rr in sorted(assignments):
        spec = DifferentialSpec(rr, assignments[rr])
        problems = validate_spec(spec, p)
        if problems:
            raise ModelSyntaxError(diff_line[rr], "; ".join(problems))
        specs.append(spec)

    return ParsedModel(
        dimension=dimension,
        presentation=p,
        base=tuple(n for n in names if roles[n] == "base"),
        fiber=tuple(n for n in names if roles[n] == "fiber"),
        differentials=tuple(specs),
        bound=bound,
        source=text,
    )


def dumps(parsed: ParsedModel) -> str:
    """Write a model back out in the same format (no variables)."""
    p = parsed.presentation
    lines = []
    if parsed.dimension is not None:
        lines.append(f"dim {parsed.dimension}")
    for g in p.generators:
        role = "fiber" if g.name in parsed.fiber else "base"
        lines.append(f"{role} {g.name} ({g.column},{g.row}) {g.kind}")
    for r in p.relations:
        lines.append(f"rel {r.coefficient} {p.format_monomial(r.monomial)}")
    for spec in parsed.differentials:
        for gen, target in spec.assignments.items():
            for m, c in target.items():
                lines.append(f"diff r={spec.r} d({gen}) = {c} {p.format_monomial(m)}")
    if parsed.bound is not None:
        lines.append(f"bound {parsed.bound}")
    return "\n".join(lines) + "\n"
