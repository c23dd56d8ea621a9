"""``loopss compute|verify`` command line front end.

Exit codes: 0 success or PASS, 1 verification FAIL, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import modelfile
from .algebra import AlgebraPresentation
from .engine import DifferentialSpec, WindowError, build_initial_page, turn_page
from .models import (
    ManifoldModel,
    PresentationCandidate,
    assemble_total_degree,
    circle_loop_homology,
    laurent_piece,
    load_expected,
    match_presentation,
    model_from_selector,
    ziller_reference,
)
from .render import emit_json, page_json, render_chart, render_summary, render_svg

log = logging.getLogger("loopss")

EXPECT_ALIASES = {"theorem2-odd-form": "theorem2-odd"}


class InputError(Exception):
    pass


def parse_pages(text: str | None):
    if text is None:
        return None
    lo, sep, hi = text.partition("..")
    try:
        lo = int(lo)
        hi = int(hi) if sep else lo
    except ValueError:
        raise InputError(f"bad page range {text!r}; use R1..R2") from None
    if lo < 2 or hi < lo:
        raise InputError(f"bad page range {text!r}")
    return lo, hi


def _model_n(selector: str) -> int | None:
    kind, _, arg = selector.partition(":")
    return int(arg) if kind in ("sphere", "cpn") else None


def all_pages(model: ManifoldModel, t_max: int):
    """``[(page, spec used to leave it)]`` from E^2 through E^{d+1}."""
    by_r = {s.r: s for s in model.differentials}
    page = build_initial_page(model.presentation, model.dimension, t_max)
    out = []
    while page.r <= model.dimension:
        spec = by_r.get(page.r, DifferentialSpec.zero(page.r))
        out.append((page, spec))
        page = turn_page(page, spec)
    page.infinity = True
    out.append((page, None))
    return out


def _circle_report(fmt: str) -> str:
    p = circle_loop_homology()
    pieces = {j: laurent_piece(p, j) for j in (-1, 0, 1)}
    if fmt == "json":
        return json.dumps({
            "model": "circle",
            "presentation": "Lambda[a] (x) Z[t,t^-1]",
            "generators": [{"name": g.name, "degree": g.total_degree, "kind": g.kind}
                           for g in p.generators],
            "pieces": [{"degree": j, "basis": list(pc.stems), "description": pc.describe()}
                       for j, pc in pieces.items()],
        }) + "\n"
    lines = ["H_*(LS^1) = Lambda[a] (x) Z[t,t^-1]   (a in degree -1, t in degree 0)"]
    for j, pc in pieces.items():
        lines.append(f"  degree {j}: {pc.describe()}")
    return "\n".join(lines) + "\n"


def cmd_compute(args) -> int:
    model = model_from_selector(args.model)
    if isinstance(model, AlgebraPresentation):
        sys.stdout.write(_circle_report(args.format))
        return 0
    d = model.dimension
    t_max = args.tmax if args.tmax is not None else 4 * d + 4
    if t_max < d + 2:
        raise InputError(f"--tmax must be at least d + 2 = {d + 2}")
    pages = all_pages(model, t_max)
    rng = parse_pages(args.pages)
    if rng is not None:
        chosen = [(p, s) for p, s in pages if rng[0] <= p.r <= rng[1]]
        if not chosen:
            raise InputError(f"no pages in range {args.pages}; pages run 2..{d + 1}")
    elif args.format == "chart":
        chosen = [(p, s) for p, s in pages if s is not None and not s.is_zero()]
        chosen.append(pages[-1])
    else:
        chosen = [pages[-1]]

    if args.format == "json":
        if len(chosen) == 1:
            sys.stdout.write(emit_json(*chosen[0]) + "\n")
        else:
            sys.stdout.write(json.dumps([page_json(p, s) for p, s in chosen]) + "\n")
    elif args.format == "chart":
        sys.stdout.write("\n".join(render_chart(p, s) for p, s in chosen))
    else:
        sys.stdout.write("\n".join(render_summary(p) for p, _ in chosen))
    if args.svg:
        page, spec = chosen[0]
        Path(args.svg).write_text(render_svg(page, spec))
    return 0


def _load_candidate(expect: str, n: int | None):
    path = Path(expect)
    if path.suffix == ".model" or path.exists():
        if not path.exists():
            raise InputError(f"no such candidate file {expect}")
        variables = {"n": n} if n is not None else {}
        return expect, modelfile.parse(path.read_text(), variables)
    name = EXPECT_ALIASES.get(expect, expect)
    try:
        return expect, load_expected(name, n)
    except FileNotFoundError:
        raise InputError(f"unknown expected presentation {expect!r}") from None


def cmd_verify(args) -> int:
    model = model_from_selector(args.model)
    n = _model_n(args.model)
    expect = args.expect
    if expect is None:
        expect = {"sphere": "theorem2", "cpn": "theorem3", "circle": "circle"}.get(
            args.model.partition(":")[0])
        if expect is None:
            raise InputError("--expect is required for custom models")
    if expect == "theorem2":
        if n is None:
            raise InputError("theorem2 applies to sphere models")
        expect = "theorem2-odd" if n % 2 else "theorem2-even"
    label, cand = _load_candidate(expect, n)

    if isinstance(model, AlgebraPresentation):
        ok = (cand.presentation.generators == model.generators
              and set(cand.presentation.relations) == set(model.relations))
        print(f"circle vs {label}: {'PASS' if ok else 'FAIL: presentations differ'}")
        return 0 if ok else 1

    d = model.dimension
    if cand.dimension is not None and cand.dimension != d:
        raise InputError(f"candidate is for dimension {cand.dimension}, model has {d}")
    bound = args.bound if args.bound is not None else (
        cand.bound if cand.bound is not None else 3 * d)
    t_max = args.tmax if args.tmax is not None else bound + 2 * d + 2
    if t_max < d + 2:
        raise InputError(f"--tmax must be at least d + 2 = {d + 2}")
    einf = model.e_infinity(t_max)
    verdict = match_presentation(einf, PresentationCandidate(cand.presentation, bound, label))
    print(f"{model.name} vs {label} through total degree {bound}: {verdict}")
    ok = verdict.passed
    if args.model.startswith("cpn:"):
        bad = []
        for k in range(0, bound + 1):
            try:
                got = assemble_total_degree(einf, k - d)
            except WindowError:
                break
            want = ziller_reference(n, k)
            if (got.rank, got.torsion_order) != (want.rank, want.torsion_order):
                bad.append(f"H_{k}: E^inf gives {got}, reference {want}")
        if bad:
            ok = False
            print("Ziller comparison: FAIL\n  " + "\n  ".join(bad))
        else:
            print(f"Ziller comparison through H_{bound}: PASS")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loopss", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("compute", "verify"):
        sp = sub.add_parser(name)
        sp.add_argument("--model", required=True,
                        help="sphere:N | cpn:N | circle | custom:PATH")
        sp.add_argument("--tmax", type=int, help="top fiber degree t of the window")
        if name == "compute":
            sp.add_argument("--format", choices=("json", "chart", "summary"), default="summary")
            sp.add_argument("--pages", help="page range R1..R2")
            sp.add_argument("--svg", help="also write an SVG chart of the first page shown")
        else:
            sp.add_argument("--expect", help="theorem2 | theorem2-odd | theorem2-even | "
                                             "theorem2-odd-form | theorem3 | circle | PATH")
            sp.add_argument("--bound", type=int, help="total degree bound for the comparison")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "compute":
            return cmd_compute(args)
        return cmd_verify(args)
    except (InputError, ValueError, OSError) as exc:
        print(f"loopss: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
