"""Text charts, SVG charts and JSON for pages."""

from __future__ import annotations

import json
from html import escape

from .engine import DifferentialSpec, Page, differential_matrix


def _label(page: Page, s: int, t: int) -> str:
    c = page.cell(s, t)
    if c is None or c.group.is_zero():
        return "."
    return str(c.group).replace(" ", "") + ("" if c.reliable else "?")


def differential_arrows(page: Page, spec: DifferentialSpec | None):
    """``(source, target, matrix)`` for every d_r between nonzero reliable cells.

    Only pages with a nonzero spec get arrows; zero matrices are kept so the
    chart can show the x0 arrows.
    """
    if spec is None or spec.is_zero() or spec.r != page.r:
        return []
    out = []
    for c in page.nonzero_cells():
        key = (c.s - spec.r, c.t + spec.r - 1)
        tgt = page.cell(*key)
        if not c.reliable or tgt is None or tgt.group.is_zero() or not tgt.reliable:
            continue
        out.append(((c.s, c.t), key, differential_matrix(page, spec, c.s, c.t)))
    return out


def _multiplicity(matrix) -> str:
    if matrix.shape == (1, 1):
        return f"×{matrix[0, 0]}"
    return "×" + json.dumps(matrix.to_rows(), separators=(",", ":"))


def page_json(page: Page, spec: DifferentialSpec | None = None) -> dict:
    p = page.presentation
    cells = []
    for c in page.nonzero_cells():
        if not c.reliable:
            continue
        cells.append({
            "s": c.s,
            "t": c.t,
            "rank": c.group.rank,
            "torsion": list(c.group.torsion),
            "basis": [p.format_poly(f) for f in c.basis_reps],
        })
    diffs = [
        {"from": list(src), "to": list(tgt), "matrix": m.to_rows()}
        for src, tgt, m in differential_arrows(page, spec)
    ]
    return {
        "r": page.r,
        "window": {"d": page.d, "t_max": page.t_max},
        "cells": cells,
        "differentials": diffs,
    }


def emit_json(page: Page, spec: DifferentialSpec | None = None) -> str:
    return json.dumps(page_json(page, spec))


def render_chart(page: Page, spec: DifferentialSpec | None = None) -> str:
    """Text chart: columns s = -d..0 left to right, t growing upwards."""
    name = "E^inf" if page.infinity else f"E^{page.r}"
    cols = list(range(-page.d, 1))
    labels = {(s, t): _label(page, s, t) for s in cols for t in range(page.t_max + 1)}
    width = max([len(x) for x in labels.values()] + [len(str(s)) for s in cols]) + 2
    lines = [f"{name} page  (d = {page.d}, t_max = {page.t_max})"]
    tw = max(len(str(page.t_max)), 3)
    for t in range(page.t_max, -1, -1):
        row = "".join(labels[(s, t)].rjust(width) for s in cols)
        lines.append(f"{str(t).rjust(tw)} |{row}")
    lines.append(" " * tw + " +" + "-" * (width * len(cols)))
    lines.append(" " * tw + "  " + "".join(str(s).rjust(width) for s in cols))
    arrows = differential_arrows(page, spec)
    if arrows:
        lines.append(f"d_{page.r} differentials:")
        for src, tgt, m in arrows:
            lines.append(f"  {src} -> {tgt}  {_multiplicity(m)}")
    if any(not c.reliable for c in page.cells.values()):
        lines.append("? = edge cell, not reliable at this page")
    return "\n".join(lines) + "\n"


def render_svg(page: Page, spec: DifferentialSpec | None = None) -> str:
    cols = list(range(-page.d, 1))
    cw, rh, margin = 60, 22, 40
    width = margin * 2 + cw * len(cols)
    height = margin * 2 + rh * (page.t_max + 1)

    def xy(s, t):
        return (margin + (s + page.d) * cw + cw / 2, height - margin - t * rh - rh / 2)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="monospace" font-size="11">',
        '<defs><marker id="h" markerWidth="6" markerHeight="6" refX="5" refY="3" '
        'orient="auto"><path d="M0,0 L6,3 L0,6 z"/></marker></defs>',
    ]
    for s in cols:
        x, _ = xy(s, 0)
        parts.append(f'<text x="{x}" y="{height - margin / 3}" text-anchor="middle">{s}</text>')
    for c in page.nonzero_cells():
        x, y = xy(c.s, c.t)
        parts.append(f'<text x="{x}" y="{y + 4}" text-anchor="middle">'
                     f'{escape(_label(page, c.s, c.t))}</text>')
    for src, tgt, m in differential_arrows(page, spec):
        (x1, y1), (x2, y2) = xy(*src), xy(*tgt)
        parts.append(f'<line x1="{x1 - 10}" y1="{y1 - 4}" x2="{x2 + 14}" y2="{y2 + 2}" '
                     f'stroke="black" marker-end="url(#h)"/>')
        parts.append(f'<text x="{(x1 + x2) / 2}" y="{(y1 + y2) / 2 - 3}" '
                     f'text-anchor="middle">{escape(_multiplicity(m))}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_summary(page: Page) -> str:
    name = "E^inf" if page.infinity else f"E^{page.r}"
    p = page.presentation
    lines = [f"{name} (d = {page.d}, t_max = {page.t_max})"]
    for c in page.nonzero_cells():
        reps = ", ".join(p.format_poly(f) for f in c.basis_reps)
        flag = "" if c.reliable else "  [unreliable]"
        lines.append(f"  ({c.s},{c.t}) total {c.s + c.t}: {c.group}  <{reps}>{flag}")
    return "\n".join(lines) + "\n"
