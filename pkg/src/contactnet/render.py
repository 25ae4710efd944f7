"""SVG figures for vertex layouts and cluster quotient graphs.

Output is plain SVG 1.1 text with coordinates rounded to 3 decimals, so
identical inputs give byte-identical documents.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .community import ClusterGraph
from .errors import MissingPositions
from .graph import ContactGraph
from .mixing import covariate_labels

PALETTE = {"F": "#d6604d", "HM": "#4393c3", "MSM": "#5aae61", "U": "#9e9e9e"}
CATEGORY_NAMES = {"F": "Women", "HM": "Heterosexual men", "MSM": "MSM", "U": "Unknown"}
GROUP_FILL = {"typical": "#ffffff", "msm": "#5aae61", "mixed": "#d6604d", "atypical": "#808080"}
DEFAULT_FILL = "#9e9e9e"
WIDTH = 800
MARGIN = 60


def _f(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _fit(coords: np.ndarray, pad: float) -> np.ndarray:
    """Map coordinates into the square canvas, keeping the aspect ratio."""
    z = np.asarray(coords, dtype=np.float64)
    if len(z) == 0:
        return z
    lo, hi = z.min(axis=0), z.max(axis=0)
    span = float(max((hi - lo).max(), 1e-12))
    scale = (WIDTH - 2 * pad) / span
    centre = (lo + hi) / 2
    return (z - centre) * scale + WIDTH / 2


def _header(height: int = WIDTH) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="#ffffff"/>',
    ]


def _legend(entries: Sequence[tuple[str, str]], stroke: str | None = None) -> list[str]:
    out = ['<g id="legend" font-family="sans-serif" font-size="12">']
    for k, (label, color) in enumerate(entries):
        y = 14 + 18 * k
        extra = f' stroke="{stroke}"' if stroke else ""
        out.append(f'<rect x="10" y="{y}" width="12" height="12" fill="{color}"{extra}/>')
        out.append(f'<text x="28" y="{y + 10}">{escape(label)}</text>')
    out.append("</g>")
    return out


def render_vertex_svg(g: ContactGraph, pos, covariate: str | None = "orientation") -> str:
    """One line per edge and one circle per vertex coloured by covariate class."""
    coords = np.asarray(getattr(pos, "coordinates", pos), dtype=np.float64)
    if coords.shape != (g.n, 2):
        raise MissingPositions("need one planar position per vertex")
    xy = _fit(coords, MARGIN / 2)
    labels: list[str | None] = [None] * g.n
    if covariate is not None:
        try:
            labels = covariate_labels(g, covariate)
        except Exception:
            labels = [None] * g.n
    out = _header()
    out.append('<g id="edges" stroke="#bdbdbd" stroke-width="0.6">')
    for a, b in g.edges:
        out.append(f'<line x1="{_f(xy[a, 0])}" y1="{_f(xy[a, 1])}" x2="{_f(xy[b, 0])}" y2="{_f(xy[b, 1])}"/>')
    out.append("</g>")
    out.append('<g id="vertices" stroke="#333333" stroke-width="0.3">')
    for i in range(g.n):
        fill = PALETTE.get(labels[i], DEFAULT_FILL) if labels[i] is not None else DEFAULT_FILL
        out.append(f'<circle cx="{_f(xy[i, 0])}" cy="{_f(xy[i, 1])}" r="3" fill="{fill}"/>')
    out.append("</g>")
    present = sorted({x for x in labels if x is not None})
    if present:
        out += _legend([(CATEGORY_NAMES.get(c, c), PALETTE.get(c, DEFAULT_FILL)) for c in present])
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _gray(p: float) -> str:
    """White for p = 1, black for p <= 1e-4, linear in -log10(p) between."""
    x = 4.0 if p <= 0 else min(max(-math.log10(p), 0.0), 4.0)
    level = int(round(255 * (1.0 - x / 4.0)))
    return f"#{level:02x}{level:02x}{level:02x}"


def _pie(cx: float, cy: float, r: float, tally: Mapping[str, int], order: Sequence[str]) -> list[str]:
    total = sum(tally.get(k, 0) for k in order)
    parts = [(k, tally.get(k, 0)) for k in order if tally.get(k, 0) > 0]
    if total == 0:
        return [f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="{DEFAULT_FILL}"/>']
    if len(parts) == 1:
        k = parts[0][0]
        return [f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="{PALETTE.get(k, DEFAULT_FILL)}"/>']
    out = []
    angle = -math.pi / 2
    for k, c in parts:
        sweep = 2 * math.pi * c / total
        x0, y0 = cx + r * math.cos(angle), cy + r * math.sin(angle)
        x1, y1 = cx + r * math.cos(angle + sweep), cy + r * math.sin(angle + sweep)
        large = 1 if sweep > math.pi else 0
        out.append(
            f'<path d="M{_f(cx)},{_f(cy)} L{_f(x0)},{_f(y0)} A{_f(r)},{_f(r)} 0 {large} 1 {_f(x1)},{_f(y1)} Z" '
            f'fill="{PALETTE.get(k, DEFAULT_FILL)}"/>'
        )
        angle += sweep
    return out


def disk_radii(sizes: Sequence[int], r_max: float = 40.0) -> np.ndarray:
    """Radii with disk area proportional to cluster size."""
    s = np.asarray(sizes, dtype=np.float64)
    return r_max * np.sqrt(s / s.max()) if len(s) else s


def render_cluster_svg(
    cg: ClusterGraph,
    pos,
    pvalues: Sequence[float] | None = None,
    groups: Sequence[str] | None = None,
    categories: Sequence[str] = ("F", "HM", "MSM", "U"),
    numbered: bool = True,
) -> str:
    """Quotient-graph figure.

    Disk area follows cluster size.  By default disks are pie charts of
    covariate shares; with ``pvalues`` they are filled on a grey scale
    (white = 1, black = 0) and with ``groups`` by group colour.  Links have
    stroke width proportional to multiplicity; single links are dashed.
    """
    if pos is None:
        raise MissingPositions("cluster positions are required")
    coords = np.asarray(getattr(pos, "coordinates", pos), dtype=np.float64)
    if coords.shape != (cg.J, 2):
        raise MissingPositions(f"expected {cg.J} cluster positions, got {coords.shape}")
    radii = disk_radii(cg.sizes)
    xy = _fit(coords, MARGIN + (radii.max() if len(radii) else 0))
    out = _header()
    out.append('<g id="links" stroke="#555555" fill="none">')
    for (a, b), w in cg.links.items():
        dash = ' stroke-dasharray="4,3"' if w == 1 else ""
        out.append(
            f'<line x1="{_f(xy[a, 0])}" y1="{_f(xy[a, 1])}" x2="{_f(xy[b, 0])}" y2="{_f(xy[b, 1])}" '
            f'stroke-width="{_f(0.75 * w)}"{dash}/>'
        )
    out.append("</g>")
    out.append('<g id="clusters" stroke="#333333" stroke-width="0.8">')
    for c in range(cg.J):
        cx, cy, r = xy[c, 0], xy[c, 1], radii[c]
        if pvalues is not None:
            out.append(f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="{_gray(pvalues[c])}"/>')
        elif groups is not None:
            fill = GROUP_FILL.get(groups[c], DEFAULT_FILL)
            out.append(f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="{fill}"/>')
        else:
            out.append(f'<g class="pie" id="cluster-{c}">')
            out += _pie(cx, cy, r, cg.tallies[c], categories)
            out.append("</g>")
    out.append("</g>")
    if numbered:
        out.append('<g id="labels" font-family="sans-serif" font-size="10" text-anchor="middle">')
        for c in range(cg.J):
            out.append(f'<text x="{_f(xy[c, 0])}" y="{_f(xy[c, 1] + 3)}">{c}</text>')
        out.append("</g>")
    if pvalues is not None:
        out += _legend([("p = 1", _gray(1.0)), ("p = 0.01", _gray(0.01)), ("p <= 1e-4", _gray(0.0))],
                       stroke="#333333")
    elif groups is not None:
        present = [k for k in ("typical", "msm", "mixed", "atypical") if k in set(groups)]
        out += _legend([(k, GROUP_FILL[k]) for k in present], stroke="#333333")
    else:
        present = [k for k in categories if any(t.get(k, 0) for t in cg.tallies)]
        out += _legend([(CATEGORY_NAMES.get(k, k), PALETTE.get(k, DEFAULT_FILL)) for k in present])
    out.append("</svg>")
    return "\n".join(out) + "\n"
