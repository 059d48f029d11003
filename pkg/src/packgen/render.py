"""SVG pictures of packings, coloured by contact count or Voronoi side count."""

import enum
from pathlib import Path

import numpy as np
import shapely

from . import geometry
from .analysis import contact_graph, voronoi_cells
from .packer import PackingResult

# one colour per count 4..9; lower counts share the first, higher the last
PALETTE = ("#4daf4a", "#377eb8", "#ffffff", "#e41a1c", "#984ea3", "#ff7f00")
PALETTE_MIN = 4
CANVAS = 600.0
MARGIN = 20.0
LEGEND_WIDTH = 90.0


class RenderMode(str, enum.Enum):
    CONTACTS = "contacts"
    VORONOI = "voronoi"


def bucket(count: int) -> int:
    return min(max(count, PALETTE_MIN), PALETTE_MIN + len(PALETTE) - 1)


def colour(count: int) -> str:
    return PALETTE[bucket(count) - PALETTE_MIN]


def _label(b: int) -> str:
    if b == PALETTE_MIN:
        return f"&lt;={b}"
    if b == PALETTE_MIN + len(PALETTE) - 1:
        return f"&gt;={b}"
    return str(b)


class _View:
    def __init__(self, bounds):
        x0, y0, x1, y1 = bounds
        self.scale = (CANVAS - 2 * MARGIN) / max(x1 - x0, y1 - y0)
        self.x0, self.y1 = x0, y1
        self.height = 2 * MARGIN + self.scale * (y1 - y0)
        self.width = 2 * MARGIN + self.scale * (x1 - x0) + LEGEND_WIDTH

    def xy(self, p) -> str:
        x = MARGIN + self.scale * (p[0] - self.x0)
        y = MARGIN + self.scale * (self.y1 - p[1])
        return f"{x:.4f},{y:.4f}"

    def path(self, rings) -> str:
        parts = []
        for ring in rings:
            pts = np.asarray(ring)
            parts.append("M" + " L".join(self.xy(p) for p in pts) + " Z")
        return " ".join(parts)


def _polygons(geom):
    if geom.is_empty:
        return []
    if isinstance(geom, shapely.Polygon):
        return [geom]
    return [g for g in getattr(geom, "geoms", []) if isinstance(g, shapely.Polygon)]


def svg_text(result: PackingResult, mode: RenderMode | str = RenderMode.CONTACTS) -> str:
    mode = RenderMode(mode)
    rings = geometry.outline(result.spec, geometry.SMOOTH_SAMPLES)
    allpts = np.vstack(rings)
    view = _View((*allpts.min(axis=0), *allpts.max(axis=0)))
    centers = np.asarray(result.centers, dtype=float).reshape(-1, 2)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{view.width:.0f}" height="{view.height:.0f}" '
        f'viewBox="0 0 {view.width:.4f} {view.height:.4f}">',
        f"<!-- {result.spec} N={result.n} rho={result.rho!r} -->",
    ]
    present = set()
    if mode is RenderMode.VORONOI:
        out.append('<g id="cells" stroke="#000000" stroke-width="0.5">')
        for cell in voronoi_cells(result):
            present.add(bucket(cell.sides))
            for poly in _polygons(cell.polygon):
                d = view.path([np.asarray(poly.exterior.coords)[:-1], *(np.asarray(h.coords)[:-1] for h in poly.interiors)])
                out.append(f'<path class="cell" data-sides="{cell.sides}" fill="{colour(cell.sides)}" fill-rule="evenodd" d="{d}"/>')
        out.append("</g>")
        out.append('<g id="centers" fill="#000000">')
        for c in centers:
            x, y = view.xy(c).split(",")
            out.append(f'<circle cx="{x}" cy="{y}" r="1.5"/>')
        out.append("</g>")
    else:
        counts = [0] * result.n
        if result.n:
            g = contact_graph(result)
            counts = [g.total(i) for i in range(result.n)]
        out.append('<g id="disks" stroke="#000000" stroke-width="0.5">')
        rad = result.r * view.scale
        for c, k in zip(centers, counts):
            present.add(bucket(k))
            x, y = view.xy(c).split(",")
            out.append(f'<circle class="disk" data-count="{k}" cx="{x}" cy="{y}" r="{rad:.4f}" fill="{colour(k)}"/>')
        out.append("</g>")
    out.append(f'<path id="boundary" fill="none" stroke="#000000" stroke-width="1" fill-rule="evenodd" d="{view.path(rings)}"/>')
    lx = view.width - LEGEND_WIDTH + 10
    out.append('<g id="legend" font-family="sans-serif" font-size="12">')
    for row, b in enumerate(sorted(present)):
        y = MARGIN + 20 * row
        out.append(
            f'<rect x="{lx:.1f}" y="{y:.1f}" width="14" height="14" fill="{colour(b)}" stroke="#000000" stroke-width="0.5"/>'
            f'<text x="{lx + 20:.1f}" y="{y + 12:.1f}">{_label(b)}</text>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(result: PackingResult, mode: RenderMode | str, path) -> None:
    Path(path).write_text(svg_text(result, mode))
