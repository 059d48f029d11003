"""Post-hoc analysis of packings: contacts, clipped Voronoi cells, topological
charge, rectangle peak predictions and the large-N scaling fit."""

import enum
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import shapely
from scipy.spatial import Delaunay, QhullError

from . import geometry
from .geometry import DomainSpec
from .packer import HEX_DENSITY, PackingResult

CONTACT_TOL = 1e-6
VORONOI_SEGMENTS = 4096
EDGE_TOL_REL = 1e-6  # Voronoi edges shorter than this times r are treated as points


class DegenerateSites(ValueError):
    """Two Voronoi sites coincide."""


class InsufficientData(ValueError):
    pass


def packing_fraction(spec: DomainSpec, n: int, r: float) -> float:
    return n * math.pi * r * r / geometry.area(spec)


# ---------------------------------------------------------------------------
# contacts


@dataclass
class ContactGraph:
    disk_contacts: list[int]
    border_contacts: list[int]
    adjacency: list[list[int]]

    def total(self, i: int) -> int:
        return self.disk_contacts[i] + self.border_contacts[i]

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nb in enumerate(self.adjacency) for j in nb if i < j]


def contact_graph(result: PackingResult, contact_tol: float = CONTACT_TOL) -> ContactGraph:
    """Disk-disk and disk-border contacts within ``contact_tol * r``.

    Border contacts are counted per distinct nearest boundary point, so a
    disk wedged into a rectangle corner has two, and an annulus disk touching
    both circles has two.
    """
    c = np.asarray(result.centers, dtype=float)
    n, r = len(c), result.r
    tol = contact_tol * r
    adjacency: list[list[int]] = [[] for _ in range(n)]
    if n > 1:
        d = np.hypot(c[:, None, 0] - c[None, :, 0], c[:, None, 1] - c[None, :, 1])
        ii, jj = np.nonzero(np.abs(d - 2 * r) <= tol)
        for i, j in zip(ii, jj):
            if i != j:
                adjacency[i].append(int(j))
    border = [0] * n
    if n:
        hits = geometry.boundary_hits(result.spec, c, window=2 * tol)
        touching = np.abs(hits.dist - r) <= tol
        for i in hits.owner[touching]:
            border[i] += 1
    return ContactGraph([len(a) for a in adjacency], border, adjacency)


# ---------------------------------------------------------------------------
# Voronoi


@dataclass
class VoronoiCell:
    index: int
    neighbors: list[int]
    sides: int  # Voronoi neighbours plus border arcs
    arcs: int
    charge: int
    polygon: object = field(default=None, repr=False)  # shapely geometry of the clipped cell


def domain_polygon(spec: DomainSpec, segments: int = VORONOI_SEGMENTS):
    rings = geometry.outline(spec, segments)
    return shapely.Polygon(rings[0], rings[1:])


def _clip(poly, labels, normal, offset, label):
    """Clip a convex polygon to {x : normal . x <= offset}, tracking edge labels.

    ``labels[k]`` names the edge from vertex k to vertex k+1.
    """
    side = poly @ normal - offset
    if np.all(side <= 0):
        return poly, labels
    out, out_labels = [], []
    m = len(poly)
    for k in range(m):
        p, q = poly[k], poly[(k + 1) % m]
        sp, sq = side[k], side[(k + 1) % m]
        if sp <= 0:
            out.append(p)
            out_labels.append(labels[k])
        if (sp <= 0) != (sq <= 0):
            x = p + (q - p) * (sp / (sp - sq))
            out.append(x)
            out_labels.append(labels[k] if sp > 0 else label)
    return np.array(out).reshape(-1, 2), out_labels


def _candidates(c: np.ndarray) -> list[set[int]]:
    n = len(c)
    try:
        tri = Delaunay(c)
    except (QhullError, ValueError):
        return [set(range(n)) - {i} for i in range(n)]
    indptr, indices = tri.vertex_neighbor_vertices
    return [set(indices[indptr[i] : indptr[i + 1]].tolist()) for i in range(n)]


def voronoi_cells(result: PackingResult, edge_tol: float | None = None) -> list[VoronoiCell]:
    """Voronoi diagram of the centres clipped to the (polygonised) domain.

    A neighbour counts when the shared Voronoi edge keeps a positive length
    inside the domain; a border arc counts once per boundary ring that the
    cell boundary follows over a positive length.
    """
    c = np.asarray(result.centers, dtype=float)
    n = len(c)
    spec = result.spec
    if edge_tol is None:
        edge_tol = EDGE_TOL_REL * result.r
    if n > 1:
        d = np.hypot(c[:, None, 0] - c[None, :, 0], c[:, None, 1] - c[None, :, 1])
        np.fill_diagonal(d, np.inf)
        if d.min() <= 1e-12:
            i, j = np.unravel_index(np.argmin(d), d.shape)
            raise DegenerateSites(f"sites {min(i, j)} and {max(i, j)} coincide")
    dom = domain_polygon(spec)
    rings = [dom.exterior, *dom.interiors]
    x0, y0, x1, y1 = dom.bounds
    pad = geometry.diameter(spec)
    box = np.array([[x0 - pad, y0 - pad], [x1 + pad, y0 - pad], [x1 + pad, y1 + pad], [x0 - pad, y1 + pad]])
    cands = _candidates(c) if n > 1 else [set()]
    cells = []
    for i in range(n):
        poly, labels = box, [-1] * 4
        for j in sorted(cands[i]):
            normal = c[j] - c[i]
            offset = 0.5 * float(normal @ (c[j] + c[i]))
            poly, labels = _clip(poly, labels, normal, offset, j)
        cell = shapely.Polygon(poly)
        neighbors = set()
        for k, lab in enumerate(labels):
            if lab < 0 or lab in neighbors:
                continue
            seg = shapely.LineString([poly[k], poly[(k + 1) % len(poly)]])
            if seg.intersection(dom).length > edge_tol:
                neighbors.add(lab)
        arcs = sum(1 for ring in rings if ring.intersection(cell).length > edge_tol)
        sides = len(neighbors) + arcs
        cells.append(
            VoronoiCell(
                index=i,
                neighbors=sorted(neighbors),
                sides=sides,
                arcs=arcs,
                charge=6 - sides - arcs,
                polygon=cell.intersection(dom),
            )
        )
    return cells


def total_topological_charge(cells) -> int:
    return sum(cell.charge for cell in cells)


def charge_census(cells) -> tuple[Counter, int]:
    """Cells grouped by side count, plus the total number of border arcs."""
    return Counter(cell.sides for cell in cells), sum(cell.arcs for cell in cells)


def census_charge(census: Counter, arcs: int) -> int:
    """Total charge rebuilt from the census: sum of (6 - sides) less one per arc."""
    return sum((6 - sides) * count for sides, count in census.items()) - arcs


# ---------------------------------------------------------------------------
# rectangle peaks


class PeakCase(str, enum.Enum):
    ODD_ROWS = "OddRows"
    EVEN_ROWS = "EvenRows"
    DIVISOR = "DivisorCase"


@dataclass(frozen=True)
class RectPeak:
    l: int  # noqa: E741 - row count
    case: PeakCase
    a: float
    rho: float

    @property
    def r(self) -> float:
        """Radius of l hexagonally stacked rows spanning the height 2."""
        return 2.0 / (2.0 + (self.l - 1) * math.sqrt(3.0))


def rect_peaks(n: int, l_max: int) -> list[RectPeak]:
    """Aspect ratios where l hexagonal rows of disks fill the rectangle exactly."""
    if n < 1 or l_max < 1:
        raise ValueError("n and l_max must be >= 1")
    s3 = math.sqrt(3.0)
    out = []
    for l in range(1, l_max + 1):  # noqa: E741
        h = 2.0 + (l - 1) * s3
        cases = []
        if l % 2 == 1 and (n + (l - 1) // 2) % l == 0:
            cases.append((PeakCase.ODD_ROWS, 2 * n + l - 1))
        if l % 2 == 0 and (n + l // 2) % l == 0:
            cases.append((PeakCase.EVEN_ROWS, 2 * n + l))
        if n % l == 0:
            cases.append((PeakCase.DIVISOR, 2 * n + l))
        for case, width in cases:
            out.append(RectPeak(l, case, width / (l * h), n * l * math.pi / (width * h)))
    return out


def unique_peak_ratios(peaks, tol: float = 1e-12) -> list[float]:
    out: list[float] = []
    for a in sorted(p.a for p in peaks):
        if not out or a - out[-1] > tol:
            out.append(a)
    return out


# ---------------------------------------------------------------------------
# hexagonal numbers and scaling


def hexagonal_numbers(k_max: int) -> list[int]:
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    return [3 * k * (k + 1) + 1 for k in range(1, k_max + 1)]


@dataclass(frozen=True)
class ScalingFit:
    kappa: float
    rms: float
    samples: tuple[tuple[int, float], ...]


def fit_kappa(samples) -> ScalingFit:
    """Least-squares kappa in  pi/sqrt(12) - rho = kappa * N**(-1/4)  (no intercept)."""
    samples = tuple((int(n), float(rho)) for n, rho in samples)
    if len(samples) < 2:
        raise InsufficientData(f"need at least 2 samples, got {len(samples)}")
    if any(n < 1 for n, _ in samples):
        raise InsufficientData("every sample needs N >= 1")
    x = np.array([n**-0.25 for n, _ in samples])
    y = HEX_DENSITY - np.array([rho for _, rho in samples])
    kappa = float(x @ y / (x @ x))
    rms = float(np.sqrt(np.mean((y - kappa * x) ** 2)))
    return ScalingFit(kappa, rms, samples)


def report(result: PackingResult, contact_tol: float = CONTACT_TOL) -> list[str]:
    """Key-value text lines describing contacts and Voronoi charges."""
    lines = [
        f"domain {result.spec}",
        f"N {result.n}",
        f"r {result.r!r}",
        f"rho {result.rho!r}",
    ]
    g = contact_graph(result, contact_tol)
    for i in range(result.n):
        lines.append(f"disk {i} contacts {g.disk_contacts[i]} border {g.border_contacts[i]}")
    if result.n >= 2:
        cells = voronoi_cells(result)
        for cell in cells:
            lines.append(f"cell {cell.index} sides {cell.sides} arcs {cell.arcs} charge {cell.charge}")
        census, arcs = charge_census(cells)
        for sides in sorted(census):
            lines.append(f"census sides {sides} cells {census[sides]}")
        lines.append(f"border_arcs {arcs}")
        lines.append(f"total_charge {total_topological_charge(cells)}")
    return lines
