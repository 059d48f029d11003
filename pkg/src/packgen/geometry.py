"""Parametric containers: coordinate maps, containment and nearest-boundary queries.

Every container is described by a :class:`DomainSpec` (family plus one shape
parameter ``a``).  Points are handled as ``(N, 2)`` float arrays; the scalar
helpers at the bottom of the module wrap the vectorised kernels.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import _kernels

K_MAX = 8
SMOOTH_SAMPLES = 1024
TIE_TOL_REL = 1e-9



class Family(str, enum.Enum):
    RECTANGLE = "rect"
    CROSS = "cross"
    ELLIPSE = "ellipse"
    CIRCLE_CARDIOID = "cardioid"
    ANNULUS = "annulus"


class Component(enum.IntEnum):
    OUTER = 0
    INNER = 1


_ALIASES = {
    "rect": Family.RECTANGLE,
    "rectangle": Family.RECTANGLE,
    "cross": Family.CROSS,
    "ellipse": Family.ELLIPSE,
    "cardioid": Family.CIRCLE_CARDIOID,
    "circlecardioid": Family.CIRCLE_CARDIOID,
    "annulus": Family.ANNULUS,
}


class InvalidDomain(ValueError):
    pass


class DegenerateCenter(Exception):
    """More than ``K_MAX`` boundary points are equidistant from the query point.

    ``hits`` holds the ``K_MAX`` representatives that callers should keep.
    """

    def __init__(self, hits):
        super().__init__(f"more than {K_MAX} equidistant boundary points")
        self.hits = hits


def parse_family(name: str) -> Family:
    try:
        return _ALIASES[name.strip().lower()]
    except KeyError:
        raise InvalidDomain(f"unknown domain family {name!r}") from None


@dataclass(frozen=True)
class DomainSpec:
    family: Family
    a: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        a = float(self.a)
        object.__setattr__(self, "a", a)
        if not math.isfinite(a):
            raise InvalidDomain("shape parameter must be finite")
        fam = self.family
        if fam in (Family.RECTANGLE, Family.ELLIPSE) and a < 1.0:
            raise InvalidDomain(f"{fam.value} requires a >= 1, got {a}")
        if fam is Family.CROSS and a < 0.0:
            raise InvalidDomain(f"cross requires a >= 0, got {a}")
        if fam is Family.CIRCLE_CARDIOID and not 0.0 <= a <= 1.0:
            raise InvalidDomain(f"cardioid requires 0 <= a <= 1, got {a}")
        if fam is Family.ANNULUS and not 0.0 <= a < 1.0:
            raise InvalidDomain(f"annulus requires 0 <= a < 1, got {a}")

    @classmethod
    def parse(cls, text: str) -> "DomainSpec":
        """Parse ``family:a`` such as ``rect:1.5`` or ``annulus:0.30``."""
        family, sep, value = text.partition(":")
        if not sep:
            raise InvalidDomain(f"expected 'family:a', got {text!r}")
        try:
            a = float(value)
        except ValueError:
            raise InvalidDomain(f"bad shape parameter in {text!r}") from None
        return cls(parse_family(family), a)

    def __str__(self) -> str:
        return f"{self.family.value}:{self.a:.6f}"


class Hits(NamedTuple):
    """Flat list of boundary hits, grouped by ``owner`` (query index)."""

    owner: np.ndarray  # (M,) int
    point: np.ndarray  # (M, 2)
    dist: np.ndarray  # (M,)
    component: np.ndarray  # (M,) int, see Component
    degenerate: np.ndarray  # (N,) bool, True where the cap was applied


@dataclass(frozen=True)
class BoundaryHit:
    b: tuple[float, float]
    dist: float
    component: Component = Component.OUTER


# ---------------------------------------------------------------------------
# domain implementations


class _Domain:
    spec: DomainSpec
    diameter: float

    def to_cartesian(self, coords):
        raise NotImplementedError

    def jacobian(self, coords):
        """Return ``(dP/dc0, dP/dc1)``, each of shape (N, 2)."""
        raise NotImplementedError

    def to_unconstrained(self, pts):
        raise NotImplementedError

    def contains(self, pts, tol):
        raise NotImplementedError

    def area(self) -> float:
        raise NotImplementedError

    def outline(self, m: int) -> list[np.ndarray]:
        """Closed boundary rings, outer first; each (K, 2) without repeat."""
        raise NotImplementedError

    def raw_hits(self, pts, window):
        raise NotImplementedError

    def init_box(self):
        """Bounds of the unconstrained coordinates used for random starts."""
        return (0.0, math.pi / 2), (0.0, 2 * math.pi)


def _sin2(t):
    s = np.sin(t)
    return s * s


class _Radial(_Domain):
    """P = R(t) * C(u) with R(t) = sin^2 t."""

    def curve(self, u):
        raise NotImplementedError

    def dcurve(self, u):
        raise NotImplementedError

    def radial(self, t):
        return _sin2(t)

    def dradial(self, t):
        return np.sin(2 * t)

    def to_cartesian(self, coords):
        coords = np.asarray(coords, dtype=float)
        t, u = coords[..., 0], coords[..., 1]
        return self.radial(t)[..., None] * self.curve(u)

    def jacobian(self, coords):
        t, u = coords[:, 0], coords[:, 1]
        return (
            self.dradial(t)[:, None] * self.curve(u),
            self.radial(t)[:, None] * self.dcurve(u),
        )

    def curve_angle_inverse(self, theta):
        """Parameter u whose boundary point lies in polar direction theta."""
        raise NotImplementedError

    def to_unconstrained(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        u = self.curve_angle_inverse(theta)
        c = self.curve(u)
        frac = np.hypot(pts[:, 0], pts[:, 1]) / np.hypot(c[:, 0], c[:, 1])
        t = np.arcsin(np.sqrt(np.clip(frac, 0.0, 1.0)))
        return np.column_stack([t, u])

    def contains(self, pts, tol):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        c = self.curve(self.curve_angle_inverse(theta))
        return np.hypot(pts[:, 0], pts[:, 1]) <= np.hypot(c[:, 0], c[:, 1]) + tol


# -- polygons ----------------------------------------------------------------


class _Polygon(_Domain):
    def __init__(self, spec, vertices):
        self.spec = spec
        v = np.asarray(vertices, dtype=float)
        keep = np.any(np.abs(v - np.roll(v, 1, axis=0)) > 0, axis=1)
        self.vertices = v[keep]
        self.seg_a = self.vertices
        self.seg_b = np.roll(self.vertices, -1, axis=0)
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        self.diameter = float(np.sqrt((d**2).sum(-1)).max())

    def area(self):
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def outline(self, m):
        return [self.vertices.copy()]

    def raw_hits(self, pts, window):
        ab = self.seg_b - self.seg_a  # (S, 2)
        ap = pts[:, None, :] - self.seg_a[None, :, :]  # (N, S, 2)
        lam = (ap * ab).sum(-1) / (ab * ab).sum(-1)
        # a vertex is reported by the segment it ends, never the one it starts
        valid = lam > 0.0
        lam = np.clip(lam, 0.0, 1.0)
        b = self.seg_a[None] + lam[..., None] * ab[None]
        dist = np.hypot(pts[:, None, 0] - b[..., 0], pts[:, None, 1] - b[..., 1])
        dist_valid = np.where(valid, dist, np.inf)
        dmin = dist_valid.min(axis=1)
        mask = valid & (dist <= dmin[:, None] + window)
        owner, seg = np.nonzero(mask)
        return owner, b[owner, seg], dist[owner, seg], np.zeros(len(owner), int), None


class _Rectangle(_Polygon):
    """[-a, a] x [-1, 1] with x = a sin u1, y = sin u2."""

    def __init__(self, spec):
        a = spec.a
        super().__init__(spec, [(a, -1.0), (a, 1.0), (-a, 1.0), (-a, -1.0)])

    def to_cartesian(self, coords):
        coords = np.asarray(coords, dtype=float)
        return np.stack(
            [self.spec.a * np.sin(coords[..., 0]), np.sin(coords[..., 1])], axis=-1
        )

    def jacobian(self, coords):
        zero = np.zeros(len(coords))
        d0 = np.column_stack([self.spec.a * np.cos(coords[:, 0]), zero])
        d1 = np.column_stack([zero, np.cos(coords[:, 1])])
        return d0, d1

    def to_unconstrained(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.column_stack(
            [
                np.arcsin(np.clip(pts[:, 0] / self.spec.a, -1.0, 1.0)),
                np.arcsin(np.clip(pts[:, 1], -1.0, 1.0)),
            ]
        )

    def contains(self, pts, tol):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return (np.abs(pts[:, 0]) <= self.spec.a + tol) & (np.abs(pts[:, 1]) <= 1.0 + tol)

    def area(self):
        return 4.0 * self.spec.a

    def init_box(self):
        return (-math.pi / 2, math.pi / 2), (-math.pi / 2, math.pi / 2)


class _Cross(_Polygon, _Radial):
    """Plus-shaped 12-gon with unit-width arms reaching 1/2 + a from the centre."""

    def __init__(self, spec):
        h, L = 0.5, 0.5 + spec.a
        verts = [
            (L, -h), (L, h), (h, h), (h, L), (-h, L), (-h, h),
            (-L, h), (-L, -h), (-h, -h), (-h, -L), (h, -L), (h, -h),
        ]  # fmt: skip
        _Polygon.__init__(self, spec, verts)
        ab = self.seg_b - self.seg_a
        # outward normal n and offset c of each edge line, n.x = c > 0
        self.normal = np.column_stack([ab[:, 1], -ab[:, 0]]) / np.hypot(ab[:, 0], ab[:, 1])[:, None]
        self.offset = (self.normal * self.seg_a).sum(-1)
        ang = np.arctan2(self.seg_a[:, 1], self.seg_a[:, 0])
        order = np.argsort(ang)
        self._start_angles = ang[order]
        self._start_index = order

    def _edge_of(self, u):
        theta = np.mod(u + math.pi, 2 * math.pi) - math.pi
        k = np.searchsorted(self._start_angles, theta, side="right") - 1
        return self._start_index[k % len(self._start_index)]

    def _rho(self, u):
        e = self._edge_of(u)
        d = np.stack([np.cos(u), np.sin(u)], axis=-1)
        n = self.normal[e]
        nd = (n * d).sum(-1)
        return self.offset[e] / nd, e, d, n, nd

    def curve(self, u):
        rho, _, d, _, _ = self._rho(np.asarray(u, dtype=float))
        return rho[..., None] * d

    def dcurve(self, u):
        u = np.asarray(u, dtype=float)
        rho, e, d, n, nd = self._rho(u)
        dp = np.stack([-np.sin(u), np.cos(u)], axis=-1)
        drho = -self.offset[e] * (n * dp).sum(-1) / nd**2
        return drho[..., None] * d + rho[..., None] * dp

    def curve_angle_inverse(self, theta):
        return np.asarray(theta, dtype=float)

    def to_cartesian(self, coords):
        return _Radial.to_cartesian(self, coords)

    def jacobian(self, coords):
        return _Radial.jacobian(self, coords)

    def to_unconstrained(self, pts):
        return _Radial.to_unconstrained(self, pts)

    def contains(self, pts, tol):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        ax, ay = np.abs(pts[:, 0]), np.abs(pts[:, 1])
        L = 0.5 + self.spec.a
        horiz = (ax <= L + tol) & (ay <= 0.5 + tol)
        vert = (ay <= L + tol) & (ax <= 0.5 + tol)
        return horiz | vert

    def area(self):
        return 1.0 + 4.0 * self.spec.a

    def init_box(self):
        return _Radial.init_box(self)


# -- smooth closed curves ----------------------------------------------------


class _SmoothCurve(_Radial):
    """Nearest boundary by sampling plus bracketed 1-D refinement."""

    def __init__(self, spec):
        self.spec = spec
        self.samples_u = 2 * math.pi * np.arange(SMOOTH_SAMPLES) / SMOOTH_SAMPLES
        self.samples = self.curve(self.samples_u)
        self.sx, self.sy = self.samples[:, 0].copy(), self.samples[:, 1].copy()
        gaps = np.hypot(*(np.roll(self.samples, -1, axis=0) - self.samples).T)
        self.max_gap = float(gaps.max())
        dense = self.curve(np.linspace(0, 2 * math.pi, 4096, endpoint=False))
        d = dense[:, None, :] - dense[None, ::8, :]
        self.diameter = float(np.sqrt((d**2).sum(-1)).max())

    def area(self):
        # trapezoid rule is spectrally accurate for periodic integrands
        u = np.linspace(0.0, 2 * math.pi, 8192, endpoint=False)
        c, dc = self.curve(u), self.dcurve(u)
        return float(0.5 * np.mean(c[:, 0] * dc[:, 1] - c[:, 1] * dc[:, 0]) * 2 * math.pi)

    def outline(self, m):
        return [self.curve(2 * math.pi * np.arange(m) / m)]

    def _kernel_args(self):
        """(kind, a, k) identifying this curve to the compiled kernels."""
        raise NotImplementedError

    def raw_hits(self, pts, window):
        owner, bx, by, dist, flat = _kernels.sampled_minima(
            *self._kernel_args(), self.samples_u, self.sx, self.sy, self.max_gap, 2 * self.max_gap, float(window),
            1e-9 * self.diameter, np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]),
        )  # fmt: skip
        b = np.column_stack([bx, by])

        # fully rotationally degenerate queries (circle centre): symmetric set
        fo = np.nonzero(flat)[0]
        if len(fo):
            fown = np.repeat(fo, K_MAX)
            fb = self.curve(np.tile(2 * math.pi * np.arange(K_MAX) / K_MAX, len(fo)))
            fd = np.hypot(fb[:, 0] - pts[fown, 0], fb[:, 1] - pts[fown, 1])
            owner = np.concatenate([owner, fown])
            b = np.concatenate([b, fb])
            dist = np.concatenate([dist, fd])
        return owner, b, dist, np.zeros(len(owner), int), flat


class _Ellipse(_SmoothCurve):
    """C(u) = (a cos u, sin u); a = 1 is the unit circle."""

    def curve(self, u):
        u = np.asarray(u, dtype=float)
        return np.stack([self.spec.a * np.cos(u), np.sin(u)], axis=-1)

    def dcurve(self, u):
        u = np.asarray(u, dtype=float)
        return np.stack([-self.spec.a * np.sin(u), np.cos(u)], axis=-1)

    def _kernel_args(self):
        return _kernels.ELLIPSE, self.spec.a, 1.0

    def area(self):
        return math.pi * self.spec.a

    def curve_angle_inverse(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.arctan2(self.spec.a * np.sin(theta), np.cos(theta))

    def contains(self, pts, tol):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        x, y = pts[:, 0], pts[:, 1]
        return np.hypot(x / self.spec.a, y) <= 1.0 + tol


class _CircleCardioid(_SmoothCurve):
    """Area-pi family from the unit circle (a = 0) to the cardioid (a = 1)."""

    def __init__(self, spec):
        self.k = math.sqrt(2.0 / (2.0 + spec.a**2))
        super().__init__(spec)

    def curve(self, u):
        u = np.asarray(u, dtype=float)
        a, k = self.spec.a, self.k
        s, c = np.sin(u), np.cos(u)
        return k * np.stack([c - a * s * s, (1 + a * c) * s], axis=-1)

    def dcurve(self, u):
        u = np.asarray(u, dtype=float)
        a, k = self.spec.a, self.k
        return k * np.stack(
            [-np.sin(u) - a * np.sin(2 * u), np.cos(u) + a * np.cos(2 * u)], axis=-1
        )

    def _kernel_args(self):
        return _kernels.CARDIOID, self.spec.a, self.k

    def curve_angle_inverse(self, theta):
        # polar angle of C(u) increases monotonically from -pi to pi
        theta = np.asarray(theta, dtype=float)
        lo = np.full(theta.shape, -math.pi)
        hi = np.full(theta.shape, math.pi)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            c = self.curve(mid)
            below = np.arctan2(c[..., 1], c[..., 0]) < theta
            # at the cusp (mid = +-pi) arctan2 may flip sign; u < 0 half is y < 0
            below = np.where(mid < 0, np.where(c[..., 1] > 0, True, below), below)
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)


class _Annulus(_Domain):
    """a <= |P| <= 1, P = (a + (1 - a) sin^2 t)(cos u, sin u)."""

    def __init__(self, spec):
        self.spec = spec
        self.diameter = 2.0

    def radial(self, t):
        a = self.spec.a
        return a + (1 - a) * _sin2(t)

    def to_cartesian(self, coords):
        coords = np.asarray(coords, dtype=float)
        t, u = coords[..., 0], coords[..., 1]
        return self.radial(t)[..., None] * np.stack([np.cos(u), np.sin(u)], axis=-1)

    def jacobian(self, coords):
        t, u = coords[:, 0], coords[:, 1]
        d = np.column_stack([np.cos(u), np.sin(u)])
        dp = np.column_stack([-np.sin(u), np.cos(u)])
        return ((1 - self.spec.a) * np.sin(2 * t))[:, None] * d, self.radial(t)[:, None] * dp

    def to_unconstrained(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        a = self.spec.a
        rad = np.hypot(pts[:, 0], pts[:, 1])
        frac = np.clip((rad - a) / (1 - a), 0.0, 1.0)
        return np.column_stack([np.arcsin(np.sqrt(frac)), np.arctan2(pts[:, 1], pts[:, 0])])

    def contains(self, pts, tol):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        rad = np.hypot(pts[:, 0], pts[:, 1])
        return (rad >= self.spec.a - tol) & (rad <= 1.0 + tol)

    def area(self):
        return math.pi * (1 - self.spec.a**2)

    def outline(self, m):
        u = 2 * math.pi * np.arange(m) / m
        ring = np.column_stack([np.cos(u), np.sin(u)])
        rings = [ring]
        if self.spec.a > 0:
            rings.append(self.spec.a * ring[::-1])
        return rings

    def raw_hits(self, pts, window):
        a = self.spec.a
        rad = np.hypot(pts[:, 0], pts[:, 1])
        safe = np.where(rad > 0, rad, 1.0)
        unit = np.where((rad > 0)[:, None], pts / safe[:, None], np.array([1.0, 0.0]))
        d_out = 1.0 - rad
        # a = 0 is the plain disk: no inner circle
        d_in = rad - a if a > 0 else np.full(len(pts), np.inf)
        dmin = np.minimum(d_out, d_in)
        # the disk centre sees the whole outer circle
        flat = (a == 0) & (rad <= window)
        use_out = (d_out <= dmin + window) & ~flat
        use_in = d_in <= dmin + window
        idx = np.arange(len(pts))
        fo = idx[flat]
        ang = 2 * math.pi * np.arange(K_MAX) / K_MAX
        ring = np.column_stack([np.cos(ang), np.sin(ang)])
        owner = np.concatenate([idx[use_in], idx[use_out], np.repeat(fo, K_MAX)])
        b = np.concatenate([a * unit[use_in], unit[use_out], np.tile(ring, (len(fo), 1))])
        dist = np.concatenate([d_in[use_in], d_out[use_out], np.repeat(d_out[fo], K_MAX)])
        comp = np.concatenate(
            [
                np.full(use_in.sum(), Component.INNER),
                np.full(use_out.sum() + K_MAX * len(fo), Component.OUTER),
            ]
        )
        return owner, b, np.maximum(dist, 0.0), comp, flat

    def init_box(self):
        return (0.0, math.pi / 2), (0.0, 2 * math.pi)


_BUILDERS = {
    Family.RECTANGLE: _Rectangle,
    Family.CROSS: _Cross,
    Family.ELLIPSE: _Ellipse,
    Family.CIRCLE_CARDIOID: _CircleCardioid,
    Family.ANNULUS: _Annulus,
}


@lru_cache(maxsize=256)
def domain(spec: DomainSpec) -> _Domain:
    """Cached per-spec implementation object (precomputed samples, polygons)."""
    return _BUILDERS[spec.family](spec)


# ---------------------------------------------------------------------------
# vectorised public API


def diameter(spec: DomainSpec) -> float:
    return domain(spec).diameter


def default_tie_tol(spec: DomainSpec) -> float:
    return TIE_TOL_REL * domain(spec).diameter


def to_cartesian(spec: DomainSpec, coords) -> np.ndarray:
    """Map unconstrained coordinates (..., 2) to points of the closed domain."""
    return domain(spec).to_cartesian(coords)


def jacobian(spec: DomainSpec, coords) -> tuple[np.ndarray, np.ndarray]:
    return domain(spec).jacobian(np.atleast_2d(np.asarray(coords, dtype=float)))


def to_unconstrained(spec: DomainSpec, pts) -> np.ndarray:
    """One preimage of each point under :func:`to_cartesian`."""
    return domain(spec).to_unconstrained(pts)


def contains(spec: DomainSpec, pts, tol: float = 1e-12):
    """Closed-domain membership; scalar in, bool out; array in, array out."""
    arr = np.asarray(pts, dtype=float)
    out = domain(spec).contains(np.atleast_2d(arr), tol)
    return bool(out[0]) if arr.ndim == 1 else out


def area(spec: DomainSpec) -> float:
    return domain(spec).area()


def outline(spec: DomainSpec, m: int = SMOOTH_SAMPLES) -> list[np.ndarray]:
    return domain(spec).outline(m)


def boundary_hits(spec: DomainSpec, pts, window: float | None = None) -> Hits:
    """Nearest boundary points of many query points at once.

    For each point every local minimum of the boundary distance lying within
    ``window`` of the global minimum is returned, sorted by distance and then
    by the angle of ``b - p``.  At most ``K_MAX`` hits per point are kept;
    ``degenerate`` flags the points where that cap was applied.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if window is None:
        window = default_tie_tol(spec)
    owner, b, dist, comp, flat = domain(spec).raw_hits(pts, window)
    ang = np.mod(np.arctan2(b[:, 1] - pts[owner, 1], b[:, 0] - pts[owner, 0]), 2 * math.pi)
    order = np.lexsort((ang, dist, owner))
    owner, b, dist, comp, ang = owner[order], b[order], dist[order], comp[order], ang[order]
    counts = np.bincount(owner, minlength=len(pts))
    degenerate = counts > K_MAX
    if degenerate.any():
        keep = np.ones(len(owner), bool)
        starts = np.r_[0, np.cumsum(counts)[:-1]]
        for i in np.nonzero(degenerate)[0]:
            sl = np.arange(starts[i], starts[i] + counts[i])
            by_angle = sl[np.argsort(ang[sl], kind="stable")]
            chosen = by_angle[(np.arange(K_MAX) * counts[i]) // K_MAX]
            keep[sl] = False
            keep[chosen] = True
        owner, b, dist, comp = owner[keep], b[keep], dist[keep], comp[keep]
    if flat is not None:
        degenerate |= flat
    return Hits(owner, b, dist, comp, degenerate)


def images_of(spec: DomainSpec, pts, window: float | None = None):
    """Reflections ``2b - p`` of each point through its nearest boundary points.

    Returns ``(owner, images)`` as flat arrays.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    hits = boundary_hits(spec, pts, window)
    return hits.owner, 2.0 * hits.point - pts[hits.owner]


def boundary_distance(spec: DomainSpec, pts) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    hits = boundary_hits(spec, pts, 0.0)
    out = np.full(len(pts), np.inf)
    np.minimum.at(out, hits.owner, hits.dist)
    return out


# ---------------------------------------------------------------------------
# single-point API


def nearest_boundary(spec: DomainSpec, p, tie_tol: float | None = None) -> list[BoundaryHit]:
    """All nearest boundary points of ``p`` (ties within ``tie_tol``).

    Raises :class:`DegenerateCenter` when more than ``K_MAX`` boundary points
    are equidistant; the exception carries the ``K_MAX`` kept hits.
    """
    p = np.asarray(p, dtype=float).reshape(1, 2)
    hits = boundary_hits(spec, p, tie_tol)
    out = [
        BoundaryHit((float(b[0]), float(b[1])), float(d), Component(int(c)))
        for b, d, c in zip(hits.point, hits.dist, hits.component)
    ]
    if hits.degenerate[0]:
        raise DegenerateCenter(out)
    return out


def image_points(spec: DomainSpec, p, tie_tol: float | None = None) -> list[tuple[float, float]]:
    px, py = (float(v) for v in np.asarray(p, dtype=float))
    return [(2 * h.b[0] - px, 2 * h.b[1] - py) for h in nearest_boundary(spec, p, tie_tol)]
