"""Checks shared by the unit and acceptance suites."""

import math

import numpy as np

import oracles
from packgen import geometry, packer
from packgen.geometry import Family
from packgen.packer import Configuration, EnergyParams, gradient, min_squared_distance

# finite differences with a 1e-6 step are only trustworthy when every
# point-point and point-image distance is well above the step
GENERIC_MIN_DIST = 1e-2


def validity_violations(res, tol=1e-9) -> list[str]:
    """Reasons why ``res`` breaks a packing invariant (empty when valid)."""
    out = []
    c = np.asarray(res.centers)
    if len(c) > 1:
        i, j = np.triu_indices(len(c), 1)
        sep = np.min(np.hypot(*(c[i] - c[j]).T))
        if sep < 2 * res.r - tol:
            out.append(f"separation {sep!r} < 2r")
    clearance = np.min(oracles.boundary_distances(res.spec, c))
    if clearance < res.r - tol:
        out.append(f"clearance {clearance!r} < r")
    # a lone disk can fill a circle completely; the hexagonal bound needs N >= 2
    if res.n >= 2 and res.rho > packer.HEX_DENSITY + 1e-9:
        out.append(f"rho {res.rho!r} above the hexagonal bound")
    if abs(res.rho * geometry.area(res.spec) - res.n * math.pi * res.r**2) > 1e-12:
        out.append("rho * area != N pi r^2")
    return out


def fd_directional(cfg, params, v, h=1e-6):
    """Central difference of the direct-sum energy along ``v``, images frozen."""

    def e(coords):
        pts = geometry.to_cartesian(cfg.spec, coords)
        return oracles.frozen_energy(pts, cfg.image_owner, cfg.images, params.s, params.lam, params.image_weight)

    return (e(cfg.coords + h * v) - e(cfg.coords - h * v)) / (2 * h)


def near_cross_kink(spec, coords, margin=1e-4):
    """True when some angle parameter sits within ``margin`` of a cross vertex direction."""
    if spec.family is not Family.CROSS:
        return False
    kinks = geometry.to_unconstrained(spec, oracles.polygon_vertices(spec))[:, 1]
    u = np.mod(coords[:, 1], 2 * math.pi)
    gap = np.abs(np.mod(u[:, None] - kinks[None, :] + math.pi, 2 * math.pi) - math.pi)
    return bool(np.any(gap < margin))


def gradient_errors(spec, count, seed) -> np.ndarray:
    """Relative errors of directional derivatives on ``count`` random generic configurations."""
    rng = np.random.default_rng(seed)
    errs = []
    while len(errs) < count:
        n = int(rng.integers(2, 8))
        cfg = Configuration(spec, packer.random_coords(spec, n, rng))
        lam = min_squared_distance(cfg)
        if near_cross_kink(spec, cfg.coords) or lam < GENERIC_MIN_DIST**2:
            continue
        params = EnergyParams(float(rng.uniform(1, 6)), lam, float(rng.uniform(1, 2)))
        g = gradient(cfg, params)
        v = rng.normal(size=cfg.coords.shape)
        exact = float(np.sum(g * v))
        approx = fd_directional(cfg, params, v)
        errs.append(abs(exact - approx) / max(abs(exact), abs(approx), 1e-300))
    return np.array(errs)


def result_from(spec, centers, r, seed=0, trials=1):
    """A PackingResult built around analytic centres and radius."""
    c = np.asarray(centers, dtype=float).reshape(-1, 2)
    return packer.PackingResult(
        spec=spec,
        centers=c,
        r=float(r),
        rho=len(c) * math.pi * float(r) ** 2 / geometry.area(spec),
        seed=seed,
        trials=trials,
        schedule=packer.Schedule(),
    )


def annulus_rings(a, counts, radii, stagger=True):
    """Concentric rings of centres; consecutive rings offset by half a step."""
    pts = []
    for k, (m, rad) in enumerate(zip(counts, radii)):
        phase = (math.pi / m) * (k % 2) if stagger else 0.0
        ang = phase + 2 * math.pi * np.arange(m) / m
        pts.append(rad * np.column_stack([np.cos(ang), np.sin(ang)]))
    c = np.vstack(pts)
    rad = np.hypot(c[:, 0], c[:, 1])
    clearance = np.minimum(rad - a, 1 - rad).min()
    i, j = np.triu_indices(len(c), 1)
    r = min(clearance, 0.5 * np.hypot(*(c[i] - c[j]).T).min())
    return c, float(r)
