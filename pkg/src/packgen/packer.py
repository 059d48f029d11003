"""Image-charge packing optimiser.

Disk centres are repelled by each other and by their reflections through the
nearest container boundary.  The potential exponent ``s`` grows stage by stage
from a long-range interaction to an effectively hard-disk contact one; after
each stage the configuration is kept only if it raised the packing fraction.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import _kernels, geometry
from .geometry import DomainSpec, Family

log = logging.getLogger(__name__)

HEX_DENSITY = math.pi / math.sqrt(12.0)
EPS_DIST_REL = 1e-14
INIT_SEPARATION_REL = 1e-6


class EmptyConfiguration(ValueError):
    pass


class InvalidN(ValueError):
    pass


class StallWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class EnergyParams:
    s: float
    lam: float
    image_weight: float = 1.0

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("exponent s must be positive")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not self.image_weight >= 1.0:
            raise ValueError("image weight must be >= 1")


@dataclass(frozen=True)
class Schedule:
    s0: float = 1.0
    growth: float = 1.5
    s_max: float = 2e6
    inner_max_iters: int = 50_000
    grad_tol: float = 1e-10
    image_weight0: float = 2.0
    image_weight_decay_stages: int = 10
    # stop a stage once the log-energy stops moving (see _descend)
    f_tol: float = 1e-13

    def __post_init__(self):
        if not self.s0 > 0:
            raise ValueError("s0 must be positive")
        if not self.growth > 1:
            raise ValueError("growth must exceed 1")
        if not self.s_max > self.s0:
            raise ValueError("s_max must exceed s0")
        if self.inner_max_iters < 1:
            raise ValueError("inner_max_iters must be >= 1")
        if self.image_weight0 < 1:
            raise ValueError("image_weight0 must be >= 1")
        if self.image_weight_decay_stages < 0:
            raise ValueError("image_weight_decay_stages must be >= 0")

    def exponents(self) -> list[float]:
        out, s = [], self.s0
        while s <= self.s_max:
            out.append(s)
            s *= self.growth
        return out

    def image_weight(self, stage: int) -> float:
        """Geometric interpolation from image_weight0 down to 1."""
        n = self.image_weight_decay_stages
        if n == 0 or stage >= n:
            return 1.0
        return self.image_weight0 ** (1.0 - stage / n)


class Configuration:
    """N points in unconstrained coordinates with cached positions and images."""

    def __init__(self, spec: DomainSpec, coords, tie_tol: float | None = None):
        self.spec = spec
        self.coords = np.array(coords, dtype=float).reshape(-1, 2)
        self.tie_tol = geometry.default_tie_tol(spec) if tie_tol is None else tie_tol
        self.cartesian = geometry.to_cartesian(spec, self.coords)
        self.image_owner, self.images = geometry.images_of(spec, self.cartesian, self.tie_tol)

    @classmethod
    def from_points(cls, spec: DomainSpec, points, tie_tol=None) -> "Configuration":
        return cls(spec, geometry.to_unconstrained(spec, points), tie_tol)

    @property
    def n(self) -> int:
        return len(self.coords)

    def with_coords(self, coords) -> "Configuration":
        return Configuration(self.spec, coords, self.tie_tol)

    def image_lists(self) -> list[list[tuple[float, float]]]:
        out: list[list[tuple[float, float]]] = [[] for _ in range(self.n)]
        for i, q in zip(self.image_owner, self.images):
            out[i].append((float(q[0]), float(q[1])))
        return out


@dataclass(eq=False)
class PackingResult:
    spec: DomainSpec
    centers: np.ndarray
    r: float
    rho: float
    seed: int
    trials: int
    schedule: Schedule
    wall_time: float = 0.0
    coords: np.ndarray | None = field(default=None, repr=False)
    stage_rho: list[float] = field(default_factory=list, repr=False)
    extra: dict[str, str] = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.centers)


@dataclass(frozen=True)
class CurveSample:
    a: float
    rho: float
    r: float
    n: int
    seed: int


DensityCurve = list[CurveSample]


# ---------------------------------------------------------------------------
# energy


@lru_cache(maxsize=32)
def _pairs(n: int):
    i, j = np.triu_indices(n, k=1)
    i.flags.writeable = False
    j.flags.writeable = False
    return i, j


def min_squared_distance(config: Configuration) -> float:
    """Smallest squared distance among points and between points and their images."""
    if config.n == 0:
        raise EmptyConfiguration("configuration has no points")
    p = config.cartesian
    best = math.inf
    if config.n > 1:
        i, j = _pairs(config.n)
        d = p[i] - p[j]
        best = float(np.min(d[:, 0] ** 2 + d[:, 1] ** 2))
    if len(config.images):
        d = p[config.image_owner] - config.images
        best = min(best, float(np.min(d[:, 0] ** 2 + d[:, 1] ** 2)))
    if not math.isfinite(best):
        raise EmptyConfiguration("single point without images")
    return best


def disk_radius(config: Configuration) -> float:
    return 0.5 * math.sqrt(min_squared_distance(config))


def packing_fraction_of(config: Configuration) -> float:
    r = disk_radius(config)
    return config.n * math.pi * r * r / geometry.area(config.spec)


def _log_energy_and_force(config: Configuration, params: EnergyParams, image_factor: float):
    """log E and d(log E / s)/dP for every point, shape (N, 2)."""
    eps2 = (EPS_DIST_REL * geometry.diameter(config.spec)) ** 2
    images = config.images.reshape(-1, 2)
    owner = np.asarray(config.image_owner, dtype=np.int64)
    log_e, force = _kernels.log_energy_force(
        config.cartesian, owner, images, float(params.s), math.log(params.lam), math.log(params.image_weight),
        eps2, float(image_factor),
    )
    return float(log_e), force


def _chain(config: Configuration, dpoint):
    j0, j1 = geometry.jacobian(config.spec, config.coords)
    return np.column_stack([(dpoint * j0).sum(1), (dpoint * j1).sum(1)])


def energy(config: Configuration, params: EnergyParams) -> float:
    """Sum of (lam / r^2)^s over point pairs plus weighted point-image terms."""
    log_e, _ = _log_energy_and_force(config, params, image_factor=1.0)
    return math.exp(log_e)


def gradient(config: Configuration, params: EnergyParams) -> np.ndarray:
    """dE/d(coords) with the image charges held at their current positions."""
    log_e, dlog = _log_energy_and_force(config, params, image_factor=1.0)
    return _chain(config, dlog) * params.s * math.exp(log_e)


# ---------------------------------------------------------------------------
# stage minimisation


@dataclass
class StageInfo:
    iterations: int
    evaluations: int
    grad_norm: float
    reason: str


class _Objective:
    """log(E)/s on the recomputed-image energy and its exact gradient.

    Reflecting through the nearest boundary point makes the point-image
    distance twice the boundary distance, so its derivative is twice the
    frozen-image one.  Monotone in E, so minimisers and descent coincide.
    """

    def __init__(self, spec, params, tie_tol, shape):
        self.spec, self.params, self.tie_tol, self.shape = spec, params, tie_tol, shape
        self.evaluations = 0

    def __call__(self, x):
        self.evaluations += 1
        cfg = Configuration(self.spec, x.reshape(self.shape), self.tie_tol)
        log_e, dlog = _log_energy_and_force(cfg, self.params, image_factor=2.0)
        return log_e / self.params.s, _chain(cfg, dlog).ravel(), cfg


_LBFGS_MEMORY = 10
_ARMIJO_C1 = 1e-4
_BACKTRACK = 0.5
_MAX_STEP = 0.25
_STALL_PATIENCE = 8
_MIN_STEP = 1e-12


def _descend(config: Configuration, params: EnergyParams, schedule: Schedule):
    obj = _Objective(config.spec, params, config.tie_tol, config.coords.shape)
    x = config.coords.ravel().copy()
    f, g, cfg = obj(x)
    mem: deque = deque(maxlen=_LBFGS_MEMORY)
    stall = 0
    reason = "max_iters"
    it = 0
    for it in range(1, schedule.inner_max_iters + 1):
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        if gnorm < schedule.grad_tol:
            reason = "grad_tol"
            it -= 1
            break
        d = _two_loop(g, mem)
        slope = float(g @ d)
        if not slope < 0:
            mem.clear()
            d = -g
            slope = float(g @ d)
        dmax = float(np.max(np.abs(d)))
        alpha = min(1.0, _MAX_STEP / dmax) if mem else _MAX_STEP / dmax
        while True:
            x_new = x + alpha * d
            f_new, g_new, cfg_new = obj(x_new)
            if f_new <= f + _ARMIJO_C1 * alpha * slope:
                break
            alpha *= _BACKTRACK
            if alpha * dmax < _MIN_STEP:
                f_new = None
                break
        if f_new is None:
            reason = "line_search"
            break
        sv, yv = x_new - x, g_new - g
        sy = float(sv @ yv)
        if sy > 1e-12 * float(np.linalg.norm(sv) * np.linalg.norm(yv)):
            mem.append((sv, yv, 1.0 / sy))
        stall = stall + 1 if f - f_new <= schedule.f_tol * max(1.0, abs(f)) else 0
        x, f, g, cfg = x_new, f_new, g_new, cfg_new
        if stall >= _STALL_PATIENCE:
            reason = "f_tol"
            break
    gnorm = float(np.max(np.abs(g))) if g.size else 0.0
    return cfg, StageInfo(it, obj.evaluations, gnorm, reason)


def _two_loop(g, mem):
    q = -g.copy()
    if not mem:
        return q
    # near-degenerate curvature pairs can overflow; a non-finite direction
    # fails the descent check in the caller, which then resets the memory
    with np.errstate(all="ignore"):
        return _two_loop_core(q, mem)


def _two_loop_core(q, mem):
    alphas = []
    for sv, yv, rho in reversed(mem):
        a = rho * float(sv @ q)
        alphas.append(a)
        q -= a * yv
    sv, yv, _ = mem[-1]
    q *= float(sv @ yv) / float(yv @ yv)
    for (sv, yv, rho), a in zip(mem, reversed(alphas)):
        b = rho * float(yv @ q)
        q += (a - b) * sv
    return q


def minimize_stage(config: Configuration, params: EnergyParams, schedule: Schedule) -> Configuration:
    """Relax ``config`` to equilibrium at fixed exponent, lambda and image weight.

    Quasi-Newton (L-BFGS) descent with Armijo backtracking; images are
    recomputed at every trial point.  Emits :class:`StallWarning` when the
    iteration cap is reached with the gradient above tolerance.
    """
    out, info = _descend(config, params, schedule)
    if info.reason == "max_iters":
        warnings.warn(
            f"stage at s={params.s:g} hit {schedule.inner_max_iters} iterations "
            f"(|grad|={info.grad_norm:.3g})",
            StallWarning,
            stacklevel=2,
        )
    return out


# ---------------------------------------------------------------------------
# drivers


def random_coords(spec: DomainSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw in coordinate space, resampling near-coincident points."""
    (lo0, hi0), (lo1, hi1) = geometry.domain(spec).init_box()
    min_sep = INIT_SEPARATION_REL * geometry.diameter(spec)
    coords = np.empty((0, 2))
    pts = np.empty((0, 2))
    while len(coords) < n:
        c = np.array([rng.uniform(lo0, hi0), rng.uniform(lo1, hi1)])
        p = geometry.to_cartesian(spec, c)
        if len(pts) and np.min(np.hypot(*(pts - p).T)) < min_sep:
            continue
        coords = np.vstack([coords, c])
        pts = np.vstack([pts, p])
    return coords


def pack(
    spec: DomainSpec,
    n: int,
    schedule: Schedule = Schedule(),
    seed: int = 0,
    init=None,
) -> PackingResult:
    """Run the full exponent schedule from a random start (or ``init`` coords).

    Deterministic in ``(spec, n, schedule, seed, init)``.
    """
    if n < 1:
        raise InvalidN(f"need at least one disk, got {n}")
    t0 = time.perf_counter()
    if init is None:
        coords = random_coords(spec, n, np.random.default_rng(seed))
    else:
        coords = np.array(init, dtype=float).reshape(n, 2)
    best = Configuration(spec, coords)
    best_rho = packing_fraction_of(best)
    history = [best_rho]
    for stage, s in enumerate(schedule.exponents()):
        params = EnergyParams(s, min_squared_distance(best), schedule.image_weight(stage))
        cfg, info = _descend(best, params, schedule)
        rho = packing_fraction_of(cfg)
        accepted = rho > best_rho
        if accepted:
            best, best_rho = cfg, rho
        history.append(best_rho)
        log.debug(
            "seed=%d s=%.4g rho=%.10f best=%.10f iters=%d evals=%d stop=%s%s",
            seed, s, rho, best_rho, info.iterations, info.evaluations, info.reason,
            "" if accepted else " (reverted)",
        )  # fmt: skip
    r = disk_radius(best)
    return PackingResult(
        spec=spec,
        centers=best.cartesian.copy(),
        r=r,
        rho=n * math.pi * r * r / geometry.area(spec),
        seed=int(seed),
        trials=1,
        schedule=schedule,
        wall_time=time.perf_counter() - t0,
        coords=best.coords.copy(),
        stage_rho=history,
    )


def _pack_job(args):
    return pack(*args)


def multi_trial(
    spec: DomainSpec,
    n: int,
    schedule: Schedule = Schedule(),
    trials: int = 1,
    base_seed: int = 0,
    jobs: int = 1,
) -> PackingResult:
    """Best of ``trials`` independent runs with seeds base_seed, base_seed+1, ...

    Ties go to the lower seed, so the answer does not depend on ``jobs``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    t0 = time.perf_counter()
    seeds = [base_seed + k for k in range(trials)]
    args = [(spec, n, schedule, s) for s in seeds]
    if jobs > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, trials)) as ex:
            results = list(ex.map(_pack_job, args))
    else:
        results = [_pack_job(a) for a in args]
    best = results[0]
    for res in results[1:]:
        if res.rho > best.rho:
            best = res
    return replace(best, trials=trials, wall_time=time.perf_counter() - t0)


def warm_start_sweep(
    family: Family,
    n: int,
    a_from: float,
    a_to: float,
    step: float = 0.01,
    schedule: Schedule = Schedule(),
    trials_per_a: int = 1,
    seed: int = 0,
    jobs: int = 1,
    on_result=None,
) -> DensityCurve:
    """Density as a function of the shape parameter on a uniform grid.

    At every grid value the best of ``trials_per_a`` random starts competes
    with one run seeded by the previous grid value's best coordinates.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if a_from > a_to:
        raise ValueError("a_from must not exceed a_to")
    count = int(math.floor((a_to - a_from) / step + 1e-9)) + 1
    curve: DensityCurve = []
    prev = None
    for k in range(count):
        spec = DomainSpec(family, a_from + k * step)
        best = multi_trial(spec, n, schedule, trials_per_a, seed, jobs)
        if prev is not None:
            warm = pack(spec, n, schedule, seed + trials_per_a, init=prev.coords)
            if warm.rho > best.rho:
                best = replace(warm, trials=trials_per_a + 1)
        log.info("a=%.6f rho=%.10f", spec.a, best.rho)
        if on_result is not None:
            on_result(best)
        curve.append(CurveSample(spec.a, best.rho, best.r, n, best.seed))
        prev = best
    return curve
