"""Compiled inner loops: nearest points on smooth closed curves and the
pair energy.

Curves are identified by a small integer so one kernel serves every family:
0 is the ellipse (a cos u, sin u), 1 the circle-cardioid family scaled by k.
"""

import math

import numpy as np
from numba import njit

ELLIPSE = 0
CARDIOID = 1

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@njit(cache=True)
def _eval(kind, a, k, u):
    s, c = math.sin(u), math.cos(u)
    if kind == ELLIPSE:
        return a * c, s, -a * s, c, -a * c, -s
    s2, c2 = 2.0 * s * c, c * c - s * s
    return (
        k * (c - a * s * s),
        k * (1.0 + a * c) * s,
        k * (-s - a * s2),
        k * (c + a * c2),
        k * (-c - 2.0 * a * c2),
        k * (-s - 2.0 * a * s2),
    )


@njit(cache=True)
def _slope(kind, a, k, u, px, py):
    """Half the derivative of |C(u) - p|^2, and its derivative."""
    x, y, dx, dy, ddx, ddy = _eval(kind, a, k, u)
    ex, ey = x - px, y - py
    return ex * dx + ey * dy, dx * dx + dy * dy + ex * ddx + ey * ddy


@njit(cache=True)
def _d2(kind, a, k, u, px, py):
    x, y, _, _, _, _ = _eval(kind, a, k, u)
    return (x - px) ** 2 + (y - py) ** 2


@njit(cache=True)
def _golden(kind, a, k, lo, hi, px, py):
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = _d2(kind, a, k, c, px, py), _d2(kind, a, k, d, px, py)
    for _ in range(80):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = _d2(kind, a, k, c, px, py)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = _d2(kind, a, k, d, px, py)
    return c if fc < fd else d


@njit(cache=True)
def refine(kind, a, k, lo, hi, u0, px, py):
    """Local minimiser of |C(u) - p| in [lo, hi] seeded at u0.

    Safeguarded Newton on the slope, bisecting whenever Newton leaves the
    bracket; a bracket without a sign change falls back to golden section.
    """
    glo, _ = _slope(kind, a, k, lo, px, py)
    ghi, _ = _slope(kind, a, k, hi, px, py)
    if not (glo <= 0.0 and ghi >= 0.0):
        return _golden(kind, a, k, lo, hi, px, py)
    u = u0
    best_u, best_g = u0, math.inf
    for _ in range(64):
        g, h = _slope(kind, a, k, u, px, py)
        if abs(g) < best_g:
            best_u, best_g = u, abs(g)
        if g < 0.0:
            lo = u
        elif g > 0.0:
            hi = u
        else:
            break
        if hi - lo <= 1e-15:
            break
        if h > 0.0:
            step = g / h
            nu = u - step
            if lo <= nu <= hi:
                if abs(step) <= 1e-15 * (1.0 + abs(u)):
                    break
                u = nu
                continue
        u = 0.5 * (lo + hi)
    return best_u


_BLOCK = 8


@njit(cache=True)
def _sample_d2(sx, sy, j, x, y):
    return (sx[j] - x) ** 2 + (sy[j] - y) ** 2


@njit(cache=True)
def _local_min(sx, sy, ds, j, x, y):
    """Whether sample j is no farther than either neighbour (periodic)."""
    m = sx.shape[0]
    jl = j - 1 if j > 0 else m - 1
    jr = j + 1 if j < m - 1 else 0
    left = ds[jl] if ds[jl] >= 0.0 else _sample_d2(sx, sy, jl, x, y)
    right = ds[jr] if ds[jr] >= 0.0 else _sample_d2(sx, sy, jr, x, y)
    return ds[j] <= left and ds[j] <= right


@njit(cache=True)
def sampled_minima(kind, a, k, su, sx, sy, gap, slack, window, merge, px, py):
    """Nearest boundary points of every query point.

    Sampled local minima of the distance that lie within ``slack + window`` of
    the closest sample are refined; refined minima within ``window`` of the
    best one are kept, and minima closer than ``merge`` to the previous one in
    parameter order (including across the wrap) are merged.

    Samples are visited in blocks of ``_BLOCK``; a block is skipped when its
    centre sample proves, via the triangle inequality and the largest sample
    spacing ``gap``, that none of its samples can qualify, so the outcome
    equals a scan of every sample.  Points whose sampled distances all agree
    to within ``window`` (a circle centre) are flagged ``flat`` and get no
    hits.  Returns ``(owner, bx, by, dist, flat)``.
    """
    n, m = px.shape[0], su.shape[0]
    nb = (m + _BLOCK - 1) // _BLOCK
    reach = (_BLOCK // 2) * gap  # path length from a block centre to its ends
    h = su[1] - su[0]
    two_pi = 2.0 * math.pi
    cap = 4 * n + 16
    owner = np.empty(cap, np.int64)
    obx = np.empty(cap)
    oby = np.empty(cap)
    od = np.empty(cap)
    flat = np.zeros(n, np.bool_)
    dc = np.empty(nb)
    active = np.zeros(nb, np.bool_)
    ds = np.full(m, -1.0)  # squared sample distances, -1 where not computed
    cu = np.empty(m)
    cbx = np.empty(m)
    cby = np.empty(m)
    cd = np.empty(m)
    count = 0
    for i in range(n):
        x, y = px[i], py[i]
        upper, far = math.inf, 0.0
        for b in range(nb):
            d = _sample_d2(sx, sy, min(b * _BLOCK + _BLOCK // 2, m - 1), x, y)
            dc[b] = d
            upper = min(upper, d)
            far = max(far, d)
        upper, far = math.sqrt(upper), math.sqrt(far)
        lo_d = math.inf
        if far - upper <= window + 2 * reach:
            # possibly rotationally flat: look at every sample
            active[:] = True
            hi_d = 0.0
            for j in range(m):
                d = _sample_d2(sx, sy, j, x, y)
                ds[j] = d
                lo_d = min(lo_d, d)
                hi_d = max(hi_d, d)
            if math.sqrt(hi_d) - math.sqrt(lo_d) <= window:
                flat[i] = True
                ds[:] = -1.0
                continue
        else:
            cut = (upper + slack + window + reach) ** 2
            for b in range(nb):
                active[b] = dc[b] <= cut
                if active[b]:
                    for j in range(b * _BLOCK, min((b + 1) * _BLOCK, m)):
                        d = _sample_d2(sx, sy, j, x, y)
                        ds[j] = d
                        lo_d = min(lo_d, d)
        limit = (math.sqrt(lo_d) + slack + window) ** 2

        nc = 0
        best = math.inf
        for b in range(nb):
            if not active[b]:
                continue
            for j in range(b * _BLOCK, min((b + 1) * _BLOCK, m)):
                if ds[j] > limit or not _local_min(sx, sy, ds, j, x, y):
                    continue
                u = refine(kind, a, k, su[j] - h, su[j] + h, su[j], x, y)
                bx, by, _, _, _, _ = _eval(kind, a, k, u)
                d = math.hypot(bx - x, by - y)
                # insertion by parameter in [0, 2 pi)
                key = u % two_pi
                t = nc
                while t > 0 and cu[t - 1] > key:
                    cu[t], cbx[t], cby[t], cd[t] = cu[t - 1], cbx[t - 1], cby[t - 1], cd[t - 1]
                    t -= 1
                cu[t], cbx[t], cby[t], cd[t] = key, bx, by, d
                nc += 1
                best = min(best, d)
        for b in range(nb):
            if active[b]:
                for j in range(b * _BLOCK, min((b + 1) * _BLOCK, m)):
                    ds[j] = -1.0

        # window filter, then merge each minimum into its predecessor
        kept = 0
        for t in range(nc):
            if cd[t] <= best + window:
                cu[kept], cbx[kept], cby[kept], cd[kept] = cu[t], cbx[t], cby[t], cd[t]
                kept += 1
        start = count
        for t in range(kept):
            if t > 0 and math.hypot(cbx[t] - cbx[t - 1], cby[t] - cby[t - 1]) <= merge:
                continue
            if count == cap:
                cap *= 2
                owner = np.concatenate((owner, np.empty(cap - count, np.int64)))
                obx = np.concatenate((obx, np.empty(cap - count)))
                oby = np.concatenate((oby, np.empty(cap - count)))
                od = np.concatenate((od, np.empty(cap - count)))
            owner[count], obx[count], oby[count], od[count] = i, cbx[t], cby[t], cd[t]
            count += 1
        last = count - 1
        if last > start and math.hypot(obx[last] - obx[start], oby[last] - oby[start]) <= merge:
            count -= 1
    return owner[:count], obx[:count], oby[:count], od[:count], flat


# exp(x) is exactly 0.0 in double precision for x below about -745.13
_UNDERFLOW = 746.0


@njit(cache=True)
def log_energy_force(p, owner, images, s, log_lam, log_w, eps2, image_factor):
    """log E and the gradient of log(E)/s with respect to every point.

    Pair terms are (lam/r^2)^s; point-image terms carry the extra weight
    exp(log_w) and their force is scaled by ``image_factor``.  Squared
    distances below ``eps2`` are clamped and contribute no force.  Terms that
    would underflow to zero next to the largest one are skipped without
    evaluating any logarithm, which leaves the result unchanged.
    """
    n, m = p.shape[0], images.shape[0]
    npair = n * (n - 1) // 2
    pmin, qmin = math.inf, math.inf
    for i in range(n):
        for j in range(i + 1, n):
            pmin = min(pmin, (p[i, 0] - p[j, 0]) ** 2 + (p[i, 1] - p[j, 1]) ** 2)
    for q in range(m):
        i = owner[q]
        qmin = min(qmin, (p[i, 0] - images[q, 0]) ** 2 + (p[i, 1] - images[q, 1]) ** 2)
    top = -math.inf
    if npair:
        top = s * (log_lam - math.log(max(pmin, eps2)))
    if m:
        top = max(top, s * (log_lam - math.log(max(qmin, eps2))) + log_w)
    pair_cut = math.exp(log_lam + (_UNDERFLOW - top) / s)
    image_cut = math.exp(log_lam + (_UNDERFLOW + log_w - top) / s)

    terms = np.zeros(npair + m)  # each term divided by the largest one
    total = 0.0
    t = 0
    for i in range(n):
        for j in range(i + 1, n):
            r2 = max((p[i, 0] - p[j, 0]) ** 2 + (p[i, 1] - p[j, 1]) ** 2, eps2)
            if r2 <= pair_cut:
                e = math.exp(s * (log_lam - math.log(r2)) - top)
                terms[t] = e
                total += e
            t += 1
    for q in range(m):
        i = owner[q]
        r2 = max((p[i, 0] - images[q, 0]) ** 2 + (p[i, 1] - images[q, 1]) ** 2, eps2)
        if r2 <= image_cut:
            e = math.exp(s * (log_lam - math.log(r2)) + log_w - top)
            terms[t] = e
            total += e
        t += 1
    log_e = top + math.log(total)

    force = np.zeros((n, 2))
    t = 0
    for i in range(n):
        for j in range(i + 1, n):
            if terms[t] > 0.0:
                dx, dy = p[i, 0] - p[j, 0], p[i, 1] - p[j, 1]
                r2 = dx * dx + dy * dy
                if r2 > eps2:
                    w = -2.0 * (terms[t] / total) / r2
                    force[i, 0] += w * dx
                    force[i, 1] += w * dy
                    force[j, 0] -= w * dx
                    force[j, 1] -= w * dy
            t += 1
    for q in range(m):
        i = owner[q]
        if terms[t] > 0.0:
            dx, dy = p[i, 0] - images[q, 0], p[i, 1] - images[q, 1]
            r2 = dx * dx + dy * dy
            if r2 > eps2:
                w = -2.0 * image_factor * (terms[t] / total) / r2
                force[i, 0] += w * dx
                force[i, 1] += w * dy
        t += 1
    return log_e, force
