"""S-shape refinement of a confidence band.

An S-shaped function is nondecreasing, convex left of an inflection point
mu and concave right of it.  For each candidate mu this module computes
the exact pointwise extremes of all S-shaped functions that fit inside the
band at the grid points; the refined band is the min/max of the per-mu
envelopes over a grid of inflection points.

Per-mu computation: with a knot inserted at mu, no constraint links the
slope just left of mu to the slope just right of it, so the problem splits
into a convex-isotonic part and a concave-isotonic part coupled only
through the shared value at mu.  On one side:

* coordinate maxima are attained simultaneously by the greatest convex
  isotonic minorant of the upper boxes (lower convex hull, then a suffix
  minimum to remove negative slopes);
* coordinate minima are the pointwise maximum of monotone certificates
  (running max of lower boxes) and chord-extrapolation certificates
  v_k >= lo_b + slope * (t_k - t_b), where the best slope against earlier
  or later upper anchors is a tangent query on an incrementally built
  hull, and the resulting lines are combined with a Li Chao tree.

The concave side reuses the convex code after point reflection.  The
construction is pinned by an independent linear-programming oracle in the
test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .band import ConfidenceBand
from .design import Grid

try:  # pragma: no cover - exercised implicitly
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco

__all__ = [
    "InflectionGrid",
    "SShapeRefinement",
    "default_inflection_grid",
    "envelope_at_mu",
    "refine",
]

_FEAS_TOL = 1e-9


@njit(cache=True)
def _convex_iso_max(t, hi):
    """Greatest convex isotonic minorant of the upper boxes, at the knots."""
    K = t.shape[0]
    W = np.full(K, np.inf)
    hx = np.empty(K)
    hy = np.empty(K)
    h = 0
    last = -1
    for j in range(K):
        v = hi[j]
        if not np.isfinite(v):
            continue
        last = j
        while h >= 2 and (hy[h - 1] - hy[h - 2]) * (t[j] - hx[h - 1]) >= (v - hy[h - 1]) * (hx[h - 1] - hx[h - 2]):
            h -= 1
        hx[h] = t[j]
        hy[h] = v
        h += 1
    if last < 0:
        return W
    seg = 0
    for i in range(last + 1):
        x = t[i]
        if x <= hx[0]:
            W[i] = hy[0]
        elif x >= hx[h - 1]:
            W[i] = hy[h - 1]
        else:
            while seg < h - 2 and hx[seg + 1] < x:
                seg += 1
            lam = (x - hx[seg]) / (hx[seg + 1] - hx[seg])
            W[i] = hy[seg] + lam * (hy[seg + 1] - hy[seg])
    m = np.inf
    for i in range(last, -1, -1):
        if W[i] < m:
            m = W[i]
        W[i] = m
    return W


@njit(cache=True)
def _tangent_max_slope(hx, hy, h, px, py):
    """Max slope from point (px, py) to the vertices of a lower hull left of it."""
    lo, hi = 0, h - 1
    while lo < hi:
        mid = (lo + hi) // 2
        s1 = (py - hy[mid]) / (px - hx[mid])
        s2 = (py - hy[mid + 1]) / (px - hx[mid + 1])
        if s2 > s1:
            lo = mid + 1
        else:
            hi = mid
    return (py - hy[lo]) / (px - hx[lo])


@njit(cache=True)
def _lc_insert(xs, node_m, node_b, node_has, slope, icpt):
    """Insert a line into a Li Chao max-tree over the fixed points xs."""
    K = xs.shape[0]
    node = 1
    l, r = 0, K
    while True:
        if not node_has[node]:
            node_m[node] = slope
            node_b[node] = icpt
            node_has[node] = True
            return
        mid = (l + r) // 2
        if slope * xs[mid] + icpt > node_m[node] * xs[mid] + node_b[node]:
            tm = node_m[node]
            tb = node_b[node]
            node_m[node] = slope
            node_b[node] = icpt
            slope = tm
            icpt = tb
        if r - l == 1:
            return
        if slope * xs[l] + icpt > node_m[node] * xs[l] + node_b[node]:
            node = 2 * node
            r = mid
        else:
            node = 2 * node + 1
            l = mid


@njit(cache=True)
def _lc_query(xs, node_m, node_b, node_has, i):
    K = xs.shape[0]
    node = 1
    l, r = 0, K
    best = -np.inf
    x = xs[i]
    while True:
        if node_has[node]:
            v = node_m[node] * x + node_b[node]
            if v > best:
                best = v
        if r - l == 1:
            return best
        mid = (l + r) // 2
        if i < mid:
            node = 2 * node
            r = mid
        else:
            node = 2 * node + 1
            l = mid


@njit(cache=True)
def _hull_push(hx, hy, h, x, y):
    while h >= 2 and (hy[h - 1] - hy[h - 2]) * (x - hx[h - 1]) >= (y - hy[h - 1]) * (hx[h - 1] - hx[h - 2]):
        h -= 1
    hx[h] = x
    hy[h] = y
    return h + 1


@njit(cache=True)
def _convex_iso_min(t, lo, W):
    """Pointwise minima of the convex isotonic class (anchors = W)."""
    K = t.shape[0]
    out = np.full(K, -np.inf)
    run = -np.inf
    for i in range(K):
        if lo[i] > run:
            run = lo[i]
        out[i] = run
    # rightward extrapolation: lines anchored at (t_b, lo_b) with the
    # steepest chord against an earlier upper anchor
    node_m = np.zeros(4 * K)
    node_b = np.zeros(4 * K)
    node_has = np.zeros(4 * K, np.bool_)
    hx = np.empty(K)
    hy = np.empty(K)
    h = 0
    for k in range(K):
        if np.isfinite(lo[k]) and h > 0:
            s = _tangent_max_slope(hx, hy, h, t[k], lo[k])
            if s > 0.0:
                _lc_insert(t, node_m, node_b, node_has, s, lo[k] - s * t[k])
        if node_has[1]:
            v = _lc_query(t, node_m, node_b, node_has, k)
            if v > out[k]:
                out[k] = v
        if np.isfinite(W[k]):
            h = _hull_push(hx, hy, h, t[k], W[k])
    # leftward propagation: descending from (t_b, lo_b) at the flattest
    # chord toward a later upper anchor (reflected coordinates)
    for i in range(4 * K):
        node_has[i] = False
    h = 0
    for kr in range(K):
        k = K - 1 - kr
        if np.isfinite(lo[k]) and h > 0:
            s = _tangent_max_slope(hx, hy, h, -t[k], lo[k])
            srl = -s  # min slope in original coordinates
            if srl < 0.0:
                srl = 0.0
            _lc_insert(t, node_m, node_b, node_has, srl, lo[k] - srl * t[k])
        if node_has[1]:
            v = _lc_query(t, node_m, node_b, node_has, k)
            if v > out[k]:
                out[k] = v
        if np.isfinite(W[k]):
            h = _hull_push(hx, hy, h, -t[k], W[k])
    for i in range(K):
        if out[i] > W[i]:
            out[i] = W[i]
    return out


def _convex_extremes(t, lo, hi):
    W = _convex_iso_max(t, hi)
    scale = np.maximum(1.0, np.where(np.isfinite(lo), np.abs(lo), 1.0))
    if np.any(W < lo - _FEAS_TOL * scale):
        return False, None, None
    return True, _convex_iso_min(t, lo, W), W


def _concave_extremes(t, lo, hi):
    f, mn, mx = _convex_extremes(-t[::-1], -hi[::-1], -lo[::-1])
    if not f:
        return False, None, None
    return True, -mx[::-1], -mn[::-1]


def _envelope_arrays(z, lo, hi, mu):
    """Per-mu feasibility and pointwise extremes at the grid points."""
    K = len(z)
    if mu >= z[-1]:
        return _convex_extremes(z, lo, hi)
    if mu <= z[0]:
        return _concave_extremes(z, lo, hi)
    iz = int(np.searchsorted(z, mu))
    at_knot = iz < K and z[iz] == mu
    if at_knot:
        tl, lol, hil = z[:iz + 1], lo[:iz + 1].copy(), hi[:iz + 1].copy()
        tr, lor, hir = z[iz:], lo[iz:].copy(), hi[iz:].copy()
    else:
        tl = np.append(z[:iz], mu)
        lol = np.append(lo[:iz], -np.inf)
        hil = np.append(hi[:iz], np.inf)
        tr = np.append(mu, z[iz:])
        lor = np.append(-np.inf, lo[iz:])
        hir = np.append(np.inf, hi[iz:])
    f1, mn1, mx1 = _convex_extremes(tl, lol, hil)
    if not f1:
        return False, None, None
    f2, mn2, mx2 = _concave_extremes(tr, lor, hir)
    if not f2:
        return False, None, None
    wlo = max(mn1[-1], mn2[0])
    whi = min(mx1[-1], mx2[0])
    tol = _FEAS_TOL * max(1.0, abs(wlo) if np.isfinite(wlo) else 1.0)
    if wlo > whi + tol:
        return False, None, None
    whi = max(whi, wlo)
    lol[-1], hil[-1] = wlo, whi
    lor[0], hir[0] = wlo, whi
    f1, mn1, mx1 = _convex_extremes(tl, lol, hil)
    f2, mn2, mx2 = _concave_extremes(tr, lor, hir)
    if not (f1 and f2):  # numerically razor-thin junction interval
        return False, None, None
    if at_knot:
        mn = np.concatenate((mn1[:-1], [max(mn1[-1], mn2[0])], mn2[1:]))
        mx = np.concatenate((mx1[:-1], [min(mx1[-1], mx2[0])], mx2[1:]))
    else:
        mn = np.concatenate((mn1[:-1], mn2[1:]))
        mx = np.concatenate((mx1[:-1], mx2[1:]))
    return True, mn, mx


@dataclass(frozen=True)
class InflectionGrid:
    """Sorted candidate inflection points; may include -inf/+inf sentinels."""

    points: tuple[float, ...]

    def __post_init__(self):
        if len(self.points) == 0:
            raise ValueError("inflection grid is empty")
        pts = tuple(sorted(float(p) for p in self.points))
        if any(np.isnan(p) for p in pts):
            raise ValueError("inflection points must not be NaN")
        object.__setattr__(self, "points", pts)


def default_inflection_grid(grid: Grid) -> InflectionGrid:
    """All grid-cell midpoints plus the two sentinels.

    -inf admits globally concave candidates, +inf globally convex ones.
    """
    mids = 0.5 * (grid.z[:-1] + grid.z[1:])
    return InflectionGrid(points=(-np.inf, *map(float, mids), np.inf))


@dataclass
class SShapeRefinement:
    """Refined envelope plus per-inflection feasibility flags.

    When no inflection point is feasible, the refined arrays fall back to
    the unrefined band; any_feasible records that as diagnostic evidence
    against the S-shape hypothesis.
    """

    lower_refined: np.ndarray
    upper_refined: np.ndarray
    feasible_mu: dict

    @property
    def any_feasible(self) -> bool:
        return any(self.feasible_mu.values())


def envelope_at_mu(band: ConfidenceBand, mu: float):
    """(lower, upper, feasible) for S-shaped functions with inflection mu.

    The returned arrays are the pointwise infimum and supremum at the grid
    points over all continuous nondecreasing functions, convex on
    (-inf, mu] and concave on [mu, inf), that satisfy the band constraints
    at the grid points (infinite band values impose none).  Infeasibility
    is reported as data, not raised.
    """
    mu = float(mu)
    if np.isnan(mu):
        raise ValueError("inflection point must not be NaN")
    ok, mn, mx = _envelope_arrays(band.grid.z, band.lower, band.upper, mu)
    if not ok:
        return None, None, False
    return mn, mx, True


def refine(band: ConfidenceBand, mu_grid: InflectionGrid | None = None) -> SShapeRefinement:
    """Envelope over all admissible inflection points.

    lower_refined = min over feasible mu of the per-mu infimum, and
    upper_refined the corresponding max, so the refinement contains every
    S-shaped function with inflection in the grid that fits the band.
    """
    if mu_grid is None:
        mu_grid = default_inflection_grid(band.grid)
    lo_acc = None
    hi_acc = None
    feas = {}
    for mu in mu_grid.points:
        mn, mx, ok = envelope_at_mu(band, mu)
        feas[mu] = ok
        if not ok:
            continue
        if lo_acc is None:
            lo_acc, hi_acc = mn.copy(), mx.copy()
        else:
            np.minimum(lo_acc, mn, out=lo_acc)
            np.maximum(hi_acc, mx, out=hi_acc)
    if lo_acc is None:
        lo_acc = band.lower.copy()
        hi_acc = band.upper.copy()
    return SShapeRefinement(lower_refined=lo_acc, upper_refined=hi_acc, feasible_mu=feas)
