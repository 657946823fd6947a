"""Critical-value calibration.

Coverage reduces to an event about Bernoulli(gamma) sums over the interval
family: with T_l(B) the number of successes among observations in B and
T_u(B) = N(B) - T_l(B), the band covers whenever

    T_l(B) >= c_l(N(B))  and  T_u(B) >= c_u(N(B))   for every member B,

where c_l(m) and c_u(m) are kappa-quantiles of Bin(m, gamma) and
Bin(m, 1 - gamma).  kappa is chosen either by bisecting the Bonferroni
bound

    sum_m h_m [F_{m,gamma}(c_l(m) - 1) + F_{m,1-gamma}(c_u(m) - 1)]

against alpha, or as a Monte Carlo estimate of the alpha-quantile of the
union-intersection statistic

    min_B min{ F_{N(B),gamma}(T_l(B)), F_{N(B),1-gamma}(T_u(B)) }.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .binomial import binom_cdf_arr, binom_quantile_arr
from .design import Grid, IntervalFamily
from .streams import CALIBRATION, replicate_stream

__all__ = [
    "CalibrationConfig",
    "CriticalValues",
    "critical_values",
    "bonferroni_bound",
    "kappa_bonferroni",
    "ui_statistic",
    "kappa_monte_carlo",
    "calibrate",
]

# relative bisection tolerance: pins kappa to 7 significant digits
BISECT_RTOL = 1e-7


@dataclass(frozen=True)
class CalibrationConfig:
    """Quantile level, miscoverage level and kappa selection method."""

    gamma: float
    alpha: float
    method: str = "bonferroni"  # "bonferroni" | "montecarlo" | "fixed"
    reps: int = 199999
    seed: int = 0
    kappa: float | None = None  # for method="fixed"

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.method not in ("bonferroni", "montecarlo", "fixed"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "montecarlo" and self.reps < 1:
            raise ValueError("Monte Carlo needs at least one replicate")
        if self.method == "fixed":
            if self.kappa is None or not 0.0 < self.kappa <= 1.0:
                raise ValueError("fixed method needs kappa in (0, 1]")


@dataclass(frozen=True)
class CriticalValues:
    """kappa together with c_l(m), c_u(m) for m = 1..n (index by m)."""

    kappa: float
    gamma: float
    c_lower: np.ndarray  # int64, length n + 1, entry 0 unused (= 0)
    c_upper: np.ndarray

    @property
    def n(self) -> int:
        return len(self.c_lower) - 1


def critical_values(kappa: float, gamma: float, n: int) -> CriticalValues:
    """Fill both critical arrays by binomial quantiles."""
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must be in (0, 1], got {kappa}")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    ms = np.arange(1, n + 1, dtype=np.int64)
    c_lower = np.zeros(n + 1, dtype=np.int64)
    c_upper = np.zeros(n + 1, dtype=np.int64)
    c_lower[1:] = binom_quantile_arr(ms, gamma, kappa)
    c_upper[1:] = binom_quantile_arr(ms, 1.0 - gamma, kappa)
    return CriticalValues(kappa=kappa, gamma=gamma, c_lower=c_lower, c_upper=c_upper)


def bonferroni_bound(family: IntervalFamily, gamma: float, kappa: float) -> float:
    """Union bound on the miscoverage event at per-interval level kappa."""
    ms, hs = family.h()
    cl = binom_quantile_arr(ms, gamma, kappa)
    cu = binom_quantile_arr(ms, 1.0 - gamma, kappa)
    terms = binom_cdf_arr(ms, gamma, cl - 1) + binom_cdf_arr(ms, 1.0 - gamma, cu - 1)
    return float(np.sum(hs * terms))


def kappa_bonferroni(family: IntervalFamily, gamma: float, alpha: float) -> float:
    """Maximal kappa whose Bonferroni bound stays at or below alpha.

    Bisection on log kappa; the bound is nondecreasing in kappa and is
    below alpha for kappa <= alpha / (2 * family.size), so the bracket
    start is always feasible.
    """
    d = family.n_distinct
    lo = alpha / (d * (d + 1)) * 1e-2
    hi = 1.0
    if bonferroni_bound(family, gamma, hi) <= alpha:
        return hi
    while hi / lo - 1.0 > BISECT_RTOL:
        mid = math.sqrt(lo * hi)
        if bonferroni_bound(family, gamma, mid) <= alpha:
            lo = mid
        else:
            hi = mid
    return lo


def _family_tables(family: IntervalFamily, gamma: float):
    """Flattened per-interval-size CDF tables for statistic lookups.

    Returns (tab_l, tab_u, member_offset): for a member with N(B) = m and
    success count t, F_{m,gamma}(t) = tab_l[member_offset + t] and
    F_{m,1-gamma}(t) = tab_u[member_offset + t].
    """
    dist = np.unique(family.count)
    sizes = dist + 1
    offsets = np.zeros(len(dist), dtype=np.int64)
    np.cumsum(sizes[:-1], out=offsets[1:])
    total = int(sizes.sum())
    tab_l = np.empty(total, dtype=np.float64)
    tab_u = np.empty(total, dtype=np.float64)
    for m, off in zip(dist, offsets):
        ks = np.arange(m + 1, dtype=np.int64)
        mm = np.full(m + 1, m, dtype=np.int64)
        tab_l[off:off + m + 1] = binom_cdf_arr(mm, gamma, ks)
        tab_u[off:off + m + 1] = binom_cdf_arr(mm, 1.0 - gamma, ks)
    member_offset = offsets[np.searchsorted(dist, family.count)]
    return tab_l, tab_u, member_offset


def _obs_windows(family: IntervalFamily, grid: Grid):
    """Observation index ranges [wlo, whi) per member."""
    wlo = grid.prefix[family.start]
    whi = grid.prefix[family.stop + 1]
    return wlo, whi


def ui_statistic(xi: np.ndarray, family: IntervalFamily, grid: Grid, gamma: float) -> float:
    """Union-intersection statistic for one Bernoulli vector xi.

    xi is a 0/1 vector aligned with the observation order.  Cost is one
    prefix-sum plus O(family.size) table lookups.
    """
    xi = np.asarray(xi)
    if xi.shape != (grid.n,):
        raise ValueError(f"xi must have length {grid.n}")
    tab_l, tab_u, off = _family_tables(family, gamma)
    wlo, whi = _obs_windows(family, grid)
    pref = np.zeros(grid.n + 1, dtype=np.int64)
    np.cumsum(xi, out=pref[1:])
    tl = pref[whi] - pref[wlo]
    tu = family.count - tl
    return float(np.minimum(tab_l[off + tl], tab_u[off + tu]).min())


def bernoulli_from_uniforms(u: np.ndarray, p: float) -> np.ndarray:
    """Success indicators from a uniform block, rows = replicates.

    For p <= 1/2 the draw is xi_i = 1[u_i <= p]; for p > 1/2 it is
    xi_i = 1[u_{n-1-i} > 1-p].  Both give i.i.d. Bernoulli(p) rows, and the
    convention makes the simulated statistic identical for a problem and
    its order-reversing, success/failure-swapping mirror image under the
    same seed, which is what makes one kappa serve both band halves.
    """
    if p <= 0.5:
        return u <= p
    return u[..., ::-1] > (1.0 - p)


def _simulate_statistics(
    family: IntervalFamily,
    grid: Grid,
    gamma: float,
    reps: int,
    seed: int,
    block: int = 512,
) -> np.ndarray:
    tab_l, tab_u, off = _family_tables(family, gamma)
    wlo, whi = _obs_windows(family, grid)
    n = grid.n
    stats = np.empty(reps, dtype=np.float64)
    buf = np.empty((block, n), dtype=np.float64)
    done = 0
    while done < reps:
        b = min(block, reps - done)
        for r in range(b):
            replicate_stream(seed, done + r, CALIBRATION).random(n, out=buf[r])
        xi = bernoulli_from_uniforms(buf[:b], gamma).astype(np.int64)
        pref = np.zeros((b, n + 1), dtype=np.int64)
        np.cumsum(xi, axis=1, out=pref[:, 1:])
        tl = pref[:, whi] - pref[:, wlo]
        pv = np.minimum(tab_l[off + tl], tab_u[off + (family.count - tl)])
        stats[done:done + b] = pv.min(axis=1)
        done += b
    return stats


def empirical_quantile_index(alpha: float, reps: int) -> int:
    """1-based order-statistic index: ceil(alpha * (reps + 1)), clamped."""
    return min(max(math.ceil(alpha * (reps + 1)), 1), reps)


def kappa_monte_carlo(family: IntervalFamily, grid: Grid, config: CalibrationConfig) -> float:
    """Monte Carlo alpha-quantile of the union-intersection statistic.

    Deterministic given config.seed: replicate r draws its uniforms from a
    counter-based stream keyed by (seed, r), so any execution schedule
    yields the same sorted sample.
    """
    if config.method != "montecarlo":
        raise ValueError("config.method must be 'montecarlo'")
    stats = _simulate_statistics(family, grid, config.gamma, config.reps, config.seed)
    k = empirical_quantile_index(config.alpha, config.reps)
    return float(np.partition(stats, k - 1)[k - 1])


def calibrate(family: IntervalFamily, grid: Grid, config: CalibrationConfig) -> CriticalValues:
    """Pick kappa per config and build the critical arrays for n = grid.n."""
    if config.method == "bonferroni":
        kappa = kappa_bonferroni(family, config.gamma, config.alpha)
    elif config.method == "montecarlo":
        kappa = kappa_monte_carlo(family, grid, config)
    else:
        kappa = float(config.kappa)
    return critical_values(kappa, config.gamma, grid.n)
