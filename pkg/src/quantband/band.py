"""Confidence band computation.

naive_band evaluates the defining suprema/infima directly (O(#family * n),
used as the testing oracle).  compute_lower runs the quadratic sweep: the
current level r starts at -infinity and, for each grid index k, the window
[z_j, z_k] is scanned leftwards; whenever a family member violates
S([z_j, z_k], r) < c_l(N_k - N_{j-1}), r advances to the smallest response
above r inside the scanned window and the scan restarts at k.  Each
restart strictly advances (k, r), which bounds the total work by O(n^2).
compute_upper reuses the sweep on the point-reflected data (-x, -y) with
the upper critical array.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calibrate import CriticalValues
from .design import Dataset, Grid, IntervalFamily, build_grid

__all__ = [
    "ConfidenceBand",
    "naive_band",
    "compute_lower",
    "compute_upper",
    "compute_band",
    "evaluate",
]


@dataclass
class ConfidenceBand:
    """Step-function band on the grid.

    lower is constant on [z_j, z_{j+1}) and -inf left of z_1; upper is
    constant on (z_{j-1}, z_j] and +inf right of z_d.  Finite values are
    always observed responses.
    """

    grid: Grid
    lower: np.ndarray
    upper: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def crossing(self) -> bool:
        """True when the lower bound exceeds the upper bound somewhere."""
        return bool(np.any(self.lower > self.upper))


def _rank_matrix(data: Dataset, grid: Grid):
    """w (distinct sorted y) and D with D[J, T] = #{i: x_i <= z_J, y_i <= w_T}.

    Rows are grid prefixes (J = 0..d), columns response-rank prefixes
    (T = 0, meaning level -inf, up to T = len(w)).
    """
    w = np.unique(data.y)
    gi = np.searchsorted(grid.z, data.x)
    yr = np.searchsorted(w, data.y)
    d, q = grid.n_distinct, len(w)
    D = np.zeros((d + 1, q + 1), dtype=np.int32)
    np.add.at(D, (gi + 1, yr + 1), 1)
    np.cumsum(D, axis=0, out=D)
    np.cumsum(D, axis=1, out=D)
    return w, D


def _sweep_lower(grid: Grid, cards: np.ndarray, c_arr: np.ndarray, w: np.ndarray, D: np.ndarray):
    """Level sweep; returns (levels as float with -inf, visited step count)."""
    d = grid.n_distinct
    N = grid.prefix
    out = np.empty(d, dtype=np.float64)
    t = 0  # current level rank; 0 encodes -inf, t >= 1 encodes w[t-1]
    steps = 0
    for k in range(d):
        kk = k + 1
        nd = int(np.searchsorted(cards, kk, side="right"))
        ds = cards[:nd]
        rows = kk - ds
        cs = c_arr[N[kk] - N[rows]]
        while True:
            viol = np.flatnonzero((D[kk, t] - D[rows, t]) < cs)
            if viol.size == 0:
                steps += kk
                break
            dstar = int(ds[viol[0]])
            steps += dstar
            row = kk - dstar
            win = D[kk, t:] - D[row, t:]
            t += int(np.searchsorted(win, win[0], side="right"))
        out[k] = -np.inf if t == 0 else w[t - 1]
    return out, steps


def compute_lower(
    data: Dataset,
    grid: Grid,
    family: IntervalFamily,
    cv: CriticalValues,
    return_steps: bool = False,
):
    """Lower bound array L(z_j); equals naive_band's lower array exactly."""
    w, D = _rank_matrix(data, grid)
    out, steps = _sweep_lower(grid, family.cards, cv.c_lower, w, D)
    return (out, steps) if return_steps else out


def compute_upper(
    data: Dataset,
    grid: Grid,
    family: IntervalFamily,
    cv: CriticalValues,
    return_steps: bool = False,
):
    """Upper bound array U(z_j) via the sweep on point-reflected data.

    Valid because the family is closed under grid reversal, so the
    reflected problem uses the same cardinality set.
    """
    rdata = Dataset.from_pairs(-data.x, -data.y)
    rgrid = build_grid(rdata)
    w, D = _rank_matrix(rdata, rgrid)
    out, steps = _sweep_lower(rgrid, family.cards, cv.c_upper, w, D)
    out = -out[::-1]
    return (out, steps) if return_steps else out


def compute_band(
    data: Dataset,
    grid: Grid,
    family: IntervalFamily,
    cv: CriticalValues,
    meta: dict | None = None,
) -> ConfidenceBand:
    lower = compute_lower(data, grid, family, cv)
    upper = compute_upper(data, grid, family, cv)
    return ConfidenceBand(grid=grid, lower=lower, upper=upper, meta=dict(meta or {}))


def naive_band(
    data: Dataset,
    grid: Grid,
    family: IntervalFamily,
    cv: CriticalValues,
    meta: dict | None = None,
) -> ConfidenceBand:
    """Direct evaluation of the band definition (testing oracle).

    L(z_t) is the largest c_l(N(B))-th order statistic over members with
    max(B) <= z_t (empty set: -inf); U(z_t) the smallest
    (N(B)+1-c_u(N(B)))-th over members with min(B) >= z_t (empty: +inf).
    """
    d = grid.n_distinct
    lo_best = np.full(d, -np.inf)
    up_best = np.full(d, np.inf)
    for s, e, m in zip(family.start, family.stop, family.count):
        ys = np.sort(data.y[grid.prefix[s]:grid.prefix[e + 1]])
        cl = cv.c_lower[m]
        if cl >= 1:
            v = ys[cl - 1]
            if v > lo_best[e]:
                lo_best[e] = v
        cu = cv.c_upper[m]
        if cu >= 1:
            v = ys[m - cu]
            if v < up_best[s]:
                up_best[s] = v
    lower = np.maximum.accumulate(lo_best)
    upper = np.minimum.accumulate(up_best[::-1])[::-1]
    return ConfidenceBand(grid=grid, lower=lower, upper=upper, meta=dict(meta or {}))


def evaluate(band: ConfidenceBand, x):
    """Band values at x per the step conventions.

    L(x) = -inf left of z_1 and constant on [z_j, z_{j+1}); U(x) = +inf
    right of z_d and constant on (z_{j-1}, z_j].
    """
    xs = np.asarray(x, dtype=np.float64)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    z = band.grid.z
    li = np.searchsorted(z, xs, side="right") - 1
    lo = np.where(li >= 0, band.lower[np.clip(li, 0, len(z) - 1)], -np.inf)
    ui = np.searchsorted(z, xs, side="left")
    up = np.where(ui < len(z), band.upper[np.clip(ui, 0, len(z) - 1)], np.inf)
    if scalar:
        return float(lo[0]), float(up[0])
    return lo, up
