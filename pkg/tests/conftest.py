"""Shared test helpers: independent oracles and instance generators."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import linprog

from quantband import CardinalityRule, Dataset, critical_values


# ---------------------------------------------------------------------------
# independent linear-programming oracle for the S-shape envelope
# ---------------------------------------------------------------------------

def lp_sshape_envelope(z, lo, hi, mu):
    """Exact per-coordinate extremes of S-shaped functions within boxes.

    Independent of the geometric implementation: builds the slope
    constraints explicitly (knot inserted at mu) and solves two LPs per
    coordinate with HiGHS.  Returns (feasible, mins, maxs) at the z knots.
    """
    z = np.asarray(z, dtype=float)
    if np.isfinite(mu) and z[0] < mu < z[-1] and mu not in z:
        knots = np.sort(np.append(z, mu))
    else:
        knots = z
    K = len(knots)
    blo = np.full(K, -np.inf)
    bhi = np.full(K, np.inf)
    for zz, l, h in zip(z, lo, hi):
        i = int(np.searchsorted(knots, zz))
        blo[i], bhi[i] = l, h
    rows, rhs = [], []
    for i in range(K - 1):
        row = np.zeros(K)
        d = knots[i + 1] - knots[i]
        row[i + 1] -= 1.0 / d
        row[i] += 1.0 / d
        rows.append(row)
        rhs.append(0.0)
    for i in range(K - 2):
        d1 = knots[i + 1] - knots[i]
        d2 = knots[i + 2] - knots[i + 1]
        if knots[i + 2] <= mu:  # both segments on the convex side
            row = np.zeros(K)
            row[i] -= 1.0 / d1
            row[i + 1] += 1.0 / d1 + 1.0 / d2
            row[i + 2] -= 1.0 / d2
            rows.append(row)
            rhs.append(0.0)
        if knots[i] >= mu:  # both segments on the concave side
            row = np.zeros(K)
            row[i] += 1.0 / d1
            row[i + 1] -= 1.0 / d1 + 1.0 / d2
            row[i + 2] += 1.0 / d2
            rows.append(row)
            rhs.append(0.0)
    A = np.array(rows) if rows else None
    b = np.array(rhs) if rhs else None
    bounds = [
        (blo[i] if np.isfinite(blo[i]) else None, bhi[i] if np.isfinite(bhi[i]) else None)
        for i in range(K)
    ]
    feas = linprog(np.zeros(K), A_ub=A, b_ub=b, bounds=bounds, method="highs")
    if feas.status == 2:
        return False, None, None
    mins, maxs = np.empty(K), np.empty(K)
    for k in range(K):
        c = np.zeros(K)
        c[k] = 1.0
        r = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
        # feasibility is established, so a status-2 answer here is HiGHS
        # presolve flagging "infeasible or unbounded": treat as unbounded
        mins[k] = -np.inf if r.status in (2, 3) else r.fun
        c[k] = -1.0
        r = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
        maxs[k] = np.inf if r.status in (2, 3) else -r.fun
    keep = np.isin(knots, z)
    return True, mins[keep], maxs[keep]


# ---------------------------------------------------------------------------
# random band-problem instances
# ---------------------------------------------------------------------------

ALL_RULES = tuple(
    CardinalityRule(variant=v, cap=c)
    for v in ("all", "triangular", "fibonacci", "pow2")
    for c in ("half", "full")
)


def random_dataset(rng, max_n=40) -> Dataset:
    """Random dataset with ties in x and y occurring often."""
    n = int(rng.integers(1, max_n + 1))
    if rng.random() < 0.5:
        x = rng.integers(0, max(2, n // 2 + 1), n).astype(float)
    else:
        x = np.round(rng.normal(size=n), 2)
    if rng.random() < 0.5:
        y = rng.integers(-3, 4, n).astype(float)
    else:
        y = np.round(rng.normal(size=n), 2)
    return Dataset.from_pairs(x, y)


def cv_for(kappa, gamma, n):
    return critical_values(kappa, gamma, n)


@pytest.fixture(scope="session")
def oracle_kappas():
    return (0.001, 0.05, 0.3, 0.6)
