"""Band tests: naive-definition oracle vs the quadratic sweep."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantband import (
    CardinalityRule,
    ConfidenceBand,
    CriticalValues,
    Dataset,
    build_family,
    build_grid,
    compute_band,
    compute_lower,
    compute_upper,
    critical_values,
    evaluate,
    naive_band,
)

from conftest import ALL_RULES, random_dataset


def _zero_cv(gamma, n):
    z = np.zeros(n + 1, dtype=np.int64)
    return CriticalValues(kappa=1e-300, gamma=gamma, c_lower=z, c_upper=z.copy())


def test_zero_critical_values_give_infinite_band():
    data = Dataset.from_pairs([1.0, 2.0, 4.0], [3.0, 1.0, 2.0])
    grid = build_grid(data)
    fam = build_family(grid, CardinalityRule("all", "full"))
    cv = _zero_cv(0.5, 3)
    nb = naive_band(data, grid, fam, cv)
    assert np.all(np.isneginf(nb.lower)) and np.all(np.isposinf(nb.upper))
    lo, steps = compute_lower(data, grid, fam, cv, return_steps=True)
    assert np.all(np.isneginf(lo))
    assert steps == 1 + 2 + 3  # one completing scan per grid point, no restarts
    up = compute_upper(data, grid, fam, cv)
    assert np.all(np.isposinf(up))


def test_three_point_example():
    data = Dataset.from_pairs([1, 2, 3], [5, 6, 7])
    grid = build_grid(data)
    fam = build_family(grid, CardinalityRule("all", "full"))
    cv = critical_values(0.6, 0.5, 3)
    np.testing.assert_array_equal(cv.c_lower[1:], [1, 1, 2])
    nb = naive_band(data, grid, fam, cv)
    np.testing.assert_array_equal(nb.lower, [5, 6, 7])
    np.testing.assert_array_equal(nb.upper, [5, 6, 7])
    band = compute_band(data, grid, fam, cv)
    np.testing.assert_array_equal(band.lower, [5, 6, 7])
    np.testing.assert_array_equal(band.upper, [5, 6, 7])


def test_single_point():
    data = Dataset.from_pairs([2.0], [9.0])
    grid = build_grid(data)
    fam = build_family(grid, CardinalityRule("all", "full"))
    cv = critical_values(0.8, 0.5, 1)  # c(1) = 1
    band = compute_band(data, grid, fam, cv)
    assert band.lower[0] == 9.0 and band.upper[0] == 9.0
    cv0 = _zero_cv(0.5, 1)
    band0 = compute_band(data, grid, fam, cv0)
    assert np.isneginf(band0.lower[0]) and np.isposinf(band0.upper[0])


def oracle_equivalence_run(n_instances, seed, kappas=(0.001, 0.05, 0.3, 0.6), max_n=40):
    """Sweep vs naive oracle on random tied instances; returns mismatches."""
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(n_instances):
        data = random_dataset(rng, max_n=max_n)
        grid = build_grid(data)
        rule = ALL_RULES[i % len(ALL_RULES)]
        fam = build_family(grid, rule)
        gamma = float(rng.choice([0.25, 0.5, 0.77]))
        kappa = float(kappas[i % len(kappas)])
        cv = critical_values(kappa, gamma, grid.n)
        nb = naive_band(data, grid, fam, cv)
        lo = compute_lower(data, grid, fam, cv)
        up = compute_upper(data, grid, fam, cv)
        if not (np.array_equal(lo, nb.lower) and np.array_equal(up, nb.upper)):
            bad.append((i, rule.label(), gamma, kappa))
    return bad


def test_sweep_matches_naive_oracle_200_instances():
    assert oracle_equivalence_run(200, seed=2024) == []


def test_sweep_matches_naive_at_extreme_kappa():
    # kappa = 1 forces c(m) = m: the tightest possible selection
    assert oracle_equivalence_run(20, seed=5, kappas=(1.0,)) == []


def test_sweep_matches_naive_at_larger_scale():
    # a few heavier instances catch indexing bugs that only appear once
    # windows span many tied groups
    assert oracle_equivalence_run(8, seed=99, max_n=220) == []


def test_band_arrays_monotone():
    rng = np.random.default_rng(31)
    for _ in range(30):
        data = random_dataset(rng)
        grid = build_grid(data)
        fam = build_family(grid, CardinalityRule("all", "half"))
        cv = critical_values(0.4, 0.5, grid.n)
        band = compute_band(data, grid, fam, cv)
        assert np.all(band.lower[1:] >= band.lower[:-1])
        assert np.all(band.upper[1:] >= band.upper[:-1])


def test_scale_shift_equivariance():
    rng = np.random.default_rng(8)
    data = random_dataset(rng, max_n=30)
    grid = build_grid(data)
    fam = build_family(grid, CardinalityRule("triangular", "half"))
    cv = critical_values(0.2, 0.3, grid.n)
    band = compute_band(data, grid, fam, cv)
    a, b = 2.5, -7.0
    data2 = Dataset.from_pairs(data.x, a * data.y + b)
    band2 = compute_band(data2, grid, fam, cv)
    np.testing.assert_allclose(band2.lower, a * band.lower + b, atol=1e-12)
    np.testing.assert_allclose(band2.upper, a * band.upper + b, atol=1e-12)


def test_crossing_flag():
    # steeply decreasing responses break the isotonic hypothesis; with a
    # large kappa the bounds cross and the band reports it as data
    n = 30
    x = np.arange(1.0, n + 1)
    y = -10.0 * x
    data = Dataset.from_pairs(x, y)
    grid = build_grid(data)
    fam = build_family(grid, CardinalityRule("all", "half"))
    cv = critical_values(0.9, 0.5, n)
    band = compute_band(data, grid, fam, cv)
    assert band.crossing
    # isotonic data with the same setup stays consistent
    data2 = Dataset.from_pairs(x, 10.0 * x)
    band2 = compute_band(data2, grid, fam, cv)
    assert not band2.crossing
    assert np.all(band2.lower <= band2.upper)


def test_evaluate_conventions():
    data = Dataset.from_pairs([1.0, 2.0, 4.0], [1.0, 2.0, 3.0])
    grid = build_grid(data)
    band = ConfidenceBand(grid=grid, lower=np.array([10., 20., 30.]),
                          upper=np.array([11., 21., 31.]))
    assert evaluate(band, 0.5) == (-np.inf, 11.0)     # left of the grid
    assert evaluate(band, 1.0) == (10.0, 11.0)        # at a grid point
    assert evaluate(band, 3.0) == (20.0, 31.0)        # strictly between
    assert evaluate(band, 4.0) == (30.0, 31.0)
    assert evaluate(band, 9.0) == (30.0, np.inf)      # right of the grid
    lo, up = evaluate(band, np.array([0.5, 1.0, 3.0, 9.0]))
    np.testing.assert_array_equal(lo, [-np.inf, 10.0, 20.0, 30.0])
    np.testing.assert_array_equal(up, [11.0, 11.0, 31.0, np.inf])


@settings(max_examples=80, deadline=None)
@given(x=st.floats(-10, 10), seed=st.integers(0, 10_000))
def test_evaluate_matches_manual_lookup(x, seed):
    rng = np.random.default_rng(seed)
    data = random_dataset(rng, max_n=12)
    grid = build_grid(data)
    fam = build_family(grid, CardinalityRule("all", "full"))
    cv = critical_values(0.3, 0.5, grid.n)
    band = compute_band(data, grid, fam, cv)
    lo, up = evaluate(band, x)
    z = grid.z
    want_lo = -np.inf
    for j in range(len(z)):
        if z[j] <= x:
            want_lo = band.lower[j]
    want_up = np.inf
    for j in range(len(z) - 1, -1, -1):
        if z[j] >= x:
            want_up = band.upper[j]
    assert lo == want_lo and up == want_up


def test_upper_equals_reflected_lower():
    rng = np.random.default_rng(77)
    for _ in range(15):
        data = random_dataset(rng, max_n=25)
        grid = build_grid(data)
        fam = build_family(grid, CardinalityRule("pow2", "half"))
        gamma = 0.4
        cv = critical_values(0.12, gamma, grid.n)
        up = compute_upper(data, grid, fam, cv)
        # direct reflection by hand
        rdata = Dataset.from_pairs(-data.x, -data.y)
        rgrid = build_grid(rdata)
        rfam = build_family(rgrid, CardinalityRule("pow2", "half"))
        rcv = CriticalValues(kappa=cv.kappa, gamma=1 - gamma,
                             c_lower=cv.c_upper, c_upper=cv.c_lower)
        lo = compute_lower(rdata, rgrid, rfam, rcv)
        np.testing.assert_array_equal(up, -lo[::-1])


def test_steps_counter_scale():
    rng = np.random.default_rng(4)
    data = random_dataset(rng, max_n=35)
    grid = build_grid(data)
    fam = build_family(grid, CardinalityRule("triangular", "half"))
    cv = critical_values(0.3, 0.5, grid.n)
    _, steps = compute_lower(data, grid, fam, cv, return_steps=True)
    d = grid.n_distinct
    assert steps >= d * (d + 1) // 2           # at least the completing scans
    assert steps <= 4 * grid.n * grid.n + 10   # quadratic bound with slack
