"""Coverage and width diagnostics on synthetic data.

Scenarios draw from a small catalog of regression models whose conditional
gamma-quantile curve is isotonic and available in closed form, so the
simultaneous coverage event {L(z_j) <= Q(z_j) <= U(z_j) for all j} can be
checked exactly at the grid points.  For monotone quantile curves the
step-function conventions extend grid-point coverage to the whole axis.

The catalog is synthetic (square-root location/scale families plus
constant and step curves); reports label the model explicitly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict
from typing import Callable

import numpy as np
from scipy.special import ndtri

from .band import compute_band
from .calibrate import CalibrationConfig, calibrate
from .design import CardinalityRule, Dataset, Grid, build_family, build_grid
from .streams import SCENARIO_DATA, SCENARIO_DESIGN, replicate_stream

__all__ = [
    "ScenarioSpec",
    "CoverageReport",
    "RateDiagnostic",
    "run_coverage",
    "run_rate_diagnostic",
    "MODEL_NAMES",
]

MODEL_NAMES = (
    "gauss-location",
    "laplace-location",
    "gauss-scale",
    "constant-gauss",
    "step-gauss",
)


@dataclass(frozen=True)
class _Model:
    sample: Callable
    quantile: Callable  # (x, gamma) -> Q_gamma(x)
    jump_x: float | None = None


def _laplace_ppf(gamma: float) -> float:
    return math.log(2.0 * gamma) if gamma <= 0.5 else -math.log(2.0 - 2.0 * gamma)


def make_model(name: str, x_range: tuple[float, float]) -> _Model:
    lo, hi = x_range
    if name == "gauss-location":
        return _Model(
            sample=lambda rng, x: np.sqrt(x - lo) + rng.standard_normal(len(x)),
            quantile=lambda x, g: np.sqrt(np.asarray(x) - lo) + ndtri(g),
        )
    if name == "laplace-location":
        return _Model(
            sample=lambda rng, x: np.sqrt(x - lo) + rng.laplace(0.0, 1.0, len(x)),
            quantile=lambda x, g: np.sqrt(np.asarray(x) - lo) + _laplace_ppf(g),
        )
    if name == "gauss-scale":
        # scale factor grows with x; the quantile curve stays isotonic for
        # every practically relevant gamma on (0, 50]-sized ranges
        def _scale(x):
            return 1.0 + (np.asarray(x) - lo) / (2.0 * (hi - lo))

        return _Model(
            sample=lambda rng, x: np.sqrt(x - lo) + _scale(x) * rng.standard_normal(len(x)),
            quantile=lambda x, g: np.sqrt(np.asarray(x) - lo) + _scale(x) * ndtri(g),
        )
    if name == "constant-gauss":
        return _Model(
            sample=lambda rng, x: 3.0 + rng.standard_normal(len(x)),
            quantile=lambda x, g: np.full(len(np.atleast_1d(x)), 3.0 + ndtri(g)),
        )
    if name == "step-gauss":
        mid = 0.5 * (lo + hi)
        return _Model(
            sample=lambda rng, x: 4.0 * (np.asarray(x) >= mid) + rng.standard_normal(len(x)),
            quantile=lambda x, g: 4.0 * (np.asarray(x) >= mid) + ndtri(g),
            jump_x=mid,
        )
    raise ValueError(f"unknown model {name!r}; choose from {MODEL_NAMES}")


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulation scenario; deterministic given seed."""

    n: int
    model: str = "gauss-location"
    design: str = "equispaced"  # "equispaced" | "uniform"
    x_range: tuple[float, float] = (0.0, 50.0)
    gamma: float = 0.5
    alpha: float = 0.1
    rule: CardinalityRule = field(default_factory=CardinalityRule)
    method: str = "bonferroni"  # "bonferroni" | "montecarlo" | "fixed"
    reps: int = 20000           # Monte Carlo calibration replicates
    fixed_kappa: float | None = None
    n_rep: int = 500            # coverage replicates
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.design not in ("equispaced", "uniform"):
            raise ValueError(f"unknown design {self.design!r}")
        if self.model not in MODEL_NAMES:
            raise ValueError(f"unknown model {self.model!r}")
        if self.n_rep < 1:
            raise ValueError("n_rep must be positive")

    def calibration(self) -> CalibrationConfig:
        return CalibrationConfig(
            gamma=self.gamma,
            alpha=self.alpha,
            method=self.method,
            reps=self.reps,
            seed=self.seed,
            kappa=self.fixed_kappa,
        )


@dataclass
class CoverageReport:
    """Empirical simultaneous coverage with binomial standard error."""

    spec: ScenarioSpec
    kappa: float
    coverage: float
    se: float
    n_covered: int
    median_center_width: float
    mean_center_width: float
    runtime_s: float

    def to_dict(self) -> dict:
        d = asdict(self.spec)
        d["rule"] = self.spec.rule.label()
        d["family"] = self.spec.rule.variant
        d["cap"] = self.spec.rule.cap
        d["x_range"] = list(self.spec.x_range)
        d.update(
            kappa=self.kappa,
            coverage=self.coverage,
            se=self.se,
            n_covered=self.n_covered,
            median_center_width=self.median_center_width,
            mean_center_width=self.mean_center_width,
        )
        return d

    def format_table(self) -> str:
        s = self.spec
        lines = [
            f"scenario: model={s.model} n={s.n} design={s.design} gamma={s.gamma} "
            f"alpha={s.alpha} rule={s.rule.label()} method={s.method} seed={s.seed}",
            f"kappa: {self.kappa:.6e}",
            f"coverage: {self.coverage:.4f} (se {self.se:.4f}, {self.n_covered}/{s.n_rep})",
            f"center width: median {self.median_center_width:.4f}, mean {self.mean_center_width:.4f}",
        ]
        return "\n".join(lines)


def _design_points(spec: ScenarioSpec, replicate: int) -> np.ndarray:
    lo, hi = spec.x_range
    if spec.design == "equispaced":
        return lo + (hi - lo) * np.arange(1, spec.n + 1) / spec.n
    rng = replicate_stream(spec.seed, replicate, SCENARIO_DESIGN)
    return np.sort(rng.uniform(lo, hi, spec.n))


def _center_width(grid: Grid, lower, upper, x_range) -> float:
    zc = int(np.argmin(np.abs(grid.z - 0.5 * (x_range[0] + x_range[1]))))
    return float(upper[zc] - lower[zc])


def run_coverage(spec: ScenarioSpec) -> CoverageReport:
    """Generate spec.n_rep datasets, compute the band, record coverage."""
    t0 = time.perf_counter()
    model = make_model(spec.model, spec.x_range)
    fixed_design = spec.design == "equispaced"
    grid = family = cv = None
    if fixed_design:
        x = _design_points(spec, 0)
        grid = build_grid(Dataset(x, np.zeros_like(x)))
        family = build_family(grid, spec.rule)
        cv = calibrate(family, grid, spec.calibration())
    covered = np.zeros(spec.n_rep, dtype=bool)
    widths = np.empty(spec.n_rep)
    for r in range(spec.n_rep):
        if not fixed_design:
            x = _design_points(spec, r)
            grid = build_grid(Dataset(x, np.zeros_like(x)))
            family = build_family(grid, spec.rule)
            cv = calibrate(family, grid, spec.calibration())
        y = model.sample(replicate_stream(spec.seed, r, SCENARIO_DATA), x)
        data = Dataset.from_pairs(x, y)
        band = compute_band(data, grid, family, cv)
        q = model.quantile(grid.z, spec.gamma)
        covered[r] = bool(np.all(band.lower <= q) and np.all(q <= band.upper))
        widths[r] = _center_width(grid, band.lower, band.upper, spec.x_range)
    p = float(covered.mean())
    se = math.sqrt(p * (1.0 - p) / spec.n_rep)
    return CoverageReport(
        spec=spec,
        kappa=float(cv.kappa),
        coverage=p,
        se=se,
        n_covered=int(covered.sum()),
        median_center_width=float(np.median(widths)),
        mean_center_width=float(np.mean(widths)),
        runtime_s=time.perf_counter() - t0,
    )


@dataclass
class RateDiagnostic:
    """Band widths across sample sizes, against rho_n = log(n)/n.

    width_rho_slope is the fitted slope of log median center width on
    log rho_n (recorded for comparison with shape-constrained rate
    theory; the constants are scenario-dependent and not asserted).
    """

    records: list
    width_rho_slope: float | None

    def to_dict(self) -> dict:
        return {"records": self.records, "width_rho_slope": self.width_rho_slope}

    def format_table(self) -> str:
        lines = ["    n        rho   median width   crossing window"]
        for r in self.records:
            cw = f"{r['median_crossing_window']:.4f}" if r["median_crossing_window"] is not None else "-"
            lines.append(f"{r['n']:5d}  {r['rho']:.6f}   {r['median_center_width']:12.4f}   {cw}")
        if self.width_rho_slope is not None:
            lines.append(f"slope of log(width) vs log(rho): {self.width_rho_slope:.3f}")
        return "\n".join(lines)


def _crossing_window(grid: Grid, lower, upper, midline: float) -> float:
    """z-extent of the region where the band straddles a horizontal line."""
    inside = (lower <= midline) & (midline <= upper)
    if not np.any(inside):
        return 0.0
    idx = np.flatnonzero(inside)
    return float(grid.z[idx[-1]] - grid.z[idx[0]])


def run_rate_diagnostic(specs: list[ScenarioSpec]) -> RateDiagnostic:
    """Median widths (and discontinuity crossing windows) across n."""
    records = []
    for spec in specs:
        model = make_model(spec.model, spec.x_range)
        fixed_design = spec.design == "equispaced"
        grid = family = cv = None
        if fixed_design:
            x = _design_points(spec, 0)
            grid = build_grid(Dataset(x, np.zeros_like(x)))
            family = build_family(grid, spec.rule)
            cv = calibrate(family, grid, spec.calibration())
        widths = np.empty(spec.n_rep)
        windows = np.empty(spec.n_rep)
        for r in range(spec.n_rep):
            if not fixed_design:
                x = _design_points(spec, r)
                grid = build_grid(Dataset(x, np.zeros_like(x)))
                family = build_family(grid, spec.rule)
                cv = calibrate(family, grid, spec.calibration())
            y = model.sample(replicate_stream(spec.seed, r, SCENARIO_DATA), x)
            data = Dataset.from_pairs(x, y)
            band = compute_band(data, grid, family, cv)
            widths[r] = _center_width(grid, band.lower, band.upper, spec.x_range)
            if model.jump_x is not None:
                qlo = float(model.quantile(np.array([model.jump_x - 1e-9]), spec.gamma)[0])
                qhi = float(model.quantile(np.array([model.jump_x + 1e-9]), spec.gamma)[0])
                windows[r] = _crossing_window(grid, band.lower, band.upper, 0.5 * (qlo + qhi))
            else:
                windows[r] = np.nan
        records.append(
            {
                "n": spec.n,
                "model": spec.model,
                "gamma": spec.gamma,
                "rho": math.log(spec.n) / spec.n,
                "median_center_width": float(np.median(widths)),
                "median_crossing_window": (
                    float(np.median(windows)) if model.jump_x is not None else None
                ),
            }
        )
    slope = None
    ws = [r["median_center_width"] for r in records]
    if len(records) >= 2 and all(np.isfinite(w) and w > 0 for w in ws):
        lr = np.log([r["rho"] for r in records])
        lw = np.log(ws)
        slope = float(np.polyfit(lr, lw, 1)[0])
    return RateDiagnostic(records=records, width_rho_slope=slope)
