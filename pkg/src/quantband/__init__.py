"""Simultaneous confidence bands for isotonic quantile curves.

Finite-sample simultaneous (1 - alpha)-confidence bands for a
nondecreasing gamma-quantile curve in univariate regression, calibrated by
exact binomial tail bounds (Bonferroni bisection or Monte Carlo), with a
quadratic-time band sweep, an optional S-shape refinement, and a coverage
simulation harness.
"""

from .binomial import binom_cdf, binom_quantile
from .design import CardinalityRule, Dataset, Grid, IntervalFamily, build_family, build_grid, expand_rule
from .calibrate import (
    CalibrationConfig,
    CriticalValues,
    bonferroni_bound,
    calibrate,
    critical_values,
    kappa_bonferroni,
    kappa_monte_carlo,
    ui_statistic,
)
from .band import ConfidenceBand, compute_band, compute_lower, compute_upper, evaluate, naive_band
from .sshape import InflectionGrid, SShapeRefinement, default_inflection_grid, envelope_at_mu, refine
from .simulate import CoverageReport, RateDiagnostic, ScenarioSpec, run_coverage, run_rate_diagnostic

__version__ = "0.1.0"

__all__ = [
    "binom_cdf",
    "binom_quantile",
    "Dataset",
    "Grid",
    "CardinalityRule",
    "IntervalFamily",
    "build_grid",
    "expand_rule",
    "build_family",
    "CalibrationConfig",
    "CriticalValues",
    "critical_values",
    "bonferroni_bound",
    "kappa_bonferroni",
    "ui_statistic",
    "kappa_monte_carlo",
    "calibrate",
    "ConfidenceBand",
    "naive_band",
    "compute_lower",
    "compute_upper",
    "compute_band",
    "evaluate",
    "InflectionGrid",
    "SShapeRefinement",
    "default_inflection_grid",
    "envelope_at_mu",
    "refine",
    "ScenarioSpec",
    "CoverageReport",
    "RateDiagnostic",
    "run_coverage",
    "run_rate_diagnostic",
    "__version__",
]
