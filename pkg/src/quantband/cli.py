"""Command line front end.

Subcommands: band (compute and write a confidence band), calibrate (print
kappa only), simulate (run scenarios from a JSON file), plot (render a
band CSV to SVG).  Exit codes: 0 success, 2 usage error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .band import compute_band, evaluate
from .calibrate import CalibrationConfig, calibrate
from .design import CardinalityRule, Dataset, build_family, build_grid
from .plotsvg import render_svg
from .simulate import ScenarioSpec, run_coverage, run_rate_diagnostic
from .sshape import InflectionGrid, refine

__all__ = ["main", "entry"]

USAGE_ERROR = 2
DATA_ERROR = 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _parse_kappa_flag(text: str):
    """'bonferroni' | 'mc:<reps>' | 'fixed:<value>' -> (method, reps, kappa)."""
    if text == "bonferroni":
        return "bonferroni", None, None
    if text.startswith("mc:"):
        try:
            reps = int(text[3:])
        except ValueError:
            raise UsageError(f"bad Monte Carlo replicate count in {text!r}")
        if reps < 1:
            raise UsageError("Monte Carlo replicate count must be positive")
        return "montecarlo", reps, None
    if text.startswith("fixed:"):
        try:
            kappa = float(text[6:])
        except ValueError:
            raise UsageError(f"bad fixed kappa in {text!r}")
        return "fixed", None, kappa
    raise UsageError(f"--kappa must be bonferroni, mc:<reps> or fixed:<value>, got {text!r}")


def _parse_mu_grid(text: str):
    if text == "auto":
        return None
    try:
        pts = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"bad --mu-grid value {text!r}")
    if not pts:
        raise UsageError("--mu-grid needs at least one point")
    return InflectionGrid(points=tuple(pts))


def read_xy_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """CSV with header x,y; '#' lines are comments."""
    xs, ys = [], []
    header = None
    try:
        fh = open(path, encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot open {path}: {e}")
    with fh:
        for lineno, ln in enumerate(fh, 1):
            s = ln.strip()
            if not s or s.startswith("#"):
                continue
            if header is None:
                header = [c.strip().lower() for c in s.split(",")]
                if header != ["x", "y"]:
                    raise DataError(f"{path}:{lineno}: expected header 'x,y', got {s!r}")
                continue
            parts = s.split(",")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected two columns, got {s!r}")
            try:
                xs.append(float(parts[0]))
                ys.append(float(parts[1]))
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric row {s!r}")
    if header is None or not xs:
        raise DataError(f"{path}: no data rows")
    return np.asarray(xs), np.asarray(ys)


def read_band_csv(path: str):
    """CSV with header z,lower,upper; infinities spelled inf/-inf."""
    z, lo, up = [], [], []
    header = None
    try:
        fh = open(path, encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot open {path}: {e}")
    with fh:
        for lineno, ln in enumerate(fh, 1):
            s = ln.strip()
            if not s or s.startswith("#"):
                continue
            if header is None:
                header = [c.strip().lower() for c in s.split(",")]
                if header != ["z", "lower", "upper"]:
                    raise DataError(f"{path}:{lineno}: expected header 'z,lower,upper'")
                continue
            parts = s.split(",")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected three columns")
            try:
                z.append(float(parts[0]))
                lo.append(float(parts[1]))
                up.append(float(parts[2]))
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric row {s!r}")
    if header is None or not z:
        raise DataError(f"{path}: no band rows")
    return np.asarray(z), np.asarray(lo), np.asarray(up)


def write_band_csv(path, z, lower, upper) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("z,lower,upper\n")
        for a, b, c in zip(z, lower, upper):
            f.write(f"{float(a)!r},{float(b)!r},{float(c)!r}\n")


def _rule_from_args(args) -> CardinalityRule:
    return CardinalityRule(variant=args.family, cap=args.cap)


def _config_from_args(args) -> CalibrationConfig:
    method, reps, kappa = _parse_kappa_flag(args.kappa)
    try:
        return CalibrationConfig(
            gamma=args.gamma,
            alpha=args.alpha,
            method=method,
            reps=reps if reps is not None else 199999,
            seed=args.seed,
            kappa=kappa,
        )
    except ValueError as e:
        raise UsageError(str(e))


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=float, default=0.5, help="quantile level in (0,1)")
    p.add_argument("--alpha", type=float, default=0.05, help="miscoverage level in (0,1)")
    p.add_argument(
        "--family",
        choices=("all", "triangular", "fibonacci", "pow2"),
        default="triangular",
        help="interval cardinality rule",
    )
    p.add_argument("--cap", choices=("half", "full"), default="half",
                   help="cap cardinalities at ceil(d/2) or at d")
    p.add_argument("--kappa", default="bonferroni",
                   help="bonferroni | mc:<reps> | fixed:<value>")
    p.add_argument("--seed", type=int, default=0, help="seed for Monte Carlo calibration")


def cmd_band(args) -> int:
    t0 = time.perf_counter()
    x, y = read_xy_csv(args.input)
    data = Dataset.from_pairs(x, y)
    rule = _rule_from_args(args)
    config = _config_from_args(args)
    grid = build_grid(data)
    family = build_family(grid, rule)
    cv = calibrate(family, grid, config)
    meta = {
        "gamma": config.gamma,
        "alpha": config.alpha,
        "kappa": cv.kappa,
        "method": config.method,
        "reps": config.reps if config.method == "montecarlo" else None,
        "seed": config.seed,
        "family": rule.variant,
        "cap": rule.cap,
        "n": grid.n,
        "n_distinct": grid.n_distinct,
        "family_size": family.size,
    }
    band = compute_band(data, grid, family, cv, meta=meta)
    out = Path(args.out)
    write_band_csv(out, grid.z, band.lower, band.upper)
    meta["crossing_flag"] = band.crossing

    refined = None
    if args.sshape:
        mu_grid = _parse_mu_grid(args.mu_grid)
        ref = refine(band, mu_grid)
        refined = (ref.lower_refined, ref.upper_refined)
        sshape_out = out.with_name(out.stem + "_sshape" + (out.suffix or ".csv"))
        write_band_csv(sshape_out, grid.z, ref.lower_refined, ref.upper_refined)
        meta["sshape"] = {
            "any_feasible": ref.any_feasible,
            "mu_count": len(ref.feasible_mu),
            "out": sshape_out.name,
        }

    meta["runtime_ms"] = int(round((time.perf_counter() - t0) * 1000))
    with open(out.with_suffix(".meta.json"), "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")

    if args.plot:
        svg = render_svg(grid.z, band.lower, band.upper, data_xy=(data.x, data.y),
                         refined=refined)
        with open(args.plot, "w", encoding="utf-8") as f:
            f.write(svg)

    print(f"kappa: {cv.kappa!r}")
    print(f"family size: {family.size}")
    print(f"runtime_ms: {meta['runtime_ms']}")
    return 0


def cmd_calibrate(args) -> int:
    x, y = read_xy_csv(args.input)
    data = Dataset.from_pairs(x, y)
    rule = _rule_from_args(args)
    config = _config_from_args(args)
    grid = build_grid(data)
    family = build_family(grid, rule)
    cv = calibrate(family, grid, config)
    print(repr(cv.kappa))
    return 0


def _scenario_from_dict(d: dict) -> ScenarioSpec:
    d = dict(d)
    d.pop("type", None)
    rule = CardinalityRule(variant=d.pop("family", "triangular"), cap=d.pop("cap", "half"))
    method, reps, kappa = _parse_kappa_flag(d.pop("kappa", "bonferroni"))
    if "x_range" in d:
        d["x_range"] = tuple(d["x_range"])
    try:
        return ScenarioSpec(
            rule=rule,
            method=method,
            reps=reps if reps is not None else 20000,
            fixed_kappa=kappa,
            **d,
        )
    except (TypeError, ValueError) as e:
        raise DataError(f"bad scenario: {e}")


def cmd_simulate(args) -> int:
    try:
        with open(args.scenarios, encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise DataError(f"cannot open {args.scenarios}: {e}")
    except json.JSONDecodeError as e:
        raise DataError(f"bad scenario file: {e}")
    entries = doc["scenarios"] if isinstance(doc, dict) and "scenarios" in doc else doc
    if not isinstance(entries, list) or not entries:
        raise DataError("scenario file must hold a nonempty list of scenarios")
    results = []
    for entry_dict in entries:
        kind = entry_dict.get("type", "coverage")
        if kind == "coverage":
            report = run_coverage(_scenario_from_dict(entry_dict))
            print(report.format_table())
            print()
            results.append({"type": "coverage", **report.to_dict()})
        elif kind == "rate":
            base = dict(entry_dict)
            base.pop("type", None)
            n_list = base.pop("n_list", None)
            if not n_list:
                raise DataError("rate scenario needs an n_list")
            specs = [_scenario_from_dict({**base, "n": int(n)}) for n in n_list]
            diag = run_rate_diagnostic(specs)
            print(diag.format_table())
            print()
            results.append({"type": "rate", **diag.to_dict()})
        else:
            raise DataError(f"unknown scenario type {kind!r}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(results, f, indent=2, sort_keys=True)
            f.write("\n")
    return 0


def cmd_plot(args) -> int:
    z, lo, up = read_band_csv(args.band)
    refined = None
    if args.refined:
        rz, rl, ru = read_band_csv(args.refined)
        if len(rz) != len(z) or not np.allclose(rz, z):
            raise DataError("refined band grid differs from the band grid")
        refined = (rl, ru)
    data_xy = None
    if args.data:
        data_xy = read_xy_csv(args.data)
    curve_xy = None
    if args.curve:
        curve_xy = read_xy_csv(args.curve)
    svg = render_svg(z, lo, up, data_xy=data_xy, refined=refined, curve_xy=curve_xy)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(svg)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="quantband",
        description="Simultaneous confidence bands for isotonic quantile curves.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("band", help="compute a confidence band from x,y CSV data")
    p.add_argument("input", help="input CSV with header x,y")
    _add_model_flags(p)
    p.add_argument("--out", default="band.csv", help="band CSV output path")
    p.add_argument("--sshape", action="store_true", help="also write the S-shape refinement")
    p.add_argument("--mu-grid", default="auto",
                   help="inflection grid: 'auto' or comma list (inf/-inf allowed)")
    p.add_argument("--plot", default=None, help="also render an SVG to this path")
    p.set_defaults(func=cmd_band)

    p = sub.add_parser("calibrate", help="compute and print kappa only")
    p.add_argument("input", help="input CSV with header x,y")
    _add_model_flags(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("simulate", help="run coverage/rate scenarios from a JSON file")
    p.add_argument("scenarios", help="scenario JSON file")
    p.add_argument("--out", default=None, help="write a machine-readable summary JSON")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plot", help="render a band CSV (plus overlays) to SVG")
    p.add_argument("band", help="band CSV with header z,lower,upper")
    p.add_argument("--refined", default=None, help="refined band CSV to overlay")
    p.add_argument("--data", default=None, help="x,y CSV of observations to overlay")
    p.add_argument("--curve", default=None, help="x,y CSV reference curve to overlay")
    p.add_argument("--out", required=True, help="SVG output path")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE_ERROR
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except (DataError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return DATA_ERROR


def entry() -> None:  # console script
    sys.exit(main())


if __name__ == "__main__":
    entry()
