#!/usr/bin/env python3
"""Coverage study: empirical simultaneous coverage across models and levels."""

import argparse

from quantband import CardinalityRule, ScenarioSpec, run_coverage


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--models", nargs="+",
                    default=["gauss-location", "laplace-location", "gauss-scale"])
    ap.add_argument("--gammas", type=float, nargs="+", default=[0.25, 0.5, 0.75])
    ap.add_argument("--alpha", type=float, default=0.1)
    ap.add_argument("--family", default="triangular")
    ap.add_argument("--cap", default="half")
    ap.add_argument("--n-rep", type=int, default=500)
    ap.add_argument("--mc-reps", type=int, default=0,
                    help="calibrate by Monte Carlo with this many replicates instead")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rule = CardinalityRule(args.family, args.cap)
    for model in args.models:
        for gamma in args.gammas:
            spec = ScenarioSpec(
                n=args.n,
                model=model,
                gamma=gamma,
                alpha=args.alpha,
                rule=rule,
                method="montecarlo" if args.mc_reps else "bonferroni",
                reps=args.mc_reps or 20000,
                n_rep=args.n_rep,
                seed=args.seed,
            )
            print(run_coverage(spec).format_table())
            print()


if __name__ == "__main__":
    main()
