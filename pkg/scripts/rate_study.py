#!/usr/bin/env python3
"""Width-vs-sample-size study: how fast the band shrinks as n grows.

Reports median central band width across replicates for a ladder of sample
sizes, the fitted slope of log width against log(log(n)/n), and (for the
step model) the shrinking window in which the band straddles the jump
midline.
"""

import argparse

from quantband import CardinalityRule, ScenarioSpec, run_rate_diagnostic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-list", type=int, nargs="+", default=[200, 800, 3200])
    ap.add_argument("--model", default="gauss-location")
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--alpha", type=float, default=0.1)
    ap.add_argument("--family", default="triangular")
    ap.add_argument("--cap", default="half")
    ap.add_argument("--n-rep", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    specs = [
        ScenarioSpec(
            n=n,
            model=args.model,
            gamma=args.gamma,
            alpha=args.alpha,
            rule=CardinalityRule(args.family, args.cap),
            n_rep=args.n_rep,
            seed=args.seed,
        )
        for n in args.n_list
    ]
    print(run_rate_diagnostic(specs).format_table())


if __name__ == "__main__":
    main()
