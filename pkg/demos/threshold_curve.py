"""Satisfiability probability of random Horn formulas as the clause rate grows.

For each rate the script solves ``--trials`` random formulas with positive
unit resolution and prints the observed fraction of satisfiable instances
next to two predictions: the fresh-draw limit ``1 - F(exp(-lam))`` and the
carry-over walk, which also accounts for positive units that survive from one
stage to the next.

    python demos/threshold_curve.py -n 16 --trials 300
"""

import argparse

from hornphase.analytic import sat_prob_limit, walk_acceptance_law
from hornphase.experiments import ExperimentConfig, run_sweep, summarize_sweep

RATES = [0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", type=int, default=16)
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--universe", default="strict", choices=["strict", "padded"])
    args = ap.parse_args()

    cfg = ExperimentConfig(
        n_values=[args.n], rates=RATES, rate_mode="lambda", kind=args.universe,
        trials=args.trials, master_seed=args.seed,
    )
    stats = summarize_sweep(run_sweep(cfg))
    print(f"n = {args.n}, {args.universe} universe, {args.trials} trials per rate\n")
    print(f"{'lambda':>7} {'m':>9} {'observed':>9} {'95% CI':>17} {'1-F':>8} {'walk':>8}")
    for s in stats:
        ci = f"[{s.ci_lo:.3f}, {s.ci_hi:.3f}]"
        print(
            f"{s.lam:7.3f} {s.m:9d} {s.sat_fraction:9.4f} {ci:>17}"
            f" {sat_prob_limit(s.lam):8.4f} {walk_acceptance_law(s.lam).sat_prob:8.4f}"
        )


if __name__ == "__main__":
    main()
