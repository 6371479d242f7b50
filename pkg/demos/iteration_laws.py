"""How long positive unit resolution runs before it stops.

On satisfiable instances the iteration count is compared with the limit law
rho and with the carry-over walk; on unsatisfiable ones the count minus
``floor(log2 n)`` is compared with the wobble law under both scalings.

    python demos/iteration_laws.py --sat-n 16 --unsat-n 16
"""

import argparse
import math
from collections import Counter

from hornphase.analytic import rho_distribution, walk_acceptance_law, wobble_law
from hornphase.experiments import eta_tv, rho_tv, run_trial, walk_tv
from hornphase.generator import clauses_for_rate, effective_rate


def sat_side(n, lam, trials, seed):
    m = clauses_for_rate(n, lam)
    rate = effective_rate(n, m)
    its = [r.iterations for r in (run_trial(n, m, "strict", seed, t) for t in range(trials)) if r.status == "SAT"]
    hist = Counter(its)
    rho = rho_distribution(rate.lam, 10)
    walk = walk_acceptance_law(rate.lam).rho()
    print(f"SAT side: n={n}, lambda_n={rate.lam:.3f}, {len(its)} satisfiable of {trials}")
    print(f"{'k':>3} {'observed':>9} {'rho':>9} {'walk':>9}")
    for k in range(6):
        print(f"{k:3d} {hist[k] / len(its):9.4f} {rho.pmf(k):9.4f} {walk[k]:9.4f}")
    print(f"TV to rho {rho_tv(its, rate.lam):.4f}, to walk {walk_tv(its, rate.lam):.4f}\n")


def unsat_side(n, lam, trials, seed):
    m = clauses_for_rate(n, lam)
    rate = effective_rate(n, m)
    its = [r.iterations for r in (run_trial(n, m, "strict", seed, t) for t in range(trials)) if r.status == "UNSAT"]
    shift = int(math.floor(math.log2(n)))
    hist = Counter(k - shift for k in its)
    laws = {v: wobble_law(rate.lam, n, v) for v in ("sqrt", "linear")}
    print(f"UNSAT side: n={n}, lambda_n={rate.lam:.3f}, {len(its)} unsatisfiable of {trials}, shift {shift}")
    print(f"{'k':>3} {'observed':>9} {'sqrt':>9} {'linear':>9}")
    for k in range(-shift, 4):
        print(f"{k:3d} {hist[k] / len(its):9.4f} {laws['sqrt'].pmf(k):9.4f} {laws['linear'].pmf(k):9.4f}")
    tvs = {v: eta_tv(its, n, rate.lam, v) for v in laws}
    print(f"TV sqrt {tvs['sqrt']:.4f}, linear {tvs['linear']:.4f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sat-n", type=int, default=16)
    ap.add_argument("--unsat-n", type=int, default=16)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=2)
    args = ap.parse_args()
    sat_side(args.sat_n, 1.0, args.trials, args.seed)
    unsat_side(args.unsat_n, 4.0, args.trials, args.seed)


if __name__ == "__main__":
    main()
