"""The clause-count chains next to the solver they describe.

Prints the largest per-stage TV gap between the profile chain and the
instrumented non-halting solver, the fraction of simple-chain paths inside
the concentration envelope, and the domination gap between the solver and
its thinned variant.  Empirical TV is biased upward at small run counts
because the class counts spread over many values.

    python demos/chains.py --runs 20000
"""

import argparse

from hornphase.markov import concentration_check, domination_check, fidelity_check
from hornphase.rng import RngStream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    fid = fidelity_check(12, 256, "strict", args.runs, master_seed=args.seed)
    print(f"profile chain vs solver (n=12, m=256): max TV {fid.max_tv:.4f} at {fid.worst}")
    for t in (12, 9, 6, 3):
        row = "  ".join(f"{c}={fid.tv[(t, c)]:.3f}" for c in ("hp1", "hp2", "hn1", "hn2", "e"))
        print(f"  t={t:<2} {row}")

    rng = RngStream(args.seed, 0)
    for envelope in ("final", "pointwise"):
        frac = concentration_check(10**6, 10**6, 1000, 200, rng, envelope)
        print(f"simple chain inside envelope ({envelope}): {frac:.3f} of 200 paths")

    dom = domination_check(10, 128, "strict", args.runs, rng, min_samples=500)
    print(f"domination (n=10, m=128): max CCDF excess {dom.max_violation:.4f}")
    for t, table in sorted(dom.tables.items(), reverse=True)[:4]:
        print(f"  t={t:<2} samples {table.samples_pur:>6} / {table.samples_variant:<6} excess {table.violation:.4f}")


if __name__ == "__main__":
    main()
