"""Command-line entry point: ``hornphase <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 unreadable or invalid input,
3 when ``verify`` finds a disagreement.  ``solve`` follows the SAT
competition convention of 10 for satisfiable and 20 for unsatisfiable.
"""

import argparse
import json
import sys

from . import __version__
from . import analytic, experiments, markov
from .core import UniverseKind
from .dimacs import parse_dimacs, write_dimacs
from .errors import DimacsError, HornError
from .generator import clauses_for_c, clauses_for_rate, sample_formula
from .rng import RngStream
from .solver import brute_force_solve, pur_solve, unit_prop_solve

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_DISAGREE = 0, 1, 2, 3
EXIT_SAT, EXIT_UNSAT = 10, 20


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _universe(p):
    p.add_argument("--universe", choices=[k.value for k in UniverseKind], default="strict")


def _seed(p, default=0):
    p.add_argument("--seed", type=int, default=default, help="master seed (default %(default)s)")


def build_parser():
    parser = _Parser(prog="hornphase", description="Random Horn formulas and positive unit resolution.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("gen", help="sample a random formula as DIMACS")
    p.add_argument("-n", type=int, required=True, help="number of variables")
    rate = p.add_mutually_exclusive_group(required=True)
    rate.add_argument("-m", type=int, help="number of clauses")
    rate.add_argument("--c", type=float, help="clauses = round(c * 2**n)")
    rate.add_argument("--lambda", dest="lam", type=float, help="clauses giving this finite-n rate")
    _universe(p)
    _seed(p)
    p.add_argument("-o", "--output", help="write here instead of stdout")

    p = sub.add_parser("solve", help="solve a DIMACS Horn formula")
    p.add_argument("file", help="DIMACS file, or - for stdin")
    _seed(p)
    p.add_argument("--trace", action="store_true", help="print the per-stage class counts")
    p.add_argument("--method", choices=["pur", "unit", "brute"], default="pur")
    p.add_argument("--allow-tautologies", action="store_true")

    p = sub.add_parser("predict", help="print limit-law values")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--rho", type=int, metavar="KMAX", help="list the SAT iteration law up to KMAX")
    p.add_argument("--wobble", type=int, metavar="N", help="list the UNSAT law for n = N")
    p.add_argument("--variant", choices=["sqrt", "linear", "both"], default="both")
    p.add_argument("--json", action="store_true", help="emit JSON")

    p = sub.add_parser("sweep", help="run a seeded Monte Carlo sweep")
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("-n", type=int, nargs="+", help="variable counts")
    rate = p.add_mutually_exclusive_group()
    rate.add_argument("--c", type=float, nargs="+")
    rate.add_argument("-m", type=int, nargs="+")
    rate.add_argument("--lambda", dest="lam", type=float, nargs="+")
    _universe(p)
    p.add_argument("--trials", type=int, default=100)
    _seed(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", help="trial records")
    p.add_argument("--json", help="per-cell summaries")
    p.add_argument("--plot", help="whitespace table for plotting")
    p.add_argument("--timing", action="store_true", help="fill the ms column (breaks byte-identity)")

    p = sub.add_parser("chain", help="simulate the clause-count chains")
    p.add_argument(
        "--mode", choices=["profile", "simple", "concentration", "domination", "fidelity"], required=True
    )
    p.add_argument("-n", type=int, default=12)
    p.add_argument("-m", type=int, default=256)
    _universe(p)
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--start", type=int, help="initial clause count for the simple chain (default n)")
    p.add_argument("--steps", type=int, help="simple-chain steps (default n)")
    p.add_argument("--envelope", choices=["final", "pointwise"], default="final")
    _seed(p)
    p.add_argument("-o", "--output", help="trajectory CSV for --mode profile")

    p = sub.add_parser("verify", help="cross-check the three solvers on random formulas")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--nmax", type=int, default=12)
    p.add_argument("--mmax", type=int, default=200)
    _seed(p)
    return parser


# ---------------------------------------------------------------- commands


def _emit(data, path):
    if path:
        with open(path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def cmd_gen(args):
    if args.n < 1:
        raise InputError("-n must be at least 1")
    if args.m is not None:
        m = args.m
    elif args.c is not None:
        m = clauses_for_c(args.n, args.c)
    else:
        m = clauses_for_rate(args.n, args.lam, args.universe)
    formula = sample_formula(args.n, m, args.universe, RngStream(args.seed, 0))
    _emit(write_dimacs(formula), args.output)
    return EXIT_OK


def _read_input(path):
    try:
        if path == "-":
            return sys.stdin.buffer.read()
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def cmd_solve(args):
    formula = parse_dimacs(_read_input(args.file), allow_tautologies=args.allow_tautologies)
    if args.method == "pur":
        outcome = pur_solve(formula, RngStream(args.seed, 0), want_trace=args.trace)
    elif args.method == "unit":
        outcome = unit_prop_solve(formula)
    else:
        outcome = brute_force_solve(formula)
    out = sys.stdout
    if outcome.trace:
        out.write("c stage hp1 hp2 hn1 hn2 e n event var\n")
        for rec in outcome.trace:
            event = rec.event.value if rec.event else "-"
            fields = (rec.stage,) + rec.counts + (event, rec.chosen_var or 0)
            out.write("c " + " ".join(map(str, fields)) + "\n")
    out.write(f"c iterations {outcome.iterations}\n")
    if outcome.satisfiable:
        out.write("s SATISFIABLE\n")
        lits = [v if b else -v for v, b in enumerate(outcome.model.values, start=1)]
        out.write("v " + " ".join(map(str, lits + [0])) + "\n")
        return EXIT_SAT
    out.write("s UNSATISFIABLE\n")
    return EXIT_UNSAT


def _prediction(args):
    lam = args.lam
    if lam <= 0:
        raise InputError("--lambda must be positive")
    result = {
        "lambda": lam,
        "sat_prob_limit": analytic.sat_prob_limit(lam),
        "walk_sat_prob": analytic.walk_acceptance_law(lam).sat_prob,
        "f": analytic.f_of_rate(lam),
    }
    if args.rho is not None:
        rho = analytic.rho_distribution(lam, args.rho)
        result["rho"] = list(rho.probabilities)
        result["rho_tail"] = rho.tail_mass
    if args.wobble is not None:
        variants = ["sqrt", "linear"] if args.variant == "both" else [args.variant]
        for v in variants:
            law = analytic.wobble_law(lam, args.wobble, v)
            result[f"eta_{v}"] = {"c_n": law.c_n, "kmin": law.kmin, "probabilities": list(law.probabilities)}
    return result


def cmd_predict(args):
    result = _prediction(args)
    if args.json:
        print(json.dumps(result, indent=2))
        return EXIT_OK
    rows = [(key, result[key]) for key in ("lambda", "sat_prob_limit", "walk_sat_prob", "f")]
    rows += [(f"rho[{k}]", p) for k, p in enumerate(result.get("rho", ()))]
    for v in ("sqrt", "linear"):
        law = result.get(f"eta_{v}")
        if law is None:
            continue
        rows.append((f"c_n[{v}]", law["c_n"]))
        rows += [
            (f"eta_{v}[{k}]", p)
            for k, p in enumerate(law["probabilities"], start=law["kmin"])
            if p >= 1e-6
        ]
    for label, value in rows:
        print(f"{label:<16} {value:.17g}")
    return EXIT_OK


def _sweep_config(args):
    if args.config:
        try:
            cfg = experiments.ExperimentConfig.from_json(args.config)
        except OSError as exc:
            raise InputError(f"cannot read {args.config}: {exc.strerror}") from None
        except (ValueError, TypeError) as exc:
            raise InputError(f"bad config {args.config}: {exc}") from None
    else:
        if not args.n:
            raise InputError("give --config or -n with one of --c, -m, --lambda")
        if args.m:
            mode, rates = "m", args.m
        elif args.lam:
            mode, rates = "lambda", args.lam
        else:
            mode, rates = "c", args.c or [1.0]
        cfg = experiments.ExperimentConfig(
            n_values=args.n,
            rates=rates,
            rate_mode=mode,
            kind=args.universe,
            trials=args.trials,
            master_seed=args.seed,
            workers=args.workers,
            timing=args.timing,
        )
    outputs = {k: getattr(args, k) for k in ("csv", "json", "plot") if getattr(args, k)}
    cfg.outputs.update(outputs)
    return cfg


def cmd_sweep(args):
    cfg = _sweep_config(args)
    records = experiments.run_sweep(cfg)
    stats = experiments.summarize_sweep(records)
    experiments.write_outputs(cfg, records, stats)
    print(f"{'n':>3} {'m':>9} {'lambda':>8} {'trials':>6} {'sat':>7} {'ci':>17} {'limit':>7} {'walk':>7}")
    for s in stats:
        ci = f"[{s.ci_lo:.3f}, {s.ci_hi:.3f}]"
        print(
            f"{s.n:>3} {s.m:>9} {s.lam:>8.4f} {s.trials:>6} {s.sat_fraction:>7.4f} {ci:>17}"
            f" {s.predicted:>7.4f} {s.predicted_walk:>7.4f}"
        )
    return EXIT_OK


def cmd_chain(args):
    rng = RngStream(args.seed, 0)
    if args.mode == "profile":
        trajectories = [
            markov.profile_trajectory(args.n, args.m, args.universe, RngStream(args.seed, i))
            for i in range(args.runs)
        ]
        if args.output:
            with open(args.output, "w") as fh:
                markov.write_trajectories(trajectories, fh)
        else:
            markov.write_trajectories(trajectories, sys.stdout)
    elif args.mode in ("simple", "concentration"):
        start = args.start or args.n
        steps = args.n if args.steps is None else args.steps
        if args.mode == "simple":
            print(" ".join(map(str, markov.simple_chain_run(args.n, start, steps, rng))))
        else:
            frac = markov.concentration_check(args.n, start, steps, args.runs, rng, args.envelope)
            print(f"inside envelope: {frac:.4f} of {args.runs} runs")
    elif args.mode == "domination":
        report = markov.domination_check(args.n, args.m, args.universe, args.runs, rng)
        print(f"max violation {report.max_violation:.4f} (stage {report.worst_stage})")
        for t, table in sorted(report.tables.items(), reverse=True):
            print(f"  t={t:<3} samples {table.samples_pur:>7} / {table.samples_variant:<7} violation {table.violation:.4f}")
    else:
        report = markov.fidelity_check(args.n, args.m, args.universe, args.runs, args.seed)
        print(f"max TV {report.max_tv:.4f} at stage/component {report.worst}")
    return EXIT_OK


def cmd_verify(args):
    report = experiments.cross_check(args.trials, args.nmax, args.mmax, args.seed)
    print(f"{report.trials} formulas, {report.sat_count} satisfiable, {len(report.disagreements)} disagreements")
    for trial, reason in report.disagreements[:20]:
        print(f"  trial {trial}: {reason}")
    return EXIT_OK if report.ok else EXIT_DISAGREE


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "predict": cmd_predict,
    "sweep": cmd_sweep,
    "chain": cmd_chain,
    "verify": cmd_verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InputError, DimacsError) as exc:
        print(f"hornphase: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HornError as exc:
        print(f"hornphase: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
