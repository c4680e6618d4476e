"""Command-line surface: sweeps, market reports, diagnostics, examples."""
from __future__ import annotations

import argparse
import dataclasses
import sys

from . import __version__
from ._backend import BACKEND
from .analysis import (
    PRIORITY,
    blocking_pairs,
    envyfree_unique,
    is_pareto_efficient,
    justified_envy_students,
    pareto_improvable_students,
)
from .conditions import (
    InputTooLargeError,
    check_ergin_acyclicity,
    check_gmbp,
    check_mbp_everywhere,
    check_sequential_mbp,
)
from .harness import PRESETS, ExperimentConfig, run_examples, run_sweep
from .market import OUTSIDE, read_market
from .mechanisms import MECHANISMS, run_mechanism, student_da, ttc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbp",
        description="School-choice mechanisms, mutually-best-pairs checks, "
        "and Monte Carlo sweeps.",
    )
    parser.add_argument(
        "--version", action="version", version=f"mbp {__version__} ({BACKEND})"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a parameter sweep and write a CSV")
    p_run.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    p_run.add_argument("--preset", choices=sorted(PRESETS))
    p_run.add_argument("--seed", type=int, help="override the master seed")
    p_run.add_argument("--workers", type=int, help="worker process count")
    p_run.add_argument("--out", required=True, help="output CSV path")
    p_run.add_argument(
        "--resume", action="store_true",
        help="reuse completed cells from a previous interrupted run",
    )
    p_run.add_argument("--quiet", action="store_true", help="no per-cell progress")

    p_check = sub.add_parser(
        "check", help="condition report for a market file"
    )
    p_check.add_argument("market", help="market JSON file")

    p_diag = sub.add_parser(
        "diagnose", help="allocation diagnostics for a market file"
    )
    p_diag.add_argument("market", help="market JSON file")
    p_diag.add_argument(
        "--mechanism", default="student-da", choices=MECHANISMS
    )

    sub.add_parser("examples", help="verify the bundled golden examples")
    return parser


def _cmd_run(args) -> int:
    if args.config is None and args.preset is None:
        print("error: provide --config and/or --preset", file=sys.stderr)
        return 2
    if args.config is not None:
        config = ExperimentConfig.from_file(args.config)
    else:
        config = PRESETS[args.preset]
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        config = dataclasses.replace(config, **overrides)
    result = run_sweep(
        config, args.out, resume=args.resume, progress=not args.quiet
    )
    print(f"wrote {result.csv_path} ({len(result.cells)} cells)")
    for s in result.summaries:
        print(
            f"summary lambda={s.lam:g} alpha={s.alpha:g}: "
            f"da_efficient={s.pct_da_efficient:.2f}% "
            f"seq_mbp={s.pct_seq_mbp:.2f}% gmbp={s.pct_gmbp:.2f}% "
            f"da_eq_ttc={s.pct_da_eq_ttc:.2f}%"
        )
    return 0


def _cmd_check(args) -> int:
    market = read_market(args.market)
    seq = check_sequential_mbp(market)
    print(f"sequential MBP: {seq is not None}")
    if seq is not None:
        print(f"  certificate: {list(seq.steps)}")
    gmbp = check_gmbp(market)
    print(f"GMBP: {gmbp is not None}")
    if gmbp is not None:
        simplified, cert = gmbp
        print(f"  simplified preferences: {simplified.market.preferences}")
        print(f"  simplified priorities:  {simplified.market.priorities}")
        print(f"  certificate: {list(cert.steps)}")
    for label, fn in (
        ("MBP everywhere", check_mbp_everywhere),
        ("priority acyclicity", check_ergin_acyclicity),
    ):
        try:
            print(f"{label}: {fn(market)}")
        except InputTooLargeError:
            print(f"{label}: skipped (market above size gate)")
    da = student_da(market)
    print(f"DA efficient: {is_pareto_efficient(market, da)}")
    print(f"DA == TTC: {da == ttc(market)}")
    print(f"envyfree set unique: {envyfree_unique(market)}")
    return 0


def _cmd_diagnose(args) -> int:
    market = read_market(args.market)
    alloc = run_mechanism(args.mechanism, market)
    def name(s: int) -> str:
        return "outside" if s == OUTSIDE else f"s{s}"
    print(f"mechanism: {args.mechanism}")
    print(
        "allocation: "
        + ", ".join(f"i{i}->{name(s)}" for i, s in enumerate(alloc.assignment))
    )
    pairs = blocking_pairs(market, alloc)
    if pairs:
        print(f"blocking pairs ({len(pairs)}):")
        for p in pairs:
            detail = (
                f"outranks i{p.occupant}" if p.reason == PRIORITY else "vacancy"
            )
            print(f"  (i{p.student}, {name(p.school)}) via {detail}")
    else:
        print("blocking pairs: none (allocation is envyfree)")
    efficient = is_pareto_efficient(market, alloc)
    improvable = pareto_improvable_students(market, alloc)
    envious = justified_envy_students(market, alloc)
    n = market.n or 1
    print(f"Pareto efficient: {efficient}")
    print(f"improvable students: {100.0 * len(improvable) / n:.2f}% "
          f"({sorted(improvable)})")
    print(f"justified envy: {100.0 * len(envious) / n:.2f}% "
          f"({sorted(envious)})")
    return 0


def _cmd_examples(_args) -> int:
    ok, report = run_examples()
    print(report)
    return 0 if ok else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "run": _cmd_run,
        "check": _cmd_check,
        "diagnose": _cmd_diagnose,
        "examples": _cmd_examples,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
