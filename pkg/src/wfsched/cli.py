"""Command line entry point: ``wfsched {validate,schedule,bench,sweep}``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .derive import (
    Weights,
    derive_schedule,
    objective,
    read_schedule_csv,
    schedule_to_csv,
    validate_schedule,
)
from .errors import SchedulingError
from .harness import ALGORITHMS, emit_csv, gen_scenario, parse_sizes, run_bench, solve, sweep_scenarios
from .heuristics import HeuristicConfig
from .model import parse_cluster, parse_workflow, validate_dag
from .twin import AnomalyPolicy, check_snapshot, filter_nodes, load_snapshot, load_trace


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _csv_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _add_objective_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=1.0, help="makespan weight (default 1)")
    p.add_argument("--beta", type=float, default=0.0, help="energy weight (default 0)")
    p.add_argument("--gamma", type=float, default=0.0, help="carbon weight (default 0)")
    p.add_argument("--carbon-trace", metavar="F", help="CSV of time_seconds,intensity_g_per_kwh")


def _add_search_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iterations", type=int, help="SA steps / GA generations / PSO iterations / ACO rounds")
    p.add_argument("--population", type=int, help="GA population / PSO swarm / ACO colony size")


def _weights_trace(args: argparse.Namespace):
    weights = Weights(args.alpha, args.beta, args.gamma)
    trace = load_trace(_read(args.carbon_trace)) if args.carbon_trace else None
    return weights, trace


def _config(args: argparse.Namespace, seed: int = 0) -> HeuristicConfig:
    return HeuristicConfig(seed=seed, iterations=args.iterations, population=args.population)


def _workers(args: argparse.Namespace) -> int:
    if args.sequential:
        return 1
    return args.workers or os.cpu_count() or 1


def cmd_validate(args: argparse.Namespace) -> int:
    workflow = parse_workflow(_read(args.workflow))
    cluster = parse_cluster(_read(args.cluster))
    order = validate_dag(workflow)
    print(f"workflow: {len(workflow.tasks)} tasks, {len(workflow.edges)} edges")
    print(f"cluster: {len(cluster.nodes)} nodes, bandwidth {cluster.bandwidth!r}")
    print("order: " + " ".join(order))
    if args.schedule:
        violations = validate_schedule(workflow, cluster, read_schedule_csv(_read(args.schedule)))
        for v in violations:
            print(f"violation {v}", file=sys.stderr)
        if violations:
            return 1
        print("schedule: ok")
    return 0


def cmd_schedule(args: argparse.Namespace) -> int:
    workflow = parse_workflow(_read(args.workflow))
    cluster = parse_cluster(_read(args.cluster))
    if args.snapshot:
        snapshot = load_snapshot(_read(args.snapshot))
        check_snapshot(cluster, snapshot)
        cluster = filter_nodes(cluster, snapshot, AnomalyPolicy(args.temp_limit, args.load_limit))
    weights, trace = _weights_trace(args)
    mapping, _ = solve(args.algo, workflow, cluster, weights, trace, args.seed, _config(args, args.seed))
    schedule = derive_schedule(workflow, cluster, mapping)
    violations = validate_schedule(workflow, cluster, schedule)
    report = objective(schedule, cluster, trace, weights).to_text()
    if args.out:
        Path(args.out).write_text(schedule_to_csv(schedule), encoding="utf-8")
        sys.stdout.write(report)
    else:
        sys.stdout.write(schedule_to_csv(schedule))
        sys.stderr.write(report)
    for v in violations:
        print(f"violation {v}", file=sys.stderr)
    return 1 if violations else 0


def _emit(records, out: str | None) -> int:
    text = emit_csv(records)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    bad = [r for r in records if r.status == "invalid"]
    for r in bad:
        print(f"violation {r.scenario}/{r.algorithm}: {r.detail}", file=sys.stderr)
    return 1 if bad else 0


def cmd_bench(args: argparse.Namespace) -> int:
    scenarios = [gen_scenario(name) for name in _csv_list(args.scenarios)]
    weights, trace = _weights_trace(args)
    records = run_bench(
        scenarios,
        _csv_list(args.algos),
        weights,
        trace,
        repetitions=args.reps,
        workers=_workers(args),
        config=_config(args),
        schedules_dir=Path(args.schedules_dir) if args.schedules_dir else None,
    )
    return _emit(records, args.out)


def cmd_sweep(args: argparse.Namespace) -> int:
    scenarios = sweep_scenarios(parse_sizes(args.sizes), args.density, args.seed)
    weights, trace = _weights_trace(args)
    records = run_bench(
        scenarios,
        _csv_list(args.algos),
        weights,
        trace,
        repetitions=args.reps,
        workers=_workers(args),
        config=_config(args),
        schedules_dir=Path(args.schedules_dir) if args.schedules_dir else None,
    )
    return _emit(records, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wfsched", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check workflow/cluster documents (and optionally a schedule)")
    p.add_argument("workflow")
    p.add_argument("cluster")
    p.add_argument("--schedule", metavar="F", help="schedule CSV to check against the inputs")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("schedule", help="map one workflow and derive its schedule")
    p.add_argument("--workflow", required=True, metavar="F")
    p.add_argument("--cluster", required=True, metavar="F")
    p.add_argument("--algo", required=True, choices=ALGORITHMS)
    p.add_argument("--seed", type=int, default=0)
    _add_objective_args(p)
    _add_search_args(p)
    p.add_argument("--snapshot", metavar="F", help="telemetry CSV node,load,temperature,power")
    p.add_argument("--temp-limit", type=float, default=90.0)
    p.add_argument("--load-limit", type=float, default=1.0)
    p.add_argument("--out", metavar="schedule.csv")
    p.set_defaults(func=cmd_schedule)

    for name, helptext in (
        ("bench", "solver comparison over the W1-W3 scenarios"),
        ("sweep", "scheduling-time sweep over random instance sizes"),
    ):
        p = sub.add_parser(name, help=helptext)
        if name == "bench":
            p.add_argument("--scenarios", default="W1,W2,W3")
            p.add_argument("--algos", default=",".join(ALGORITHMS))
            p.set_defaults(func=cmd_bench)
        else:
            p.add_argument("--sizes", default="10,100,1000", help="N (N tasks x min(N,100) nodes) or NxM")
            p.add_argument("--density", type=float, default=0.05, help="forward-edge probability")
            p.add_argument("--seed", type=int, default=1)
            p.add_argument("--algos", default="heft,olb")
            p.set_defaults(func=cmd_sweep)
        p.add_argument("--reps", type=int, default=1)
        p.add_argument("--out", metavar="F")
        p.add_argument("--sequential", action="store_true", help="run one solve at a time (stable timings)")
        p.add_argument("--workers", type=int, help="thread pool size (default: CPU count)")
        p.add_argument("--schedules-dir", metavar="D", help="also write every derived schedule here")
        _add_objective_args(p)
        _add_search_args(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchedulingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
