"""Command-line interface: ``statsp solve``, ``statsp bench`` and ``statsp compare``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from statsp.baselines import AcoConfig, SaConfig
from statsp.bench import SOLVERS, condense_trace, format_table, run_trials
from statsp.core import format_tour
from statsp.operators import OperatorParams
from statsp.sta import StaConfig
from statsp.tsplib import BUNDLED_INSTANCES, TspInstance, TsplibParseError, build_distance_matrix, load_bundled, load_instance

log = logging.getLogger("statsp")

METRICS = {"raw": "RAW_EUC", "euc2d": "EUC_2D", "geo": "GEO", "att": "ATT"}


class CliError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--instance",
        required=True,
        help=f"path to a .tsp file, or one of the bundled names: {', '.join(BUNDLED_INSTANCES)}",
    )
    common.add_argument("--metric", choices=sorted(METRICS), default="raw", help="distance function (default: raw)")
    common.add_argument("--seed", type=int, default=None, help="random seed; drawn from system entropy if omitted")
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory (default: results)")

    sta = common.add_argument_group("STA")
    sta.add_argument("--se", type=int, default=20, help="candidates per operator phase")
    sta.add_argument("--iters", type=int, default=200, help="iterations for STA and ACO")
    sta.add_argument("--ma", type=int, default=2, help="swap factor")
    sta.add_argument("--mb", type=int, default=1, help="shift factor")
    sta.add_argument("--mc", type=int, default=0, help="symmetry factor")
    sta.add_argument("--distinct-swaps", action="store_true", help="redraw swap moves that change nothing")
    sta.add_argument("--time-limit", type=float, default=None, help="wall-clock cap per STA run, seconds")

    sa = common.add_argument_group("SA")
    sa.add_argument("--t0", type=float, default=5000.0, help="initial temperature")
    sa.add_argument("--cooling", type=float, default=0.97, help="geometric cooling rate")
    sa.add_argument("--sa-iters", type=int, default=4000, help="SA iterations")

    aco = common.add_argument_group("ACO")
    aco.add_argument("--alpha", type=float, default=1.0, help="pheromone weight")
    aco.add_argument("--beta", type=float, default=5.0, help="heuristic weight")
    aco.add_argument("--rho", type=float, default=0.9, help="pheromone persistence")
    aco.add_argument("--ants", type=int, default=20, help="colony size")

    multi = argparse.ArgumentParser(add_help=False)
    multi.add_argument("--trials", type=int, default=20, help="independent trials per solver (default: 20)")
    multi.add_argument("--workers", type=int, default=1, help="processes used to run trials")

    parser = argparse.ArgumentParser(prog="statsp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="run one solver once")
    p.add_argument("--solver", choices=sorted(SOLVERS), default="sta")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", parents=[common, multi], help="repeated trials with summary statistics")
    p.add_argument("--solvers", default="sta,sa,aco", help="comma-separated solver list")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", parents=[common, multi], help="merged average-fitness curves")
    p.add_argument("--solvers", default="sta,sa,aco", help="comma-separated solver list (at least two)")
    p.set_defaults(func=cmd_compare)
    return parser


def _load(args) -> TspInstance:
    metric = METRICS[args.metric]
    path = Path(args.instance)
    try:
        if path.exists():
            return load_instance(path, metric)
        if args.instance.lower().removesuffix(".tsp") in BUNDLED_INSTANCES:
            return load_bundled(args.instance, metric)
    except (TsplibParseError, ValueError) as exc:
        raise CliError(f"{args.instance}: {exc}") from None
    raise CliError(f"instance not found: {args.instance}")


def _config(solver: str, args, seed: int | None):
    if solver == "sta":
        return StaConfig(
            se=args.se,
            max_iters=args.iters,
            params=OperatorParams(args.ma, args.mb, args.mc),
            seed=seed,
            distinct_swaps=args.distinct_swaps,
            time_limit=args.time_limit,
        )
    if solver == "sa":
        return SaConfig(t0=args.t0, cooling=args.cooling, iters=args.sa_iters, seed=seed)
    if solver == "aco":
        return AcoConfig(alpha=args.alpha, beta=args.beta, rho=args.rho, ants=args.ants, iters=args.iters, seed=seed)
    raise CliError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")


def _solvers(text: str, minimum: int = 1) -> list[str]:
    names = [s.strip().lower() for s in text.split(",") if s.strip()]
    unknown = [s for s in names if s not in SOLVERS]
    if unknown:
        raise CliError(f"unknown solver(s): {', '.join(unknown)}")
    dupes = sorted({s for s in names if names.count(s) > 1})
    if dupes:
        raise CliError(f"solver listed more than once: {', '.join(dupes)}")
    if len(names) < minimum:
        raise CliError(f"need at least {minimum} solvers, got {len(names)}")
    return names


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(np.random.SeedSequence().entropy)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _write_csv(path: Path, header: list[str], columns: list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i, row in enumerate(zip(*columns), start=1):
            writer.writerow([i, *(repr(float(v)) for v in row)])


def _instance_meta(instance: TspInstance) -> dict:
    return {
        "name": instance.name,
        "n": instance.n,
        "declared_metric": instance.declared_metric.value,
        "metric": instance.active_metric.value,
    }


def cmd_solve(args) -> int:
    instance = _load(args)
    seed = _seed(args)
    config = _config(args.solver, args, seed)
    solve = SOLVERS[args.solver][0]
    result = solve(build_distance_matrix(instance), config)

    stem = args.out / f"{instance.name}_{args.solver}"
    artifact = {
        "command": "solve",
        "solver": args.solver,
        "instance": _instance_meta(instance),
        "seed": seed,
        "config": config.to_dict(),
        "best_length": result.best_length,
        "best_tour": format_tour(result.best_tour),
        "eval_count": result.eval_count,
        "iterations": len(result.trace),
    }
    _write(stem.with_suffix(".json"), json.dumps(artifact, indent=2) + "\n")
    header = ["iteration", f"{args.solver}_best"]
    columns = [result.trace]
    if result.current_trace is not None:
        header.append(f"{args.solver}_current")
        columns.append(result.current_trace)
    _write_csv(stem.parent / f"{stem.name}_trace.csv", header, columns)
    print(
        f"{args.solver} {instance.name} [{instance.active_metric.value}] seed={seed} "
        f"length={result.best_length:.4f} evals={result.eval_count} time={result.wall_time:.3f}s"
    )
    return 0


def _bench_reports(args, instance: TspInstance, solvers: list[str], seed: int):
    if args.trials < 1:
        raise CliError(f"--trials must be >= 1, got {args.trials}")
    dmat = build_distance_matrix(instance)
    reports = []
    for solver in solvers:
        config = _config(solver, args, None)
        log.info("running %d %s trials on %s", args.trials, solver, instance.name)
        report = run_trials(
            solver, dmat, args.trials, seed, config=config, workers=args.workers, instance_name=instance.name
        )
        report.metric = instance.active_metric.value
        reports.append(report)
    return reports


def cmd_bench(args) -> int:
    instance = _load(args)
    solvers = _solvers(args.solvers)
    seed = _seed(args)
    reports = _bench_reports(args, instance, solvers, seed)
    for report in reports:
        stem = args.out / f"{instance.name}_{report.solver}"
        _write(stem.parent / f"{stem.name}_report.json", report.to_json())
        _write(stem.parent / f"{stem.name}_trace.csv", report.trace_csv())
    table = format_table(reports)
    _write(args.out / f"{instance.name}_table.txt", table)
    print(table, end="")
    print(f"master seed {seed}; st.dev. uses the n-1 denominator")
    return 0


def cmd_compare(args) -> int:
    instance = _load(args)
    solvers = _solvers(args.solvers, minimum=2)
    seed = _seed(args)
    reports = _bench_reports(args, instance, solvers, seed)
    traces = {r.solver: r.avg_trace for r in reports}
    target = len(traces["sta"]) if "sta" in traces else min(len(t) for t in traces.values())
    try:
        columns = [t if len(t) == target else condense_trace(t, target) for t in traces.values()]
    except ValueError as exc:
        raise CliError(f"cannot align traces to {target} iterations: {exc}") from None
    path = args.out / f"{instance.name}_compare.csv"
    _write_csv(path, ["iteration", *solvers], columns)
    meta = {
        "command": "compare",
        "instance": _instance_meta(instance),
        "master_seed": seed,
        "trials": args.trials,
        "iterations": target,
        "configs": {r.solver: r.config for r in reports},
        "source_lengths": {s: len(t) for s, t in traces.items()},
    }
    _write(path.with_suffix(".json"), json.dumps(meta, indent=2) + "\n")
    print(f"wrote {path} ({target} rows, solvers: {', '.join(solvers)}, master seed {seed})")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CliError, ValueError) as exc:
        print(f"statsp: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"statsp: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
