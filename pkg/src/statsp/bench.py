"""Repeated seeded trials, summary statistics and convergence traces."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from statsp.baselines import AcoConfig, SaConfig, aco_solve, sa_solve
from statsp.core import DistanceMatrix, RunResult, tour_length
from statsp.sta import StaConfig, sta_solve
from statsp.tsplib import TspInstance, build_distance_matrix

__all__ = [
    "BenchReport",
    "ConvergenceCriterion",
    "SOLVERS",
    "TrialRecord",
    "check_convergence",
    "condense_trace",
    "convergence_horizon",
    "default_config",
    "format_table",
    "run_trials",
    "summary_stats",
    "trial_seed",
]

log = logging.getLogger(__name__)

SOLVERS: dict[str, tuple[Callable[..., RunResult], type]] = {
    "sta": (sta_solve, StaConfig),
    "sa": (sa_solve, SaConfig),
    "aco": (aco_solve, AcoConfig),
}

STDEV_CONVENTION = "sample (n-1 denominator)"


def default_config(solver: str):
    try:
        return SOLVERS[solver][1]()
    except KeyError:
        raise ValueError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}") from None


def trial_seed(master_seed: int, index: int) -> int:
    """Seed for trial ``index``; depends only on ``(master_seed, index)``."""
    state = np.random.SeedSequence([master_seed, index]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


@dataclass
class TrialRecord:
    index: int
    seed: int
    best_length: float = math.nan
    best_tour: np.ndarray | None = None
    wall_time: float = 0.0
    trace: np.ndarray | None = None
    eval_count: int = 0
    current_trace: np.ndarray | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self, timing: bool = True) -> dict:
        out: dict[str, Any] = {"index": self.index, "seed": self.seed}
        if not self.ok:
            out["error"] = self.error
            return out
        out["best_length"] = self.best_length
        out["best_tour"] = [int(v) + 1 for v in self.best_tour]
        out["eval_count"] = self.eval_count
        if timing:
            out["wall_time"] = self.wall_time
        out["trace"] = [float(v) for v in self.trace]
        if self.current_trace is not None:
            out["current_trace"] = [float(v) for v in self.current_trace]
        return out


@dataclass
class BenchReport:
    solver: str
    instance: str
    metric: str
    config: dict
    master_seed: int
    trials: list[TrialRecord]
    best: float
    mean: float
    worst: float
    stdev: float
    mean_time: float
    avg_trace: np.ndarray
    avg_current_trace: np.ndarray | None = None
    failures: int = 0

    def lengths(self) -> np.ndarray:
        return np.array([t.best_length for t in self.trials if t.ok])

    def to_dict(self, timing: bool = True) -> dict:
        stats: dict[str, Any] = {
            "best": self.best,
            "mean": self.mean,
            "worst": self.worst,
            "stdev": self.stdev,
        }
        if timing:
            stats["mean_time"] = self.mean_time
        out = {
            "solver": self.solver,
            "instance": self.instance,
            "metric": self.metric,
            "config": self.config,
            "master_seed": self.master_seed,
            "n_trials": len(self.trials),
            "failures": self.failures,
            "stdev_convention": STDEV_CONVENTION,
            "stats": stats,
            "trials": [t.to_dict(timing) for t in self.trials],
            "avg_trace": [float(v) for v in self.avg_trace],
        }
        if self.avg_current_trace is not None:
            out["avg_current_trace"] = [float(v) for v in self.avg_current_trace]
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(_json_safe(self.to_dict(timing)), indent=2) + "\n"

    def trace_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iteration", f"{self.solver}_avg_fitness"])
        for i, v in enumerate(self.avg_trace, start=1):
            writer.writerow([i, repr(float(v))])
        return buf.getvalue()


def _json_safe(obj):
    """NaN is not valid JSON; write it as null."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _run_one(solver: str, config, dmat: DistanceMatrix, index: int, seed: int) -> TrialRecord:
    solve = SOLVERS[solver][0]
    try:
        result = solve(dmat, replace(config, seed=seed))
    except Exception as exc:  # noqa: BLE001 - a failed trial must not sink the batch
        return TrialRecord(index=index, seed=seed, error=f"{type(exc).__name__}: {exc}")
    length = tour_length(result.best_tour, dmat)
    if not math.isclose(length, result.best_length, rel_tol=1e-9, abs_tol=1e-9):
        return TrialRecord(
            index=index,
            seed=seed,
            error=f"reported length {result.best_length} != recomputed {length}",
        )
    return TrialRecord(
        index=index,
        seed=seed,
        best_length=length,
        best_tour=result.best_tour,
        wall_time=result.wall_time,
        trace=result.trace,
        eval_count=result.eval_count,
        current_trace=result.current_trace,
    )


def _mean_trace(traces: Sequence[np.ndarray]) -> np.ndarray:
    if not traces:
        return np.array([])
    length = min(len(t) for t in traces)
    return np.mean([t[:length] for t in traces], axis=0)


def run_trials(
    solver: str,
    problem: TspInstance | DistanceMatrix,
    n_trials: int = 20,
    master_seed: int = 0,
    config=None,
    workers: int = 1,
    order: Iterable[int] | None = None,
    instance_name: str | None = None,
) -> BenchReport:
    """Run ``n_trials`` independent trials of ``solver``.

    The seed of trial ``i`` comes from :func:`trial_seed`, and results are
    folded in trial-index order, so neither ``workers`` nor ``order`` (the
    execution order of the trial indices) changes the report.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    if config is None:
        config = default_config(solver)
    elif solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}")
    if isinstance(problem, DistanceMatrix):
        dmat, name, metric = problem, instance_name or "matrix", "explicit"
    else:
        dmat = build_distance_matrix(problem)
        name, metric = instance_name or problem.name, problem.active_metric.value

    indices = list(range(n_trials)) if order is None else list(order)
    if sorted(indices) != list(range(n_trials)):
        raise ValueError("order must be a permutation of the trial indices")
    seeds = {i: trial_seed(master_seed, i) for i in indices}

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_one, solver, config, dmat, i, seeds[i]) for i in indices]
            records = [f.result() for f in futures]
    else:
        records = [_run_one(solver, config, dmat, i, seeds[i]) for i in indices]
    records.sort(key=lambda r: r.index)

    good = [r for r in records if r.ok]
    failures = len(records) - len(good)
    if failures:
        log.warning("%d of %d %s trials failed and are excluded from the statistics", failures, n_trials, solver)
    best, mean, worst, stdev = summary_stats([r.best_length for r in good])
    mean_time = statistics.fmean(r.wall_time for r in good) if good else math.nan

    currents = [r.current_trace for r in good if r.current_trace is not None]
    config_echo = config.to_dict()
    config_echo.pop("seed", None)
    return BenchReport(
        solver=solver,
        instance=name,
        metric=metric,
        config=config_echo,
        master_seed=master_seed,
        trials=records,
        best=best,
        mean=mean,
        worst=worst,
        stdev=stdev,
        mean_time=mean_time,
        avg_trace=_mean_trace([r.trace for r in good]),
        avg_current_trace=_mean_trace(currents) if currents else None,
        failures=failures,
    )


def summary_stats(lengths: Sequence[float]) -> tuple[float, float, float, float]:
    """``(best, mean, worst, stdev)`` with the sample standard deviation; NaNs when empty."""
    if not lengths:
        return math.nan, math.nan, math.nan, math.nan
    stdev = statistics.stdev(lengths) if len(lengths) > 1 else 0.0
    return min(lengths), statistics.fmean(lengths), max(lengths), stdev


def condense_trace(trace: Sequence[float] | np.ndarray, target: int) -> np.ndarray:
    """Subsample a length-``L`` series to ``target`` points.

    Point ``j`` (1-based) is ``trace[ceil(j * L / target)]``, so the last
    point is always kept.
    """
    values = np.asarray(trace)
    length = values.size
    if target < 1:
        raise ValueError(f"target must be >= 1, got {target}")
    if target > length:
        raise ValueError(f"cannot condense {length} points to {target}")
    picks = [-(-j * length // target) - 1 for j in range(1, target + 1)]
    return values[picks]


@dataclass(frozen=True)
class ConvergenceCriterion:
    """``|trace[k] - reference| <= epsilon`` for every iteration ``k > horizon`` (iterations count from 1)."""

    reference: float
    epsilon: float = 0.0
    horizon: int = 0

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")


def check_convergence(trace: Sequence[float] | np.ndarray, criterion: ConvergenceCriterion) -> int | None:
    """Return ``None`` when the criterion holds, otherwise the first violating iteration."""
    for k in range(criterion.horizon + 1, len(trace) + 1):
        if abs(trace[k - 1] - criterion.reference) > criterion.epsilon:
            return k
    return None


def convergence_horizon(trace: Sequence[float] | np.ndarray, reference: float, epsilon: float = 0.0) -> int | None:
    """Smallest ``N`` for which the trace has converged, or ``None`` if the last point is still off."""
    values = np.asarray(trace, dtype=float)
    off = np.flatnonzero(np.abs(values - reference) > epsilon)
    if off.size == 0:
        return 0
    last = int(off[-1]) + 1
    return None if last == values.size else last


def format_table(reports: Sequence[BenchReport]) -> str:
    """Plain-text statistics table with one column per solver."""
    rows = [
        ("best", lambda r: r.best),
        ("mean", lambda r: r.mean),
        ("worst", lambda r: r.worst),
        ("st.dev.", lambda r: r.stdev),
        ("time(s)", lambda r: r.mean_time),
    ]
    instance = reports[0].instance if reports else ""
    head = f"{'Problem':<14}{'Performance':<13}" + "".join(f"{r.solver.upper():>14}" for r in reports)
    lines = [head, "-" * len(head)]
    for i, (label, get) in enumerate(rows):
        prefix = instance if i == 0 else ""
        lines.append(f"{prefix:<14}{label:<13}" + "".join(f"{get(r):>14.6g}" for r in reports))
    return "\n".join(lines) + "\n"
