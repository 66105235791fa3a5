"""Discrete state transition algorithm for the symmetric TSP.

Each outer iteration runs three phases in a fixed order: swap, shift,
symmetry. A phase draws ``se`` independent candidates from the incumbent
and keeps the best one only if it is strictly shorter.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np

from statsp.core import DistanceMatrix, Evaluator, RunResult, random_tour
from statsp.tsplib import build_distance_matrix
from statsp.operators import OperatorParams, Sampler, apply_move, sample_shift, sample_swap, sample_symmetry

__all__ = ["StaConfig", "operator_phase", "phase_samplers", "sta_solve"]


@dataclass(frozen=True)
class StaConfig:
    se: int = 20
    max_iters: int = 200
    params: OperatorParams = field(default_factory=OperatorParams)
    seed: int | None = None
    distinct_swaps: bool = False
    time_limit: float | None = None

    def __post_init__(self) -> None:
        if self.se < 1:
            raise ValueError(f"se must be >= 1, got {self.se}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")

    def to_dict(self) -> dict:
        return asdict(self)


def phase_samplers(params: OperatorParams, distinct_swaps: bool = False) -> list[tuple[str, Sampler]]:
    """The three move samplers in phase order."""
    return [
        ("swap", partial(_swap, ma=params.ma, distinct=distinct_swaps)),
        ("shift", partial(_shift, mb=params.mb)),
        ("symmetry", partial(_symmetry, mc=params.mc)),
    ]


def _swap(n: int, rng: np.random.Generator, ma: int, distinct: bool):
    return sample_swap(n, ma, rng, distinct=distinct)


def _shift(n: int, rng: np.random.Generator, mb: int):
    return sample_shift(n, mb, rng)


def _symmetry(n: int, rng: np.random.Generator, mc: int):
    return sample_symmetry(n, mc, rng)


def operator_phase(
    incumbent: np.ndarray,
    incumbent_length: float,
    sampler: Sampler,
    se: int,
    evaluator: Evaluator,
    rng: np.random.Generator,
) -> tuple[np.ndarray, float]:
    """Draw ``se`` candidates from ``incumbent``; return the best if strictly shorter, else the incumbent."""
    n = incumbent.size
    candidates = np.empty((se, n), dtype=incumbent.dtype)
    for i in range(se):
        candidates[i] = apply_move(incumbent, sampler(n, rng))
    lengths = evaluator.batch(candidates)
    best = int(np.argmin(lengths))
    if lengths[best] < incumbent_length:
        return candidates[best], float(lengths[best])
    return incumbent, incumbent_length


def sta_solve(problem, config: StaConfig = StaConfig()) -> RunResult:
    """Run the solver on a :class:`~statsp.tsplib.TspInstance` or a :class:`DistanceMatrix`."""
    dmat = _as_matrix(problem)
    started = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    evaluator = Evaluator(dmat)
    phases = phase_samplers(config.params, config.distinct_swaps)

    best = random_tour(dmat.n, rng)
    best_length = evaluator(best)
    trace = []
    for _ in range(config.max_iters):
        for _, sampler in phases:
            best, best_length = operator_phase(best, best_length, sampler, config.se, evaluator, rng)
        trace.append(best_length)
        if config.time_limit is not None and time.perf_counter() - started > config.time_limit:
            break

    return RunResult(
        best_tour=best.copy(),
        best_length=best_length,
        trace=np.array(trace),
        eval_count=evaluator.count,
        wall_time=time.perf_counter() - started,
        config=config.to_dict(),
    )


def _as_matrix(problem) -> DistanceMatrix:
    if isinstance(problem, DistanceMatrix):
        return problem
    return build_distance_matrix(problem)
