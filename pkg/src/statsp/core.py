"""Tours, distance matrices and the tour-length cost function.

A tour is a 1-D integer numpy array holding a permutation of the node
indices ``0..n-1``; the route is closed, so the last node connects back to
the first. Text output uses 1-based labels, matching TSPLIB files.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "DistanceMatrix",
    "Evaluator",
    "InvalidTourError",
    "RunResult",
    "format_tour",
    "parse_tour",
    "random_tour",
    "tour_length",
    "validate_tour",
]


class InvalidTourError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    d: np.ndarray

    def __post_init__(self) -> None:
        d = np.array(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"distance matrix must be square, got shape {d.shape}")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ValueError("distances must be finite and nonnegative")
        if np.any(np.diag(d) != 0):
            raise ValueError("distance matrix diagonal must be zero")
        if not np.array_equal(d, d.T):
            raise ValueError("distance matrix must be symmetric")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]


def validate_tour(tour: Sequence[int] | np.ndarray, n: int) -> str | None:
    """Return ``None`` if ``tour`` is a permutation of ``0..n-1``, else a description of the problem."""
    items = [int(v) for v in tour]
    if len(items) != n:
        return f"length mismatch: expected {n} nodes, got {len(items)}"
    counts = Counter(items)
    problems = []
    duplicates = sorted(v for v, c in counts.items() if c > 1)
    missing = sorted(set(range(n)) - counts.keys())
    out_of_range = sorted(v for v in counts if not 0 <= v < n)
    if duplicates:
        problems.append("duplicate " + ", ".join(map(str, duplicates)))
    if missing:
        problems.append("missing " + ", ".join(map(str, missing)))
    if out_of_range:
        problems.append("out of range " + ", ".join(map(str, out_of_range)))
    return " / ".join(problems) if problems else None


def check_tour(tour: Sequence[int] | np.ndarray, n: int) -> np.ndarray:
    problem = validate_tour(tour, n)
    if problem is not None:
        raise InvalidTourError(problem)
    return np.asarray(tour, dtype=np.intp)


def tour_length(tour: Sequence[int] | np.ndarray, dmat: DistanceMatrix) -> float:
    """Length of the closed route through ``tour``."""
    order = np.asarray(tour, dtype=np.intp)
    if order.shape != (dmat.n,):
        raise ValueError(f"tour has {order.size} nodes but the distance matrix is {dmat.n}x{dmat.n}")
    return float(dmat.d[order, np.roll(order, -1)].sum())


def random_tour(n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 3:
        raise ValueError(f"a tour needs at least 3 nodes, got {n}")
    return rng.permutation(n).astype(np.intp)


def format_tour(tour: Sequence[int] | np.ndarray) -> str:
    """Whitespace-separated 1-based node labels."""
    return " ".join(str(int(v) + 1) for v in tour)


def parse_tour(text: str, n: int | None = None) -> np.ndarray:
    """Inverse of :func:`format_tour`; validates when ``n`` is given."""
    order = np.array([int(tok) - 1 for tok in text.split()], dtype=np.intp)
    if n is not None:
        check_tour(order, n)
    return order


class Evaluator:
    """Tour-length oracle that counts how many tours it has scored."""

    def __init__(self, dmat: DistanceMatrix):
        self.dmat = dmat
        self.count = 0

    def __call__(self, tour: np.ndarray) -> float:
        self.count += 1
        return tour_length(tour, self.dmat)

    def batch(self, tours: np.ndarray) -> np.ndarray:
        """Score each row of a ``(k, n)`` array of tours."""
        tours = np.asarray(tours, dtype=np.intp)
        self.count += tours.shape[0]
        return self.dmat.d[tours, np.roll(tours, -1, axis=1)].sum(axis=1)


@dataclass
class RunResult:
    """Outcome of one solver run.

    ``trace`` holds the best-so-far length after every iteration.
    ``current_trace`` is only filled by solvers whose working solution can
    get worse (simulated annealing).
    """

    best_tour: np.ndarray
    best_length: float
    trace: np.ndarray
    eval_count: int
    wall_time: float
    current_trace: np.ndarray | None = None
    config: dict = field(default_factory=dict)
