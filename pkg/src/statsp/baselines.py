"""Reference solvers: simulated annealing and the classic Ant System."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from statsp.core import DistanceMatrix, Evaluator, RunResult, random_tour, tour_length
from statsp.sta import _as_matrix

__all__ = [
    "AcoConfig",
    "PheromoneMatrix",
    "SaConfig",
    "aco_construct_tour",
    "aco_solve",
    "aco_update_pheromone",
    "nearest_neighbor_tour",
    "sa_acceptance_probability",
    "sa_solve",
]

TAU_MIN = 1e-12
# stands in for 1/0 when two nodes share a location
_MIN_DISTANCE = 1e-12


# -- simulated annealing ------------------------------------------------------


@dataclass(frozen=True)
class SaConfig:
    t0: float = 5000.0
    cooling: float = 0.97
    iters: int = 4000
    seed: int | None = None

    def __post_init__(self) -> None:
        if not self.t0 > 0:
            raise ValueError(f"t0 must be positive, got {self.t0}")
        if not 0 < self.cooling < 1:
            raise ValueError(f"cooling must be in (0, 1), got {self.cooling}")
        if self.iters < 1:
            raise ValueError(f"iters must be >= 1, got {self.iters}")

    def to_dict(self) -> dict:
        return asdict(self)


def sa_acceptance_probability(delta: float, temperature: float) -> float:
    """Metropolis rule: improvements always pass, a worsening ``delta`` passes with ``exp(-delta/T)``."""
    if delta <= 0:
        return 1.0
    if temperature <= 0:
        return 0.0
    return math.exp(-delta / temperature)


def sa_solve(problem, config: SaConfig = SaConfig()) -> RunResult:
    """One proposal per iteration (swap of two random positions), geometric cooling after each."""
    dmat = _as_matrix(problem)
    started = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    evaluator = Evaluator(dmat)
    n = dmat.n

    current = random_tour(n, rng)
    current_length = evaluator(current)
    best, best_length = current.copy(), current_length
    temperature = config.t0
    trace = np.empty(config.iters)
    current_trace = np.empty(config.iters)

    for it in range(config.iters):
        i, j = rng.choice(n, size=2, replace=False)
        candidate = current.copy()
        candidate[i], candidate[j] = current[j], current[i]
        candidate_length = evaluator(candidate)
        delta = candidate_length - current_length
        if delta < 0 or rng.random() < sa_acceptance_probability(delta, temperature):
            current, current_length = candidate, candidate_length
            if current_length < best_length:
                best, best_length = current.copy(), current_length
        temperature *= config.cooling
        trace[it] = best_length
        current_trace[it] = current_length

    return RunResult(
        best_tour=best,
        best_length=best_length,
        trace=trace,
        eval_count=evaluator.count,
        wall_time=time.perf_counter() - started,
        current_trace=current_trace,
        config=config.to_dict(),
    )


# -- ant system ----------------------------------------------------------------


@dataclass(frozen=True)
class AcoConfig:
    """``rho`` is the fraction of pheromone kept from one iteration to the next.

    ``tau0=None`` starts every trail at ``ants / L_nn`` where ``L_nn`` is the
    length of the nearest-neighbour tour from node 0.
    """

    alpha: float = 1.0
    beta: float = 5.0
    rho: float = 0.9
    ants: int = 20
    iters: int = 200
    q: float = 1.0
    tau0: float | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.ants < 1:
            raise ValueError(f"ants must be >= 1, got {self.ants}")
        if self.iters < 1:
            raise ValueError(f"iters must be >= 1, got {self.iters}")
        if not 0 < self.rho < 1:
            raise ValueError(f"rho must be in (0, 1), got {self.rho}")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")
        if self.tau0 is not None and not self.tau0 > 0:
            raise ValueError(f"tau0 must be positive, got {self.tau0}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(eq=False)
class PheromoneMatrix:
    tau: np.ndarray
    tau_min: float = TAU_MIN

    def __post_init__(self) -> None:
        self.tau = np.array(self.tau, dtype=float)
        if self.tau.ndim != 2 or self.tau.shape[0] != self.tau.shape[1]:
            raise ValueError("pheromone matrix must be square")
        if not np.array_equal(self.tau, self.tau.T):
            raise ValueError("pheromone matrix must be symmetric")
        if np.any(self.tau <= 0):
            raise ValueError("pheromone must be positive")

    @classmethod
    def uniform(cls, n: int, value: float, tau_min: float = TAU_MIN) -> "PheromoneMatrix":
        return cls(np.full((n, n), float(value)), tau_min)

    @property
    def n(self) -> int:
        return self.tau.shape[0]


def _log_weights(tau: np.ndarray, dmat: DistanceMatrix, alpha: float, beta: float) -> np.ndarray:
    # log(tau^alpha * (1/d)^beta); working in logs keeps large beta from overflowing
    log_eta = -np.log(np.maximum(dmat.d, _MIN_DISTANCE))
    return alpha * np.log(tau) + beta * log_eta


def _construct(log_w: np.ndarray, ants: int, rng: np.random.Generator) -> np.ndarray:
    """Build ``ants`` tours at once; row ``k`` of the result is ant ``k``'s tour."""
    n = log_w.shape[0]
    rows = np.arange(ants)
    tours = np.empty((ants, n), dtype=np.intp)
    visited = np.zeros((ants, n), dtype=bool)
    current = rng.integers(0, n, size=ants)
    tours[:, 0] = current
    visited[rows, current] = True
    for step in range(1, n):
        lw = np.where(visited, -np.inf, log_w[current])
        w = np.exp(lw - lw.max(axis=1, keepdims=True))
        cum = np.cumsum(w, axis=1)
        r = rng.random(ants) * cum[:, -1]
        nxt = (cum > r[:, None]).argmax(axis=1)
        tours[:, step] = nxt
        visited[rows, nxt] = True
        current = nxt
    return tours


def aco_construct_tour(
    pheromone: PheromoneMatrix,
    dmat: DistanceMatrix,
    alpha: float,
    beta: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """One ant: random start, then next node ``j`` with probability proportional to ``tau_ij^alpha / d_ij^beta``."""
    return _construct(_log_weights(pheromone.tau, dmat, alpha, beta), 1, rng)[0]


def aco_update_pheromone(
    pheromone: PheromoneMatrix,
    tours,
    dmat: DistanceMatrix,
    rho: float,
    q: float = 1.0,
    lengths=None,
) -> PheromoneMatrix:
    """Keep ``rho`` of every trail, deposit ``q / L`` on each edge of each tour, then apply the floor."""
    tau = rho * pheromone.tau
    if lengths is None:
        lengths = [tour_length(t, dmat) for t in tours]
    for tour, length in zip(tours, lengths):
        tour = np.asarray(tour, dtype=np.intp)
        nxt = np.roll(tour, -1)
        deposit = q / max(float(length), _MIN_DISTANCE)
        # each edge appears once per tour, so plain fancy-index add is safe
        tau[tour, nxt] += deposit
        tau[nxt, tour] += deposit
    np.maximum(tau, pheromone.tau_min, out=tau)
    return PheromoneMatrix(tau, pheromone.tau_min)


def nearest_neighbor_tour(dmat: DistanceMatrix, start: int = 0) -> np.ndarray:
    n = dmat.n
    tour = [start]
    unvisited = np.ones(n, dtype=bool)
    unvisited[start] = False
    for _ in range(n - 1):
        row = np.where(unvisited, dmat.d[tour[-1]], np.inf)
        nxt = int(np.argmin(row))
        tour.append(nxt)
        unvisited[nxt] = False
    return np.array(tour, dtype=np.intp)


def aco_solve(problem, config: AcoConfig = AcoConfig()) -> RunResult:
    dmat = _as_matrix(problem)
    started = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    evaluator = Evaluator(dmat)
    n = dmat.n

    tau0 = config.tau0
    if tau0 is None:
        tau0 = config.ants / tour_length(nearest_neighbor_tour(dmat), dmat)
    pheromone = PheromoneMatrix.uniform(n, tau0)

    best, best_length = None, math.inf
    trace = np.empty(config.iters)
    for it in range(config.iters):
        log_w = _log_weights(pheromone.tau, dmat, config.alpha, config.beta)
        tours = _construct(log_w, config.ants, rng)
        lengths = evaluator.batch(tours)
        k = int(np.argmin(lengths))
        if lengths[k] < best_length:
            best, best_length = tours[k].copy(), float(lengths[k])
        pheromone = aco_update_pheromone(pheromone, tours, dmat, config.rho, config.q, lengths)
        trace[it] = best_length

    return RunResult(
        best_tour=best,
        best_length=best_length,
        trace=trace,
        eval_count=evaluator.count,
        wall_time=time.perf_counter() - started,
        config={**config.to_dict(), "tau0_effective": tau0},
    )
