import math
from collections import Counter
from itertools import permutations

import numpy as np
import pytest

from conftest import brute_force_optimum, random_matrix
from statsp.baselines import (
    TAU_MIN,
    AcoConfig,
    PheromoneMatrix,
    SaConfig,
    aco_construct_tour,
    aco_solve,
    aco_update_pheromone,
    nearest_neighbor_tour,
    sa_acceptance_probability,
    sa_solve,
)
from statsp.core import DistanceMatrix, tour_length, validate_tour


def test_acceptance_probability_limits():
    assert sa_acceptance_probability(-3.0, 1.0) == 1.0
    assert sa_acceptance_probability(0.0, 1e-300) == 1.0
    assert sa_acceptance_probability(10.0, 1e12) == pytest.approx(1.0, abs=1e-10)
    assert sa_acceptance_probability(10.0, 1e-9) == 0.0
    assert sa_acceptance_probability(10.0, 0.0) == 0.0
    assert sa_acceptance_probability(2.0, 4.0) == pytest.approx(math.exp(-0.5))


def test_sa_run_shape():
    dmat = random_matrix(20, 1)
    result = sa_solve(dmat, SaConfig(seed=3, iters=1500))
    assert result.eval_count == 1501
    assert len(result.trace) == len(result.current_trace) == 1500
    assert np.all(np.diff(result.trace) <= 0)
    # the working solution does get worse at high temperature
    assert np.any(np.diff(result.current_trace) > 0)
    assert np.all(result.trace <= result.current_trace)
    assert validate_tour(result.best_tour, 20) is None
    assert result.best_length == tour_length(result.best_tour, dmat)


def test_sa_determinism_and_validation():
    dmat = random_matrix(10, 2)
    a = sa_solve(dmat, SaConfig(seed=5, iters=300))
    b = sa_solve(dmat, SaConfig(seed=5, iters=300))
    np.testing.assert_array_equal(a.current_trace, b.current_trace)
    for bad in (dict(t0=0), dict(cooling=1.0), dict(cooling=0), dict(iters=0)):
        with pytest.raises(ValueError):
            SaConfig(**bad)


def test_construct_three_nodes():
    dmat = random_matrix(3, 0)
    tour = aco_construct_tour(PheromoneMatrix.uniform(3, 1.0), dmat, 1.0, 5.0, np.random.default_rng(0))
    assert validate_tour(tour, 3) is None


def test_construct_is_uniform_without_heuristic():
    # uniform trails and beta = 0: every step is uniform, so all 24 orders are equally likely
    dmat = random_matrix(4, 7)
    pher = PheromoneMatrix.uniform(4, 0.3)
    rng = np.random.default_rng(99)
    samples = 10_000
    counts = Counter(tuple(aco_construct_tour(pher, dmat, 1.0, 0.0, rng)) for _ in range(samples))
    assert set(counts) == set(permutations(range(4)))
    expected = samples / 24
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 49.728  # 0.999 quantile, 23 dof


def _direct_nearest_neighbour(d, start):
    tour = [start]
    while len(tour) < len(d):
        here = tour[-1]
        tour.append(min((j for j in range(len(d)) if j not in tour), key=lambda j: d[here][j]))
    return tour


def test_large_beta_is_greedy_nearest_neighbour():
    dmat = random_matrix(12, 21)
    rng = np.random.default_rng(1)
    pher = PheromoneMatrix.uniform(12, 1.0)
    for _ in range(50):
        tour = aco_construct_tour(pher, dmat, 0.0, 400.0, rng)
        assert tour.tolist() == _direct_nearest_neighbour(dmat.d.tolist(), int(tour[0]))
    assert nearest_neighbor_tour(dmat, 4).tolist() == _direct_nearest_neighbour(dmat.d.tolist(), 4)


def test_update_without_ants_only_decays():
    rng = np.random.default_rng(0)
    tau = rng.uniform(0.5, 2.0, size=(6, 6))
    pher = PheromoneMatrix(tau + tau.T)
    out = aco_update_pheromone(pher, [], random_matrix(6, 0), 0.9)
    np.testing.assert_array_equal(out.tau, 0.9 * pher.tau)


def test_update_single_ant_deposit():
    dmat = random_matrix(5, 3)
    pher = PheromoneMatrix.uniform(5, 0.5)
    tour = np.array([2, 0, 4, 1, 3])
    length = tour_length(tour, dmat)
    out = aco_update_pheromone(pher, [tour], dmat, 0.9)
    edges = {frozenset(e) for e in zip(tour, np.roll(tour, -1))}
    for i in range(5):
        for j in range(5):
            expected = 0.9 * 0.5 + (1 / length if frozenset((i, j)) in edges else 0.0)
            assert out.tau[i, j] == pytest.approx(expected, rel=1e-15)
    assert np.array_equal(out.tau, out.tau.T)


def test_decay_stops_at_the_floor():
    pher = PheromoneMatrix.uniform(4, 1.0)
    dmat = random_matrix(4, 0)
    previous = pher.tau.copy()
    for k in range(1, 400):
        pher = aco_update_pheromone(pher, [], dmat, 0.9)
        assert (pher.tau >= TAU_MIN).all()
        # geometric decay until the floor takes over
        np.testing.assert_allclose(pher.tau, np.maximum(0.9**k, TAU_MIN), rtol=1e-9)
        assert (pher.tau <= previous).all()
        previous = pher.tau.copy()
    assert (pher.tau == TAU_MIN).all()


def test_pheromone_stays_within_bounds_during_a_run():
    dmat = random_matrix(10, 4)
    cfg = AcoConfig(ants=8, rho=0.8)
    rng = np.random.default_rng(2)
    tau0 = 0.05
    pher = PheromoneMatrix.uniform(10, tau0)
    shortest = brute_force_optimum(dmat)
    # each edge gets at most `ants` deposits of at most 1/L_opt per iteration
    upper = max(tau0, cfg.ants / shortest / (1 - cfg.rho))
    for _ in range(60):
        tours = [aco_construct_tour(pher, dmat, cfg.alpha, cfg.beta, rng) for _ in range(cfg.ants)]
        pher = aco_update_pheromone(pher, tours, dmat, cfg.rho)
        assert pher.tau.min() >= TAU_MIN
        assert pher.tau.max() <= upper * (1 + 1e-12)


def test_aco_three_nodes_optimal_first_iteration():
    dmat = random_matrix(3, 1)
    result = aco_solve(dmat, AcoConfig(seed=0, iters=5, ants=4))
    assert result.trace[0] == pytest.approx(dmat.d[0, 1] + dmat.d[1, 2] + dmat.d[0, 2])


def test_aco_run_shape():
    dmat = random_matrix(15, 8)
    result = aco_solve(dmat, AcoConfig(seed=1, iters=30, ants=6))
    assert result.eval_count == 180
    assert len(result.trace) == 30
    assert np.all(np.diff(result.trace) <= 0)
    assert validate_tour(result.best_tour, 15) is None
    assert result.best_length == tour_length(result.best_tour, dmat)
    assert result.config["tau0_effective"] == pytest.approx(6 / tour_length(nearest_neighbor_tour(dmat), dmat))


def test_aco_handles_coincident_nodes():
    d = np.array([[0, 0, 3, 4], [0, 0, 3, 4], [3, 3, 0, 5], [4, 4, 5, 0]], dtype=float)
    result = aco_solve(DistanceMatrix(d), AcoConfig(seed=0, iters=5, ants=3))
    assert validate_tour(result.best_tour, 4) is None
    assert math.isfinite(result.best_length)


def test_aco_finds_small_optimum_in_most_seeds():
    hits = 0
    for seed in range(10):
        dmat = random_matrix(8, 100 + seed)
        result = aco_solve(dmat, AcoConfig(seed=seed, iters=100))
        hits += math.isclose(result.best_length, brute_force_optimum(dmat), rel_tol=1e-9)
    assert hits > 5


def test_aco_config_validation():
    for bad in (dict(ants=0), dict(rho=1.0), dict(rho=0.0), dict(alpha=-1), dict(iters=0), dict(tau0=0.0)):
        with pytest.raises(ValueError):
            AcoConfig(**bad)
