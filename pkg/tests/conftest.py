from __future__ import annotations

import itertools
import math
from pathlib import Path

import numpy as np
import pytest

from statsp.core import DistanceMatrix
from statsp.operators import OperatorParams, sample_shift, sample_swap, sample_symmetry
from statsp.tsplib import build_distance_matrix, load_bundled

DATA = Path(__file__).parent / "data"

# Best tours published for the three benchmark instances, 1-based.
PUBLISHED_TOURS = {
    "ulysses16": "7 6 14 13 12 16 1 3 2 4 8 15 5 11 9 10",
    "att48": (
        "9 40 15 12 11 23 3 22 16 41 34 48 5 29 2 42 26 4 35 45 10 24 32 39 25 14 13 21 47 20 "
        "33 46 36 30 43 17 27 19 37 6 28 7 18 44 31 38 8 1"
    ),
    "berlin52": (
        "3 17 21 42 7 2 30 23 20 50 29 16 46 44 34 35 36 39 40 37 38 48 24 5 15 6 4 25 12 28 "
        "27 26 47 13 14 52 11 51 33 43 10 9 8 41 19 45 32 49 1 22 31 18"
    ),
}
PUBLISHED_LENGTHS = {"ulysses16": 73.9876, "att48": 3.3724e4, "berlin52": 7.5444e3}

_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def instances():
    return {name: load_bundled(name) for name in PUBLISHED_TOURS}


@pytest.fixture(scope="session")
def raw_matrices(instances):
    return {name: build_distance_matrix(inst) for name, inst in instances.items()}


def read_opt_tour(name: str) -> np.ndarray:
    """Read a TSPLIB .opt.tour file into a 0-based array."""
    nodes = []
    in_section = False
    for line in (DATA / f"{name}.opt.tour").read_text().splitlines():
        line = line.strip()
        if line == "TOUR_SECTION":
            in_section = True
            continue
        if in_section:
            for tok in line.split():
                if tok in ("-1", "EOF"):
                    return np.array(nodes) - 1
                nodes.append(int(tok))
    return np.array(nodes) - 1


def random_matrix(n: int, seed: int) -> DistanceMatrix:
    rng = np.random.default_rng(seed)
    xy = rng.uniform(0, 100, size=(n, 2))
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            d[i, j] = math.sqrt((xy[i, 0] - xy[j, 0]) ** 2 + (xy[i, 1] - xy[j, 1]) ** 2)
    d = np.triu(d, 1)
    return DistanceMatrix(d + d.T)


def brute_force_optimum(dmat: DistanceMatrix) -> float:
    """Shortest closed tour by enumerating every tour that starts at node 0."""
    n = dmat.n
    d = dmat.d
    best = math.inf
    for rest in itertools.permutations(range(1, n)):
        if rest[0] > rest[-1]:
            continue  # the mirror image is enumerated too
        length = d[0, rest[0]] + d[rest[-1], 0]
        for a, b in zip(rest, rest[1:]):
            length += d[a, b]
        best = min(best, length)
    return best


def random_move(n: int, rng: np.random.Generator):
    """Draw one move of a random kind with random factors."""
    params = OperatorParams(ma=int(rng.integers(2, n + 1)), mb=int(rng.integers(1, n)), mc=int(rng.integers(0, n - 1)))
    kind = rng.integers(3)
    if kind == 0:
        return sample_swap(n, params.ma, rng)
    if kind == 1:
        return sample_shift(n, params.mb, rng)
    return sample_symmetry(n, params.mc, rng)


@pytest.fixture
def criterion():
    """Record one acceptance verdict line; all lines are echoed in the terminal summary."""

    def record(label: str, ok: bool, detail: str) -> bool:
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
