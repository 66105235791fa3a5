"""Swap, shift and symmetry transformations on sequences.

Every move is a permutation of *positions*: applying it to a sequence
rearranges the entries without looking at their values. Positions are
0-based. Each move can be applied two ways that are computed independently:

* :func:`apply_move` slices the sequence directly (the fast path);
* :func:`move_to_matrix` builds the permutation matrix ``G`` and
  :func:`apply_matrix` forms the product ``G @ x``.

The text form of a move (``str(move)``) uses 1-based positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Union

import numpy as np

__all__ = [
    "Move",
    "OperatorParams",
    "PermutationMatrix",
    "ShiftMove",
    "SwapMove",
    "SymmetryMove",
    "apply_matrix",
    "apply_move",
    "enumerate_moves",
    "move_to_matrix",
    "sample_shift",
    "sample_swap",
    "sample_symmetry",
]


@dataclass(frozen=True)
class OperatorParams:
    """Swap factor ``ma``, shift factor ``mb`` and symmetry factor ``mc``."""

    ma: int = 2
    mb: int = 1
    mc: int = 0

    def __post_init__(self) -> None:
        if self.ma < 2:
            raise ValueError(f"swap factor must be >= 2, got {self.ma}")
        if self.mb < 1:
            raise ValueError(f"shift factor must be >= 1, got {self.mb}")
        if self.mc < 0:
            raise ValueError(f"symmetry factor must be >= 0, got {self.mc}")


@dataclass(frozen=True)
class SwapMove:
    """Position ``targets[i]`` receives the entry previously at ``images[i]``."""

    targets: tuple[int, ...]
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.targets) != sorted(self.images):
            raise ValueError("swap images must be a permutation of the targets")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError("swap targets must be distinct")

    @property
    def is_identity(self) -> bool:
        return self.targets == self.images

    def check(self, n: int) -> None:
        if any(not 0 <= t < n for t in self.targets):
            raise IndexError(f"swap positions {self.targets} out of range for n={n}")

    def __str__(self) -> str:
        t = ",".join(str(v + 1) for v in self.targets)
        s = ",".join(str(v + 1) for v in self.images)
        return f"swap {t}->{s}"


@dataclass(frozen=True)
class ShiftMove:
    """Cut ``length`` entries starting at ``start`` and reinsert them after position ``insert_after``.

    ``insert_after`` refers to positions of the original sequence. It must lie
    outside the block and must not be ``start - 1`` (that would be a no-op).
    """

    start: int
    length: int
    insert_after: int

    @property
    def end(self) -> int:
        return self.start + self.length - 1

    def check(self, n: int) -> None:
        if self.length < 1 or self.start < 0 or self.end >= n:
            raise IndexError(f"shift block [{self.start}..{self.end}] out of range for n={n}")
        if not 0 <= self.insert_after < n:
            raise IndexError(f"shift insertion point {self.insert_after} out of range for n={n}")
        if self.start - 1 <= self.insert_after <= self.end:
            raise ValueError(f"shift insertion point {self.insert_after} overlaps the block")

    def __str__(self) -> str:
        return f"shift [{self.start + 1}..{self.end + 1}]->after {self.insert_after + 1}"


@dataclass(frozen=True)
class SymmetryMove:
    """Reverse positions ``pivot-half+1 .. pivot+center+half``.

    The ``half`` entries ending at ``pivot`` trade places, mirrored, with the
    ``half`` entries that follow the ``center`` positions after ``pivot``.
    """

    pivot: int
    center: int
    half: int

    @property
    def lo(self) -> int:
        return self.pivot - self.half + 1

    @property
    def hi(self) -> int:
        return self.pivot + self.center + self.half

    def check(self, n: int) -> None:
        if self.half < 1 or self.center < 0:
            raise ValueError(f"invalid symmetry sizes center={self.center} half={self.half}")
        if self.lo < 0 or self.hi >= n:
            raise IndexError(f"symmetry block [{self.lo}..{self.hi}] out of range for n={n}")

    def __str__(self) -> str:
        return f"sym {self.pivot + 1},{self.center},{self.half}"


Move = Union[SwapMove, ShiftMove, SymmetryMove]


@dataclass(frozen=True, eq=False)
class PermutationMatrix:
    """A 0/1 matrix with a single 1 per row and column, stored as ``perm[row] = column``."""

    perm: np.ndarray

    def __post_init__(self) -> None:
        perm = np.asarray(self.perm, dtype=np.intp)
        if perm.ndim != 1 or not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ValueError("perm must be a bijection on 0..n-1")
        perm.setflags(write=False)
        object.__setattr__(self, "perm", perm)

    @property
    def n(self) -> int:
        return self.perm.size

    @classmethod
    def identity(cls, n: int) -> "PermutationMatrix":
        return cls(np.arange(n))

    @classmethod
    def from_dense(cls, matrix: np.ndarray | Sequence[Sequence[int]]) -> "PermutationMatrix":
        m = np.asarray(matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if not (np.isin(m, (0, 1)).all() and (m.sum(axis=0) == 1).all() and (m.sum(axis=1) == 1).all()):
            raise ValueError("not a permutation matrix")
        return cls(m.argmax(axis=1))

    def dense(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=np.int64)
        m[np.arange(self.n), self.perm] = 1
        return m

    def __matmul__(self, other: "PermutationMatrix") -> "PermutationMatrix":
        return PermutationMatrix.from_dense(self.dense() @ other.dense())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PermutationMatrix) and np.array_equal(self.perm, other.perm)

    __hash__ = None  # type: ignore[assignment]


def apply_move(tour: Sequence[int] | np.ndarray, move: Move) -> np.ndarray:
    """Return a new sequence with ``move`` applied; the input is left untouched."""
    x = np.asarray(tour)
    n = x.size
    move.check(n)
    if isinstance(move, SwapMove):
        out = x.copy()
        out[list(move.targets)] = x[list(move.images)]
        return out
    if isinstance(move, ShiftMove):
        block = x[move.start : move.end + 1]
        rest = np.concatenate((x[: move.start], x[move.end + 1 :]))
        if move.insert_after > move.end:
            at = move.insert_after - move.length + 1
        else:
            at = move.insert_after + 1
        return np.concatenate((rest[:at], block, rest[at:]))
    if isinstance(move, SymmetryMove):
        out = x.copy()
        out[move.lo : move.hi + 1] = x[move.lo : move.hi + 1][::-1]
        return out
    raise TypeError(f"not a move: {move!r}")


def move_to_matrix(move: Move, n: int) -> PermutationMatrix:
    move.check(n)
    perm = np.arange(n)
    if isinstance(move, SwapMove):
        # y = eye(n); y(T,:) = y(S,:)
        eye = np.eye(n, dtype=np.int64)
        eye[list(move.targets), :] = eye[list(move.images), :]
        return PermutationMatrix.from_dense(eye)
    if isinstance(move, ShiftMove):
        s, e, q, length = move.start, move.end, move.insert_after, move.length
        if q > e:
            gap = q - e
            for i in range(s, s + gap):
                perm[i] = i + length
            for i in range(q - length + 1, q + 1):
                perm[i] = i - gap
        else:
            for j in range(length):
                perm[q + 1 + j] = s + j
            for i in range(q + length + 1, e + 1):
                perm[i] = i - length
        return PermutationMatrix(perm)
    if isinstance(move, SymmetryMove):
        for i in range(move.lo, move.hi + 1):
            perm[i] = move.lo + move.hi - i
        return PermutationMatrix(perm)
    raise TypeError(f"not a move: {move!r}")


def apply_matrix(matrix: PermutationMatrix, tour: Sequence[int] | np.ndarray) -> np.ndarray:
    """``G @ x`` as an explicit integer matrix-vector product."""
    x = np.asarray(tour)
    if x.shape != (matrix.n,):
        raise ValueError(f"matrix is {matrix.n}x{matrix.n} but the sequence has {x.size} entries")
    return (matrix.dense() @ x.astype(np.int64)).astype(x.dtype)


def sample_swap(n: int, ma: int, rng: np.random.Generator, distinct: bool = False) -> SwapMove:
    """Pick ``ma`` distinct positions and a random rearrangement of them.

    The rearrangement can be the identity (probability ``1/ma!``); pass
    ``distinct=True`` to redraw it until it is not.
    """
    if ma < 2:
        raise ValueError(f"swap factor must be >= 2, got {ma}")
    if n < ma:
        raise ValueError(f"cannot swap {ma} positions in a sequence of {n}")
    targets = rng.choice(n, size=ma, replace=False)
    while True:
        images = targets[rng.permutation(ma)]
        if not distinct or not np.array_equal(images, targets):
            break
    return SwapMove(tuple(int(v) for v in targets), tuple(int(v) for v in images))


def _shift_starts(n: int, length: int) -> range:
    # starting at 0 leaves n-length insertion points, any other start leaves
    # one fewer; a start is feasible when at least one remains
    last = n - length if n - length - 1 >= 1 else 0
    return range(0, last + 1)


def sample_shift(n: int, mb: int, rng: np.random.Generator) -> ShiftMove:
    if n < 3:
        raise ValueError(f"shift needs at least 3 positions, got {n}")
    if mb < 1:
        raise ValueError(f"shift factor must be >= 1, got {mb}")
    length = int(rng.integers(1, min(mb, n - 1) + 1))
    starts = _shift_starts(n, length)
    start = int(starts[rng.integers(len(starts))])
    end = start + length - 1
    choices = [q for q in range(n) if q < start - 1 or q > end]
    insert_after = choices[int(rng.integers(len(choices)))]
    return ShiftMove(start, length, insert_after)


def sample_symmetry(n: int, mc: int, rng: np.random.Generator) -> SymmetryMove:
    if mc < 0:
        raise ValueError(f"symmetry factor must be >= 0, got {mc}")
    if n < 2 + mc:
        raise ValueError(f"symmetry with center up to {mc} needs at least {2 + mc} positions, got {n}")
    center = int(rng.integers(0, mc + 1))
    # pivots admitting half >= 1 are exactly 0..n-2-center
    pivot = int(rng.integers(0, n - 1 - center))
    half_max = min(pivot + 1, n - 1 - pivot - center)
    half = int(rng.integers(1, half_max + 1))
    return SymmetryMove(pivot, center, half)


Sampler = Callable[[int, np.random.Generator], Move]


def enumerate_moves(n: int, params: OperatorParams = OperatorParams()) -> Iterator[Move]:
    """Every move the three samplers can produce for sequences of length ``n``."""
    from itertools import combinations, permutations

    for size in range(2, min(params.ma, n) + 1):
        for targets in combinations(range(n), size):
            for images in permutations(targets):
                if images != targets:
                    yield SwapMove(targets, images)
    for length in range(1, min(params.mb, n - 1) + 1):
        for start in _shift_starts(n, length):
            for q in range(n):
                if q < start - 1 or q > start + length - 1:
                    yield ShiftMove(start, length, q)
    for center in range(0, params.mc + 1):
        for pivot in range(0, n - 1 - center):
            for half in range(1, min(pivot + 1, n - 1 - pivot - center) + 1):
                yield SymmetryMove(pivot, center, half)
