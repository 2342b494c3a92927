"""Nearest-neighbor and nearest-enemy queries.

Ties are always broken toward the smallest point index. The KD-tree path only
proposes candidates; final distances come from the shared kernel so both paths
return identical tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .dataset import InvalidInputError, TrainingSet, distances_to

_CHUNK_ELEMS = 1 << 22
# Candidate radius slack covering rounding differences between cKDTree and the kernel.
_RADIUS_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class NeighborTable:
    ne_index: np.ndarray
    ne_dist: np.ndarray
    nn_index: np.ndarray
    nn_dist: np.ndarray

    def __len__(self) -> int:
        return len(self.ne_index)

    def equals(self, other: "NeighborTable") -> bool:
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("ne_index", "ne_dist", "nn_index", "nn_dist")
        )

    def to_csv(self) -> str:
        lines = ["index,neIndex,neDist"]
        lines += [f"{i},{j},{d!r}" for i, (j, d) in enumerate(zip(self.ne_index.tolist(), self.ne_dist.tolist()))]
        return "\n".join(lines) + "\n"


def _chunks(n: int, width: int):
    step = max(1, _CHUNK_ELEMS // max(1, width))
    for start in range(0, n, step):
        yield start, min(n, start + step)


def _block_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return distances_to(A[:, None, :], B[None, :, :])


def _brute_table(P: TrainingSet) -> NeighborTable:
    X, y = P.coords, P.labels
    n = P.n
    ne_i = np.empty(n, dtype=np.int64)
    ne_d = np.empty(n)
    nn_i = np.full(n, -1, dtype=np.int64)
    nn_d = np.full(n, math.inf)
    for lo, hi in _chunks(n, n * P.dimension):
        D = _block_distances(X[lo:hi], X)
        enemy = np.where(y[lo:hi, None] != y[None, :], D, np.inf)
        ne_i[lo:hi] = np.argmin(enemy, axis=1)
        ne_d[lo:hi] = enemy[np.arange(hi - lo), ne_i[lo:hi]]
        if n > 1:
            D[np.arange(hi - lo), np.arange(lo, hi)] = np.inf
            nn_i[lo:hi] = np.argmin(D, axis=1)
            nn_d[lo:hi] = D[np.arange(hi - lo), nn_i[lo:hi]]
    return NeighborTable(ne_i, ne_d, nn_i, nn_d)


def _exact_min(X, q, cand: np.ndarray, exclude: int = -1) -> tuple[int, float]:
    cand = np.sort(cand)
    if exclude >= 0:
        cand = cand[cand != exclude]
    d = distances_to(X[cand], q)
    k = int(np.argmin(d))
    return int(cand[k]), float(d[k])


def _kdtree_table(P: TrainingSet) -> NeighborTable:
    X, y = P.coords, P.labels
    n = P.n
    ne_i = np.empty(n, dtype=np.int64)
    ne_d = np.empty(n)
    nn_i = np.full(n, -1, dtype=np.int64)
    nn_d = np.full(n, math.inf)

    for c in np.unique(y):
        mine = np.flatnonzero(y == c)
        enemies = np.flatnonzero(y != c)
        tree = cKDTree(X[enemies])
        d0, _ = tree.query(X[mine], k=1)
        balls = tree.query_ball_point(X[mine], r=d0 * (1 + _RADIUS_SLACK))
        for i, ball in zip(mine, balls):
            ne_i[i], ne_d[i] = _exact_min(X, X[i], enemies[np.asarray(ball, dtype=np.int64)])

    if n > 1:
        tree = cKDTree(X)
        d2, i2 = tree.query(X, k=2)
        # column 1 is the nearest non-self point unless a duplicate displaced self
        first_other = np.where(i2[:, 0] == np.arange(n), d2[:, 1], d2[:, 0])
        balls = tree.query_ball_point(X, r=first_other * (1 + _RADIUS_SLACK))
        for i, ball in enumerate(balls):
            nn_i[i], nn_d[i] = _exact_min(X, X[i], np.asarray(ball, dtype=np.int64), exclude=i)
    return NeighborTable(ne_i, ne_d, nn_i, nn_d)


def build_neighbor_table(P: TrainingSet, method: str = "auto") -> NeighborTable:
    """Nearest enemy and nearest neighbor (excluding self) of every point.

    ``method`` is ``"brute"`` (pairwise scan), ``"kdtree"``, or ``"auto"``
    (KD-tree for larger low-dimensional sets). All give identical output.
    """
    P.require_condensable()
    if method == "auto":
        method = "kdtree" if P.n > 2000 and P.dimension <= 8 else "brute"
    if method == "brute":
        return _brute_table(P)
    if method == "kdtree":
        return _kdtree_table(P)
    raise InvalidInputError(f"unknown neighbor method {method!r}")


class Nearest(NamedTuple):
    index: int | None
    distance: float

    @property
    def is_empty(self) -> bool:
        return self.index is None


EMPTY = Nearest(None, math.inf)


def _as_indices(R) -> np.ndarray:
    indices = getattr(R, "indices", R)
    return np.unique(np.asarray(indices, dtype=np.int64))


def _query_coords(q) -> np.ndarray:
    return np.asarray(getattr(q, "coords", q), dtype=np.float64)


def nearest_in_subset(q, R, P: TrainingSet) -> Nearest:
    """Member of ``R`` closest to ``q``; ``EMPTY`` (infinite distance) if ``R`` is empty."""
    idx = _as_indices(R)
    if len(idx) == 0:
        return EMPTY
    qc = _query_coords(q)
    if qc.shape != (P.dimension,):
        raise InvalidInputError("query dimension does not match the training set")
    d = distances_to(P.coords[idx], qc)
    k = int(np.argmin(d))
    return Nearest(int(idx[k]), float(d[k]))


def nearest_in_subset_batch(Q: np.ndarray, R, P: TrainingSet) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`nearest_in_subset` for the rows of ``Q``."""
    idx = _as_indices(R)
    Q = np.asarray(Q, dtype=np.float64)
    if len(idx) == 0:
        return np.full(len(Q), -1, dtype=np.int64), np.full(len(Q), math.inf)
    S = P.coords[idx]
    out_i = np.empty(len(Q), dtype=np.int64)
    out_d = np.empty(len(Q))
    for lo, hi in _chunks(len(Q), len(idx) * P.dimension):
        D = _block_distances(Q[lo:hi], S)
        k = np.argmin(D, axis=1)
        out_i[lo:hi] = idx[k]
        out_d[lo:hi] = D[np.arange(hi - lo), k]
    return out_i, out_d


def classify_nn(q, R, P: TrainingSet) -> int:
    """Label id of the nearest member of ``R`` to ``q``."""
    hit = nearest_in_subset(q, R, P)
    if hit.is_empty:
        raise InvalidInputError("cannot classify against an empty subset")
    return int(P.labels[hit.index])


def classify_batch(Q: np.ndarray, R, P: TrainingSet) -> np.ndarray:
    if len(_as_indices(R)) == 0:
        raise InvalidInputError("cannot classify against an empty subset")
    idx, _ = nearest_in_subset_batch(Q, R, P)
    return P.labels[idx]


def indices_of(R) -> Sequence[int]:
    return _as_indices(R)
