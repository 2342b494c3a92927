"""Nearest-neighbor condensation algorithms.

Every condenser is a pure function ``(P, table) -> Subset``. Points are scanned
in increasing order of nearest-enemy distance with ties broken by index, which
makes the output deterministic.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dataset import InvalidInputError, TrainingSet, distances_to
from .neighbors import NeighborTable, build_neighbor_table


class Algorithm(str, enum.Enum):
    MSS = "mss"
    RSS = "rss"
    VSS = "vss"
    FCNN = "fcnn"
    NET = "net"
    EXACT = "exact"  # exhaustive minimum, produced by the verifier only


@dataclass(frozen=True)
class Subset:
    """Indices picked by a condenser, in selection order.

    ``trace`` is only filled by FCNN: one ``(iteration, represented, added)``
    triple per representative.
    """

    algorithm: Algorithm
    indices: tuple[int, ...]
    source_size: int
    stats: dict = field(default_factory=dict)
    dataset_hash: str | None = None
    trace: tuple[tuple[int, int, int], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if len(set(self.indices)) != len(self.indices):
            raise InvalidInputError("subset indices must be unique")
        if any(i < 0 or i >= self.source_size for i in self.indices):
            raise InvalidInputError("subset index out of range")
        if self.trace is not None:
            object.__setattr__(self, "trace", tuple(tuple(int(v) for v in t) for t in self.trace))

    def __len__(self) -> int:
        return len(self.indices)

    def to_dict(self) -> dict:
        out = {
            "algorithm": self.algorithm.value,
            "sourceSize": self.source_size,
            "indices": list(self.indices),
            "stats": dict(self.stats),
        }
        if self.dataset_hash is not None:
            out["datasetHash"] = self.dataset_hash
        if self.trace is not None:
            out["trace"] = [list(t) for t in self.trace]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "Subset":
        trace = data.get("trace")
        return cls(
            algorithm=data["algorithm"],
            indices=tuple(data["indices"]),
            source_size=int(data["sourceSize"]),
            stats=dict(data.get("stats", {})),
            dataset_hash=data.get("datasetHash"),
            trace=None if trace is None else tuple(tuple(t) for t in trace),
        )

    @classmethod
    def from_json(cls, text: str) -> "Subset":
        return cls.from_dict(json.loads(text))

    def to_csv(self, P: TrainingSet) -> str:
        cols = ["index"] + [f"x{j}" for j in range(P.dimension)] + ["label"]
        lines = [",".join(cols)]
        for i in self.indices:
            lines.append(
                ",".join([str(i)] + [repr(float(v)) for v in P.coords[i]] + [P.class_names[P.labels[i]]])
            )
        return "\n".join(lines) + "\n"


def scan_order(table: NeighborTable) -> np.ndarray:
    """Point indices by ascending nearest-enemy distance, then index."""
    return np.lexsort((np.arange(len(table)), table.ne_dist))


class _Buffer:
    """Growing coordinate store for the selected set."""

    def __init__(self, n: int, d: int):
        self.coords = np.empty((n, d))
        self.size = 0

    def add(self, x: np.ndarray) -> None:
        self.coords[self.size] = x
        self.size += 1

    def min_distance(self, q: np.ndarray) -> float:
        if self.size == 0:
            return math.inf
        return float(distances_to(self.coords[: self.size], q).min())


def _subset(P, algorithm, selected, stats, trace=None) -> Subset:
    return Subset(algorithm, tuple(selected), P.n, stats, P.content_hash(), trace)


def _prepare(P: TrainingSet, table: NeighborTable | None) -> NeighborTable:
    P.require_condensable()
    if table is None:
        table = build_neighbor_table(P)
    elif len(table) != P.n:
        raise InvalidInputError("neighbor table does not match the training set")
    return table


def mss(P: TrainingSet, table: NeighborTable | None = None) -> Subset:
    """Modified Selective Subset.

    Each point, taken in scan order, removes from the survivor set every later
    survivor whose NE ball strictly contains it, and is kept iff it removed
    at least one point.
    """
    table = _prepare(P, table)
    order = scan_order(table)
    X = P.coords[order]
    ne = table.ne_dist[order]
    alive = np.ones(P.n, dtype=bool)
    selected = []
    comparisons = 0
    for i in range(P.n):
        cand = i + np.flatnonzero(alive[i:])
        if len(cand) == 0:
            continue
        d = distances_to(X[cand], X[i])
        comparisons += len(cand)
        hit = d < ne[cand]
        if hit.any():
            alive[cand[hit]] = False
            selected.append(int(order[i]))
    return _subset(P, Algorithm.MSS, selected, {"iterations": 1, "comparisons": comparisons})


def rss(P: TrainingSet, table: NeighborTable | None = None) -> Subset:
    """Relaxed Selective Subset: keep a point iff no kept point lies strictly inside its NE ball."""
    table = _prepare(P, table)
    buf = _Buffer(P.n, P.dimension)
    selected = []
    comparisons = 0
    for i in scan_order(table):
        x = P.coords[i]
        comparisons += buf.size
        if buf.min_distance(x) >= table.ne_dist[i]:
            buf.add(x)
            selected.append(int(i))
    return _subset(P, Algorithm.RSS, selected, {"iterations": 1, "comparisons": comparisons})


def tangent_ball_radii(p: np.ndarray, enemy: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Radius of the ball touching ``enemy`` and each candidate, centered on segment p-enemy.

    Candidates on the wrong side of ``enemy`` (non-positive projection) get ``inf``.
    """
    u = p - enemy
    u = u / np.sqrt(u @ u)
    v = candidates - enemy
    uv = v @ u
    vv = (v * v).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = vv / (2 * uv)
    return np.where(uv > 0, r, np.inf)


def vss(P: TrainingSet, table: NeighborTable | None = None) -> Subset:
    """Voronoi Selective Subset.

    Same trigger as RSS, but the point added is the one inside the NE ball that
    minimises the radius of the ball tangent to it and the nearest enemy with
    center on the segment between the point and its enemy. That ball is empty,
    so the added point is a border point.
    """
    table = _prepare(P, table)
    X = P.coords
    buf = _Buffer(P.n, P.dimension)
    chosen = np.zeros(P.n, dtype=bool)
    selected = []
    comparisons = 0
    for i in scan_order(table):
        comparisons += buf.size
        if buf.min_distance(X[i]) < table.ne_dist[i]:
            continue
        d = distances_to(X, X[i])
        comparisons += P.n
        inside = np.flatnonzero(d < table.ne_dist[i])
        r = tangent_ball_radii(X[i], X[table.ne_index[i]], X[inside])
        k = int(np.argmin(r))
        best = int(inside[k]) if np.isfinite(r[k]) else int(i)
        if not chosen[best]:
            chosen[best] = True
            buf.add(X[best])
            selected.append(best)
    return _subset(P, Algorithm.VSS, selected, {"iterations": 1, "comparisons": comparisons})


def class_centroids(P: TrainingSet) -> list[int]:
    """Per class (ascending id), the member nearest to the class mean."""
    out = []
    for c in np.unique(P.labels):
        members = np.flatnonzero(P.labels == c)
        mean = P.coords[members].mean(axis=0)
        out.append(int(members[np.argmin(distances_to(P.coords[members], mean))]))
    return out


def fcnn(P: TrainingSet, table: NeighborTable | None = None) -> Subset:
    """Fast Condensed Nearest Neighbor.

    Starts from the class centroids. Each round, every selected point whose
    Voronoi cell (within the current subset) holds enemies contributes the
    enemy nearest to it. Stops when no cell holds an enemy.
    """
    _prepare(P, table)
    X, y = P.coords, P.labels
    n = P.n
    nearest = np.full(n, -1, dtype=np.int64)
    nearest_d = np.full(n, math.inf)
    in_subset = np.zeros(n, dtype=bool)
    selected: list[int] = []
    trace: list[tuple[int, int, int]] = []
    comparisons = 0
    iterations = 0
    S = class_centroids(P)
    while S:
        iterations += 1
        for s in sorted(S):
            in_subset[s] = True
            selected.append(s)
            d = distances_to(X, X[s])
            comparisons += n
            better = (d < nearest_d) | ((d == nearest_d) & (s < nearest))
            nearest[better] = s
            nearest_d[better] = d[better]
        wrong = np.flatnonzero(y != y[nearest])
        if len(wrong) == 0:
            break
        # per owning point, the misclassified point nearest to it (then smallest index)
        order = np.lexsort((wrong, nearest_d[wrong], nearest[wrong]))
        owners = nearest[wrong][order]
        first = np.r_[True, owners[1:] != owners[:-1]]
        S = []
        for owner, rep in zip(owners[first], wrong[order][first]):
            trace.append((iterations, int(owner), int(rep)))
            if not in_subset[rep]:
                S.append(int(rep))
    stats = {"iterations": iterations, "comparisons": comparisons}
    return _subset(P, Algorithm.FCNN, selected, stats, tuple(trace))


def net(P: TrainingSet, table: NeighborTable | None = None) -> Subset:
    """Greedy gamma-net with gamma the smallest NE distance, scanning in index order."""
    table = _prepare(P, table)
    gamma = float(table.ne_dist.min())
    buf = _Buffer(P.n, P.dimension)
    selected = []
    comparisons = 0
    for i in range(P.n):
        comparisons += buf.size
        if buf.min_distance(P.coords[i]) >= gamma:
            buf.add(P.coords[i])
            selected.append(i)
    return _subset(P, Algorithm.NET, selected, {"iterations": 1, "comparisons": comparisons, "gamma": gamma})


CONDENSERS: dict[Algorithm, Callable[..., Subset]] = {
    Algorithm.MSS: mss,
    Algorithm.RSS: rss,
    Algorithm.VSS: vss,
    Algorithm.FCNN: fcnn,
    Algorithm.NET: net,
}


def condense(P: TrainingSet, algorithm, table: NeighborTable | None = None) -> Subset:
    return CONDENSERS[Algorithm(algorithm)](P, table)
