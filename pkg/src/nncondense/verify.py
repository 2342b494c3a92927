"""Executable checks: consistency, selectivity, border points, and the angular audits."""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .condense import Algorithm, Subset
from .dataset import InvalidInputError, TrainingSet, UnsupportedDimensionError, distances_to
from .neighbors import NeighborTable, build_neighbor_table, indices_of, nearest_in_subset_batch

ANGLE_TOL = 1e-9
EMPTY_DISK_TOL = 1e-9
MAX_BRUTEFORCE_N = 20


@dataclass
class VerificationReport:
    property: str
    holds: bool
    witness: dict | None = None
    metrics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.holds == (self.witness is not None):
            raise ValueError("a report carries a witness exactly when the property fails")

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {"property": self.property, "holds": self.holds, "witness": self.witness, "metrics": self.metrics}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _nonempty(R) -> np.ndarray:
    idx = indices_of(R)
    if len(idx) == 0:
        raise InvalidInputError("subset is empty")
    return idx


def is_consistent(P: TrainingSet, R) -> VerificationReport:
    """Every point of P is classified correctly by its nearest neighbor in R."""
    idx = _nonempty(R)
    nn_i, nn_d = nearest_in_subset_batch(P.coords, idx, P)
    bad = np.flatnonzero(P.labels[nn_i] != P.labels)
    metrics = {"misclassified": int(len(bad)), "subsetSize": int(len(idx))}
    if len(bad) == 0:
        return VerificationReport("consistent", True, metrics=metrics)
    p = int(bad[0])
    witness = {"point": p, "nearest": int(nn_i[p]), "distance": float(nn_d[p])}
    return VerificationReport("consistent", False, witness, metrics)


def is_selective(P: TrainingSet, R, table: NeighborTable | None = None) -> VerificationReport:
    """Every point of P has a member of R strictly closer than its nearest enemy."""
    idx = _nonempty(R)
    table = table if table is not None else build_neighbor_table(P)
    nn_i, nn_d = nearest_in_subset_batch(P.coords, idx, P)
    bad = np.flatnonzero(~(nn_d < table.ne_dist))
    metrics = {"violations": int(len(bad)), "subsetSize": int(len(idx))}
    if len(bad) == 0:
        return VerificationReport("selective", True, metrics=metrics)
    p = int(bad[0])
    witness = {
        "point": p,
        "nearest": int(nn_i[p]),
        "distance": float(nn_d[p]),
        "neDistance": float(table.ne_dist[p]),
    }
    return VerificationReport("selective", False, witness, metrics)


def count_ne_points(table: NeighborTable) -> int:
    """Number of distinct points serving as someone's nearest enemy."""
    return int(len(np.unique(table.ne_index)))


# ---------------------------------------------------------------- border points


def _circumcenters(p: np.ndarray, q: np.ndarray, R: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Circumcenters of triangles (p, q, r) for each row r; collinear rows give nan."""
    b = q - p
    c = R - p
    den = 2.0 * (b[0] * c[:, 1] - b[1] * c[:, 0])
    bb = b @ b
    cc = (c * c).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ux = (c[:, 1] * bb - b[1] * cc) / den
        uy = (b[0] * cc - c[:, 0] * bb) / den
    centers = p + np.column_stack([ux, uy])
    centers[den == 0] = np.nan
    return centers, np.sqrt(ux * ux + uy * uy)


def _has_empty_disk(X: np.ndarray, i: int, j: int) -> bool:
    p, q = X[i], X[j]
    others = np.delete(np.arange(len(X)), [i, j])
    centers = [(p + q) / 2]
    radii = [float(np.sqrt(((q - p) ** 2).sum())) / 2]
    if len(others):
        cc, rr = _circumcenters(p, q, X[others])
        ok = np.isfinite(rr)
        centers.extend(cc[ok])
        radii.extend(rr[ok])
    if not len(others):
        return True
    C = np.asarray(centers)
    r = np.asarray(radii)
    D = distances_to(X[others][None, :, :], C[:, None, :])
    empty = np.all(D >= r[:, None] * (1 - EMPTY_DISK_TOL), axis=1)
    return bool(empty.any())


def border_points_2d(P: TrainingSet) -> tuple[frozenset[int], int]:
    """Points joined to an enemy by a Delaunay edge, found by brute force.

    A pair is a Delaunay edge iff some disk with both on its boundary holds no
    other point in its interior; the candidate disks are the diametral one and
    the circumdisks through each third point. Points on a disk's boundary do
    not break emptiness.
    """
    if P.dimension != 2:
        raise UnsupportedDimensionError("border points are only computed in the plane")
    X, y = P.coords, P.labels
    border: set[int] = set()
    for i in range(P.n):
        for j in range(i + 1, P.n):
            if y[i] == y[j] or (i in border and j in border):
                continue
            if _has_empty_disk(X, i, j):
                border.update((i, j))
    return frozenset(border), len(border)


# ---------------------------------------------------------------- angular audits


def angle_at(apex: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    u, v = a - apex, b - apex
    cos = (u @ v) / (math.sqrt(u @ u) * math.sqrt(v @ v))
    return math.acos(min(1.0, max(-1.0, cos)))


def _angular_audit(name: str, P: TrainingSet, groups: dict[int, list[int]], extra: dict) -> VerificationReport:
    min_angle = math.inf
    witness = None
    for apex in sorted(groups):
        members = groups[apex]
        for a, b in itertools.combinations(members, 2):
            ang = angle_at(P.coords[apex], P.coords[a], P.coords[b])
            if ang < min_angle:
                min_angle = ang
            if witness is None and ang < math.pi / 3 - ANGLE_TOL:
                witness = {"apex": apex, "pair": [a, b], "angle": ang}
    sizes = {apex: len(m) for apex, m in groups.items()}
    max_group = max(sizes.values(), default=0)
    metrics = {
        "minPairwiseAngle": min_angle if math.isfinite(min_angle) else None,
        "groups": len(groups),
        "maxGroupSize": max_group,
        "groupSizes": {str(k): v for k, v in sorted(sizes.items())},
        **extra,
    }
    if witness is None and P.dimension == 2 and max_group > 6:
        apex = max(sizes, key=lambda k: (sizes[k], -k))
        witness = {"apex": apex, "groupSize": max_group, "bound": 6}
    return VerificationReport(name, witness is None, witness, metrics)


def audit_ne_charging(P: TrainingSet, R, table: NeighborTable | None = None) -> VerificationReport:
    """Group R by nearest enemy; members of a group are pairwise >= pi/3 apart as seen from it."""
    table = table if table is not None else build_neighbor_table(P)
    groups: dict[int, list[int]] = defaultdict(list)
    for i in getattr(R, "indices", R):
        groups[int(table.ne_index[i])].append(int(i))
    kappa = count_ne_points(table)
    extra = {"kappa": kappa, "subsetSize": len(getattr(R, "indices", R))}
    if P.dimension == 2:
        extra["sixKappaBound"] = 6 * kappa
    report = _angular_audit("ne-charging", P, groups, extra)
    return report


def audit_fcnn_representatives(P: TrainingSet, R: Subset) -> VerificationReport:
    """Representatives added on behalf of the same point are pairwise >= pi/3 apart around it."""
    trace = getattr(R, "trace", None)
    if trace is None:
        raise InvalidInputError("subset carries no FCNN trace")
    groups: dict[int, list[int]] = defaultdict(list)
    for _, owner, rep in trace:
        groups[owner].append(rep)
    return _angular_audit("fcnn-representatives", P, groups, {"representatives": len(trace)})


# ---------------------------------------------------------------- exhaustive optimum


def min_consistent_subset_bruteforce(P: TrainingSet) -> Subset:
    """Smallest consistent subset by exhaustive search (size, then lexicographic order)."""
    n = P.n
    if n > MAX_BRUTEFORCE_N:
        raise InvalidInputError(f"exhaustive search refused for n={n} > {MAX_BRUTEFORCE_N}")
    if n == 0:
        raise InvalidInputError("empty training set")
    D = distances_to(P.coords[:, None, :], P.coords[None, :, :])
    y = P.labels
    searched = 0
    for size in range(P.classes_present, n + 1):
        combos = itertools.combinations(range(n), size)
        while True:
            block = np.array(list(itertools.islice(combos, 4096)), dtype=np.int64)
            if len(block) == 0:
                break
            searched += len(block)
            sub = D[:, block]  # (n, C, size)
            nearest = np.take_along_axis(block[None, :, :], np.argmin(sub, axis=2)[:, :, None], axis=2)[:, :, 0]
            ok = np.all(y[nearest] == y[:, None], axis=0)
            if ok.any():
                best = block[int(np.argmax(ok))]
                stats = {"iterations": 0, "comparisons": 0, "subsetsSearched": searched}
                return Subset(Algorithm.EXACT, tuple(best.tolist()), n, stats, P.content_hash())
    raise AssertionError("the full set is always consistent")
