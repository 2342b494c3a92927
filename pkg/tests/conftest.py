import itertools
import math

import numpy as np
import pytest

from nncondense.dataset import TrainingSet


def random_set(seed: int, n: int, d: int = 2, classes: int = 2) -> TrainingSet:
    """Continuous uniform coordinates; the first ``classes`` points cover every label."""
    rng = np.random.default_rng(seed)
    coords = rng.random((n, d))
    labels = rng.integers(0, classes, n)
    labels[: min(classes, n)] = np.arange(min(classes, n))
    return TrainingSet(coords, labels, tuple(f"c{k}" for k in range(classes)))


def grid_set(seed: int, n: int, side: int = 6, d: int = 2, classes: int = 2) -> TrainingSet:
    """Distinct integer grid points: many exactly tied distances."""
    rng = np.random.default_rng(seed)
    cells = list(itertools.product(range(side), repeat=d))
    pick = rng.choice(len(cells), size=min(n, len(cells)), replace=False)
    coords = np.array([cells[k] for k in pick], dtype=float)
    labels = rng.integers(0, classes, len(coords))
    k = min(classes, len(coords))
    labels[:k] = np.arange(k)
    return TrainingSet(coords, labels, tuple(f"c{k}" for k in range(classes)))


# ---- pure-Python oracles, independent of the package's vectorised kernels


def oracle_ne(P: TrainingSet):
    """Nearest enemy of every point by a double loop over math.dist."""
    pts = P.coords.tolist()
    labs = P.labels.tolist()
    out = []
    for i, p in enumerate(pts):
        best = (math.inf, -1)
        for j, q in enumerate(pts):
            if labs[j] != labs[i]:
                best = min(best, (math.dist(p, q), j))
        out.append(best)
    return out


def oracle_mss(P: TrainingSet) -> set[int]:
    """For every point, the lowest-ranked point strictly inside its NE ball.

    Rank is (NE distance, index); the union of these picks is the MSS output.
    """
    ne = oracle_ne(P)
    pts = P.coords.tolist()
    picks = set()
    for j, p in enumerate(pts):
        inside = [i for i, q in enumerate(pts) if math.dist(p, q) < ne[j][0]]
        picks.add(min(inside, key=lambda i: (ne[i][0], i)))
    return picks


def oracle_border_2d(P: TrainingSet, tol: float = 1e-9) -> set[int]:
    """Border points via empty circumcircles of triples plus empty diametral circles.

    Enumerates triangles first, then pairs, the reverse of the package routine.
    """
    pts = P.coords.tolist()
    labs = P.labels.tolist()
    n = len(pts)

    def empty(center, radius, skip):
        return all(
            math.dist(center, pts[k]) >= radius * (1 - tol) for k in range(n) if k not in skip
        )

    border = set()
    for a, b, c in itertools.combinations(range(n), 3):
        (ax, ay), (bx, by), (cx, cy) = pts[a], pts[b], pts[c]
        den = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        if den == 0:
            continue
        ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / den
        uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / den
        r = math.dist((ux, uy), pts[a])
        if empty((ux, uy), r, {a, b, c}):
            for i, j in ((a, b), (b, c), (a, c)):
                if labs[i] != labs[j]:
                    border.update((i, j))
    for i, j in itertools.combinations(range(n), 2):
        if labs[i] != labs[j] and not {i, j} <= border:
            mid = ((pts[i][0] + pts[j][0]) / 2, (pts[i][1] + pts[j][1]) / 2)
            if empty(mid, math.dist(pts[i], pts[j]) / 2, {i, j}):
                border.update((i, j))
    return border


@pytest.fixture
def two_points() -> TrainingSet:
    return TrainingSet([[0.0, 0.0], [1.0, 0.0]], [0, 1], ("red", "blue"))
