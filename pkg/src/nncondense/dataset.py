"""Labeled point sets, the Euclidean kernel, CSV I/O and dataset generators."""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class InvalidInputError(ValueError):
    """Raised when arguments or data violate an operation's preconditions."""


class ParseError(InvalidInputError):
    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class UnsupportedDimensionError(InvalidInputError):
    pass


def distances_to(X: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Euclidean distance from every row of ``X`` to ``q``.

    Every distance in the package goes through this kernel so that the
    scalar and vectorised paths agree bit for bit.
    """
    diff = X - q
    return np.sqrt((diff * diff).sum(axis=-1))


class LabeledPoint(NamedTuple):
    index: int
    coords: np.ndarray
    label: int


def _coords_of(p) -> np.ndarray:
    if isinstance(p, LabeledPoint):
        return p.coords
    return np.asarray(p, dtype=np.float64)


def distance(a, b) -> float:
    """l2 distance between two points (LabeledPoints or coordinate vectors)."""
    ca, cb = _coords_of(a), _coords_of(b)
    if ca.shape != cb.shape:
        raise InvalidInputError(
            f"dimension mismatch: {ca.shape[-1] if ca.ndim else 0} vs "
            f"{cb.shape[-1] if cb.ndim else 0}"
        )
    return float(distances_to(ca[None, :], cb)[0])


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Immutable labeled point set.

    ``labels`` holds small integer ids into ``class_names``. Points sharing
    coordinates with a different label are rejected; same-label duplicates
    are kept and listed in ``duplicates``.
    """

    coords: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    duplicates: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64, copy=True)
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        if coords.ndim != 2 or coords.shape[1] < 1:
            raise InvalidInputError("coords must be an (n, d) array with d >= 1")
        if labels.shape != (coords.shape[0],):
            raise InvalidInputError("labels must have one entry per point")
        if not np.all(np.isfinite(coords)):
            bad = int(np.flatnonzero(~np.isfinite(coords).all(axis=1))[0])
            raise InvalidInputError(f"point {bad} has a non-finite coordinate")
        if len(labels) and (labels.min() < 0 or labels.max() >= len(self.class_names)):
            raise InvalidInputError("label id outside 0..numClasses-1")
        coords.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "duplicates", _duplicate_groups(coords, labels))

    @classmethod
    def from_labels(cls, coords, labels: Iterable) -> "TrainingSet":
        """Build a set from raw labels, interning them in first-appearance order."""
        names: dict[str, int] = {}
        ids = [names.setdefault(str(lab), len(names)) for lab in labels]
        return cls(np.asarray(coords, dtype=np.float64).reshape(len(ids), -1), ids, tuple(names))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    @property
    def classes_present(self) -> int:
        return len(np.unique(self.labels))

    def __len__(self) -> int:
        return self.n

    def point(self, i: int) -> LabeledPoint:
        return LabeledPoint(int(i), self.coords[i], int(self.labels[i]))

    def __iter__(self):
        return (self.point(i) for i in range(self.n))

    def label_name(self, label: int) -> str:
        return self.class_names[label]

    def take(self, indices: Sequence[int]) -> "TrainingSet":
        """Rows ``indices`` as a new set; class ids are re-interned."""
        idx = np.asarray(indices, dtype=np.int64)
        return TrainingSet.from_labels(
            self.coords[idx], [self.class_names[l] for l in self.labels[idx]]
        )

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.asarray(self.coords.shape, dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(self.coords).tobytes())
        h.update(self.labels.tobytes())
        h.update("\x1f".join(self.class_names).encode())
        return h.hexdigest()

    def same_as(self, other: "TrainingSet") -> bool:
        return (
            self.coords.shape == other.coords.shape
            and np.array_equal(self.coords, other.coords)
            and np.array_equal(self.labels, other.labels)
            and self.class_names == other.class_names
        )

    def require_condensable(self) -> None:
        if self.classes_present < 2:
            raise InvalidInputError(
                "condensation needs at least two classes "
                f"(found {self.classes_present})"
            )


def _duplicate_groups(coords: np.ndarray, labels: np.ndarray) -> tuple[tuple[int, ...], ...]:
    if len(coords) < 2:
        return ()
    order = np.lexsort(coords.T[::-1])
    s = coords[order]
    same = np.all(s[1:] == s[:-1], axis=1)
    if not same.any():
        return ()
    groups = []
    run = [int(order[0])]
    for k in range(1, len(order)):
        if same[k - 1]:
            run.append(int(order[k]))
        else:
            if len(run) > 1:
                groups.append(run)
            run = [int(order[k])]
    if len(run) > 1:
        groups.append(run)
    out = []
    for g in groups:
        g = sorted(g)
        if len(set(labels[g].tolist())) > 1:
            raise InvalidInputError(
                f"points {g} share coordinates but carry different labels"
            )
        out.append(tuple(g))
    logger.info("%d groups of same-label duplicate points", len(out))
    return tuple(sorted(out))


# ---------------------------------------------------------------- CSV


@dataclass(frozen=True)
class CsvOptions:
    delimiter: str = ","
    header: bool | None = None  # None: auto-detect
    drop_conflicts: bool = False  # drop every row whose coordinates carry several labels


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def _read_text(source) -> str:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return data


def load_csv(source, options: CsvOptions | None = None) -> TrainingSet:
    """Parse ``d`` coordinate columns followed by a label column.

    ``source`` may be a path or a binary/text stream. Row numbers in errors are
    1-based line numbers of the input.
    """
    options = options or CsvOptions()
    reader = csv.reader(io.StringIO(_read_text(source)), delimiter=options.delimiter)
    rows = [(lineno, [c.strip() for c in r]) for lineno, r in enumerate(reader, 1) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("no data rows")

    header = options.header
    if header is None:
        first = rows[0][1]
        header = len(first) >= 2 and not any(_is_number(c) for c in first[:-1])
    if header:
        rows = rows[1:]
    if len(rows) < 2:
        raise ParseError(f"need at least 2 data rows, got {len(rows)}", rows[0][0] if rows else None)

    width = len(rows[0][1])
    if width < 2:
        raise ParseError("need at least one coordinate column and a label column", rows[0][0])
    coords = np.empty((len(rows), width - 1))
    labels = []
    for k, (lineno, fields) in enumerate(rows):
        if len(fields) != width:
            raise ParseError(f"expected {width} fields, found {len(fields)}", lineno)
        try:
            coords[k] = [float(c) for c in fields[:-1]]
        except ValueError as exc:
            raise ParseError(f"non-numeric coordinate ({exc})", lineno) from None
        if not np.all(np.isfinite(coords[k])):
            raise ParseError("non-finite coordinate", lineno)
        labels.append(fields[-1])

    if options.drop_conflicts:
        keep = _conflict_free_rows(coords, labels)
        if len(keep) < len(labels):
            logger.warning(
                "dropping %d rows whose coordinates appear with several labels",
                len(labels) - len(keep),
            )
            coords = coords[keep]
            labels = [labels[i] for i in keep]
    return TrainingSet.from_labels(coords, labels)


def _conflict_free_rows(coords: np.ndarray, labels: list[str]) -> list[int]:
    seen: dict[bytes, set[str]] = {}
    for row, lab in zip(coords, labels):
        seen.setdefault(row.tobytes(), set()).add(lab)
    return [i for i, row in enumerate(coords) if len(seen[row.tobytes()]) == 1]


def save_csv(P: TrainingSet, dest: str | os.PathLike | IO[str]) -> None:
    """Write ``P`` with a header row; floats use ``repr`` so they round-trip."""
    names = [f"x{j}" for j in range(P.dimension)] + ["label"]
    lines = [",".join(names)]
    for row, lab in zip(P.coords, P.labels):
        lines.append(",".join([repr(float(v)) for v in row] + [P.class_names[lab]]))
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)


def banana_path() -> str:
    return os.path.join(os.path.dirname(__file__), "data", "banana.csv")


def load_banana(drop_conflicts: bool = True) -> TrainingSet:
    """The bundled 5300-point Banana benchmark.

    The raw file has one coordinate pair listed under both classes; by default
    both rows are dropped, leaving 5298 points.
    """
    return load_csv(banana_path(), CsvOptions(drop_conflicts=drop_conflicts))


# ---------------------------------------------------------------- generators

CIRCLE_CENTER = (0.5, 0.5)
CIRCLE_RADIUS = 0.25


def gen_circle(n: int, seed: int = 0) -> TrainingSet:
    """Uniform points in the unit square; red inside the central disk, blue outside."""
    if n < 2:
        raise InvalidInputError("gen_circle needs n >= 2")
    rng = np.random.default_rng(seed)
    xy = rng.random((n, 2))
    inside = distances_to(xy, np.array(CIRCLE_CENTER)) < CIRCLE_RADIUS
    return TrainingSet(xy, np.where(inside, 0, 1), ("red", "blue"))


def gen_mss_adversarial(eps: float, d: int = 1) -> TrainingSet:
    """Two red points a unit apart with ``floor(3/eps)`` blue points packed eps/4 apart from the first.

    Points are ordered r1, r2, b1, b2, ... and padded with zeros to ``d`` dimensions.
    """
    if not 0 < eps < 1:
        raise InvalidInputError("eps must lie in (0, 1)")
    if d < 1:
        raise InvalidInputError("d must be >= 1")
    m = math.floor(3 / eps + 1e-9)
    coords = np.zeros((m + 2, d))
    coords[1, 0] = 1.0
    coords[2:, 0] = np.arange(1, m + 1) * eps / 4
    return TrainingSet(coords, [0, 0] + [1] * m, ("red", "blue"))


def gen_sphere_lowerbound(
    kappa: int, m: int, d: int = 2, separation: float = 10.0, seed: int = 0
) -> TrainingSet:
    """``kappa/2`` copies of a red center ringed by ``m`` blue points on its unit sphere.

    In the plane the blue points sit at equally spaced angles; in higher
    dimensions they are drawn uniformly from the sphere with ``seed``.
    """
    if kappa < 2 or kappa % 2:
        raise InvalidInputError("kappa must be an even integer >= 2")
    if d < 1 or m < d + 1:
        raise InvalidInputError("need d >= 1 and m >= d + 1")
    if d == 1 and m != 2:
        raise InvalidInputError("the 0-sphere has only two points; use m = 2 for d = 1")
    if not separation > 4:
        raise InvalidInputError("separation must exceed 4")
    if d == 1:
        ring = np.array([[-1.0], [1.0]])
    elif d == 2:
        theta = 2 * np.pi * np.arange(m) / m
        ring = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((m, d))
        ring = g / np.linalg.norm(g, axis=1, keepdims=True)

    blocks, labels = [], []
    for a in range(kappa // 2):
        center = np.zeros(d)
        center[0] = a * separation
        blocks.append(center[None, :])
        blocks.append(center + ring)
        labels += [0] + [1] * m
    return TrainingSet(np.vstack(blocks), labels, ("red", "blue"))


def gen_uniform(n: int, d: int = 2, classes: int = 2, seed: int = 0) -> TrainingSet:
    """Uniform points in the unit cube with uniformly random labels."""
    if n < 2 or d < 1 or classes < 1:
        raise InvalidInputError("need n >= 2, d >= 1, classes >= 1")
    rng = np.random.default_rng(seed)
    coords = rng.random((n, d))
    labels = rng.integers(0, classes, n)
    return TrainingSet.from_labels(coords, [f"c{l}" for l in labels])


GENERATORS = {
    "circle": gen_circle,
    "mss-adversarial": gen_mss_adversarial,
    "sphere": gen_sphere_lowerbound,
    "uniform": gen_uniform,
}
