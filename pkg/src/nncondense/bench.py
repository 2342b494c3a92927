"""Scaling harness: wall time plus the deterministic comparison counters."""

from __future__ import annotations

import statistics
import time
from dataclasses import astuple, dataclass, fields
from typing import Callable, Sequence

import numpy as np

from .condense import Algorithm, condense
from .dataset import GENERATORS, InvalidInputError, TrainingSet
from .neighbors import build_neighbor_table


@dataclass(frozen=True)
class BenchRecord:
    algorithm: str
    n: int
    elapsed: float
    comparisons: int
    subsetSize: int


def _generator(generator) -> Callable[[int, int], TrainingSet]:
    if callable(generator):
        return generator
    try:
        gen = GENERATORS[generator]
    except KeyError:
        raise InvalidInputError(f"unknown generator {generator!r}") from None
    return lambda n, seed: gen(n, seed=seed)


def run_scaling(
    algorithm,
    generator="circle",
    sizes: Sequence[int] = (1000, 2000, 4000),
    seed: int = 0,
    repeats: int = 5,
) -> list[BenchRecord]:
    """Condense ``generator(n, seed)`` for each size; elapsed is the median of ``repeats`` runs.

    The neighbor table is built once per size and excluded from the timing.
    """
    if list(sizes) != sorted(sizes):
        raise InvalidInputError("sizes must be ascending")
    algorithm = Algorithm(algorithm)
    make = _generator(generator)
    records = []
    for n in sizes:
        P = make(n, seed)
        table = build_neighbor_table(P)
        times = []
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            S = condense(P, algorithm, table)
            times.append(time.perf_counter() - t0)
        records.append(
            BenchRecord(algorithm.value, n, statistics.median(times), int(S.stats["comparisons"]), len(S))
        )
    return records


def loglog_slope(records: Sequence[BenchRecord], attr: str = "comparisons") -> float:
    """Least-squares slope of log(attr) against log(n)."""
    n = np.log([r.n for r in records])
    v = np.log([max(getattr(r, attr), 1) for r in records])
    return float(np.polyfit(n, v, 1)[0])


def to_csv(records: Sequence[BenchRecord]) -> str:
    lines = [",".join(f.name for f in fields(BenchRecord))]
    lines += [",".join(str(v) for v in astuple(r)) for r in records]
    return "\n".join(lines) + "\n"
