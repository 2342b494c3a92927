"""Nearest-neighbor training-set condensation: MSS, RSS, VSS, FCNN and a greedy net baseline."""

from .condense import Algorithm, Subset, condense, fcnn, mss, net, rss, vss
from .dataset import (
    CsvOptions,
    InvalidInputError,
    LabeledPoint,
    ParseError,
    TrainingSet,
    UnsupportedDimensionError,
    distance,
    gen_circle,
    gen_mss_adversarial,
    gen_sphere_lowerbound,
    gen_uniform,
    load_banana,
    load_csv,
    save_csv,
)
from .neighbors import NeighborTable, build_neighbor_table, classify_nn, nearest_in_subset
from .verify import (
    VerificationReport,
    audit_fcnn_representatives,
    audit_ne_charging,
    border_points_2d,
    count_ne_points,
    is_consistent,
    is_selective,
    min_consistent_subset_bruteforce,
)

__all__ = [
    "Algorithm", "CsvOptions", "InvalidInputError", "LabeledPoint", "NeighborTable", "ParseError",
    "Subset", "TrainingSet", "UnsupportedDimensionError", "VerificationReport",
    "audit_fcnn_representatives", "audit_ne_charging", "border_points_2d", "build_neighbor_table",
    "classify_nn", "condense", "count_ne_points", "distance", "fcnn", "gen_circle",
    "gen_mss_adversarial", "gen_sphere_lowerbound", "gen_uniform", "is_consistent", "is_selective",
    "load_banana", "load_csv", "min_consistent_subset_bruteforce", "mss", "nearest_in_subset", "net",
    "rss", "save_csv", "vss",
]
