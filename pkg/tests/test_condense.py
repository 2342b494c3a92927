import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import grid_set, oracle_mss, random_set
from nncondense.condense import (
    CONDENSERS,
    Algorithm,
    Subset,
    class_centroids,
    condense,
    fcnn,
    mss,
    net,
    rss,
    scan_order,
    tangent_ball_radii,
    vss,
)
from nncondense.dataset import InvalidInputError, TrainingSet, gen_circle, gen_mss_adversarial
from nncondense.neighbors import build_neighbor_table
from nncondense.verify import border_points_2d, is_consistent, is_selective

SELECTIVE = (Algorithm.MSS, Algorithm.RSS, Algorithm.VSS)


@pytest.mark.parametrize("algo", list(CONDENSERS))
def test_two_points_keep_both(algo, two_points):
    S = condense(two_points, algo)
    assert sorted(S.indices) == [0, 1]
    assert S.source_size == 2


def test_fcnn_two_points_single_iteration(two_points):
    assert fcnn(two_points).stats["iterations"] == 1


def test_single_class_refused():
    P = TrainingSet([[0, 0], [1, 0], [2, 0]], [0, 0, 0], ("red",))
    for algo in CONDENSERS:
        with pytest.raises(InvalidInputError):
            condense(P, algo)


def test_rss_line_trace():
    P = TrainingSet([[0.0], [1.0], [1.4]], [0, 1, 1], ("red", "blue"))
    assert rss(P).indices == (0, 1)


def test_scan_order_ties_by_index():
    P = TrainingSet([[0.0], [1.0], [3.0], [5.0]], [0, 1, 0, 1], ("a", "b"))
    # NE distances 1, 1, 2, 2
    assert scan_order(build_neighbor_table(P)).tolist() == [0, 1, 2, 3]


def test_mss_adversarial_hand_trace():
    # r1, r2, b1, b3, b5, b7, b9, b30 for eps = 0.1 (indices shift blues by +1)
    P = gen_mss_adversarial(0.1, 1)
    S = mss(P)
    assert sorted(S.indices) == [0, 1, 2, 4, 6, 8, 10, 31]
    assert len(S) >= 5
    assert set(S.indices) == oracle_mss(P)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_rss_vss_constant_on_adversarial(d):
    P = gen_mss_adversarial(0.1, d)
    assert len(rss(P)) <= 4
    assert len(vss(P)) <= 4


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 40), st.sampled_from([1, 2, 3]), st.integers(2, 3), st.booleans())
def test_mss_matches_ball_minimum_oracle(seed, n, d, classes, on_grid):
    if on_grid and 6**d >= n:
        P = grid_set(seed, n, d=d, classes=classes)
    else:
        P = random_set(seed, n, d, classes)
    assert set(mss(P).indices) == oracle_mss(P)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 80), st.sampled_from([1, 2, 3, 5]), st.integers(2, 4))
def test_guarantees_on_random_sets(seed, n, d, classes):
    P = random_set(seed, n, d, classes)
    T = build_neighbor_table(P)
    for algo in CONDENSERS:
        S = condense(P, algo, T)
        assert len(S) > 0 and len(set(S.indices)) == len(S)
        assert is_consistent(P, S).holds
        if algo in SELECTIVE:
            assert is_selective(P, S, T).holds


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(4, 36), st.integers(2, 3))
def test_guarantees_with_ties(seed, n, classes):
    P = grid_set(seed, n, side=6, classes=classes)
    T = build_neighbor_table(P)
    for algo in CONDENSERS:
        S = condense(P, algo, T)
        assert is_consistent(P, S).holds
        if algo in SELECTIVE:
            assert is_selective(P, S, T).holds


@pytest.mark.parametrize("seed", range(5))
def test_rss_order_independent(seed):
    P = random_set(seed, 120, 2, 3)
    chosen = {tuple(P.coords[i]) for i in rss(P).indices}
    perm = np.random.default_rng(seed).permutation(P.n)
    Q = P.take(perm)
    assert {tuple(Q.coords[i]) for i in rss(Q).indices} == chosen


@pytest.mark.parametrize("algo", list(CONDENSERS))
def test_deterministic(algo):
    P = random_set(3, 150, 2, 2)
    assert condense(P, algo).to_dict() == condense(P, algo).to_dict()


def test_tangent_ball_radii():
    p, ne = np.array([2.0, 0.0]), np.array([0.0, 0.0])
    cands = np.array([[2.0, 0.0], [1.0, 1.0], [-0.5, 1.0], [0.0, 1.0]])
    r = tangent_ball_radii(p, ne, cands)
    assert r[0] == 1.0  # the point itself: half its NE distance
    assert r[1] == pytest.approx(1.0)  # (1,1): |v|^2 / (2 u.v) = 2 / 2
    assert np.isinf(r[2]) and np.isinf(r[3])
    # ball of radius r centered at ne + r*u passes through the candidate
    center = ne + r[1] * np.array([1.0, 0.0])
    assert np.linalg.norm(cands[1] - center) == pytest.approx(r[1])


@pytest.mark.parametrize("seed", range(6))
def test_vss_picks_border_points(seed):
    P = random_set(seed, 30, 2, 2 + seed % 2)
    border, k = border_points_2d(P)
    S = vss(P)
    assert set(S.indices) <= border
    assert len(S) <= k


def test_fcnn_centroids_are_nearest_to_mean():
    P = TrainingSet([[0, 0], [1, 0], [2, 0], [10, 0], [11, 0]], [0, 0, 0, 1, 1], ("a", "b"))
    assert class_centroids(P) == [1, 3]


def test_fcnn_trace_attributes_each_addition():
    P = random_set(11, 200, 2, 2)
    S = fcnn(P)
    centroids = class_centroids(P)
    traced = [rep for _, _, rep in S.trace]
    assert sorted(traced + centroids) == sorted(S.indices)
    assert S.stats["iterations"] == max(it for it, _, _ in S.trace) + 1


def test_net_is_greedy_packing():
    P = gen_circle(2000, 5)
    S = net(P)
    gamma = S.stats["gamma"]
    X = P.coords[list(S.indices)]
    D = np.linalg.norm(X[:, None] - X[None], axis=-1) + np.eye(len(X)) * 1e9
    assert D.min() >= gamma
    assert len(S) > 0.5 * P.n


def test_subset_json_round_trip():
    P = random_set(2, 50)
    for algo in CONDENSERS:
        S = condense(P, algo)
        back = Subset.from_json(S.to_json())
        assert back == S
        data = json.loads(S.to_json())
        assert set(data) >= {"algorithm", "sourceSize", "indices", "stats"}
    rows = S.to_csv(P).strip().splitlines()
    assert rows[0] == "index,x0,x1,label"
    assert len(rows) == len(S) + 1


def test_subset_rejects_bad_indices():
    with pytest.raises(InvalidInputError):
        Subset(Algorithm.RSS, (0, 0), 3)
    with pytest.raises(InvalidInputError):
        Subset(Algorithm.RSS, (3,), 3)
