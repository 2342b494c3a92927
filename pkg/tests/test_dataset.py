import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nncondense.dataset import (
    InvalidInputError,
    ParseError,
    TrainingSet,
    banana_path,
    distance,
    gen_circle,
    gen_mss_adversarial,
    gen_sphere_lowerbound,
    load_banana,
    load_csv,
    save_csv,
)
from nncondense.neighbors import build_neighbor_table
from nncondense.verify import count_ne_points, min_consistent_subset_bruteforce

# rounded so coordinate differences never underflow when squared
finite = st.floats(-1e6, 1e6, allow_nan=False).map(lambda x: round(x, 6))


def test_distance_examples():
    assert distance([0, 0], [0, 0]) == 0
    assert distance([0, 0], [3, 4]) == 5
    P = gen_mss_adversarial(0.25, 1)
    assert distance(P.point(0), P.point(2)) == pytest.approx(0.0625, abs=1e-15)


def test_distance_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        distance([0, 0], [0, 0, 0])


@given(st.lists(st.tuples(finite, finite, finite), min_size=3, max_size=3))
def test_distance_is_a_metric(pts):
    a, b, c = (np.array(p) for p in pts)
    assert distance(a, b) == distance(b, a)
    assert distance(a, a) == 0
    assert (distance(a, b) == 0) == bool(np.all(a == b))
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9 * (1 + distance(a, c))


def test_load_two_rows():
    P = load_csv(io.BytesIO(b"0,0,red\n1,0,blue\n"))
    assert (P.n, P.dimension, P.num_classes) == (2, 2, 2)
    assert P.class_names == ("red", "blue")
    assert P.labels.tolist() == [0, 1]


def test_labels_interned_in_first_appearance_order():
    text = b"0,b\n1,a\n2,b\n3,c\n"
    P = load_csv(io.BytesIO(text))
    assert P.class_names == ("b", "a", "c")
    assert P.labels.tolist() == [0, 1, 0, 2]
    assert load_csv(io.BytesIO(text)).labels.tolist() == P.labels.tolist()


def test_non_numeric_coordinate_reports_row():
    with pytest.raises(ParseError) as err:
        load_csv(io.BytesIO(b"1,x,red\n2,3,blue\n"))
    assert err.value.row == 1


def test_header_is_detected_and_rows_keep_file_numbering():
    P = load_csv(io.StringIO("x,y,class\n0,0,a\n1,1,b\n"))
    assert P.n == 2
    with pytest.raises(ParseError) as err:
        load_csv(io.StringIO("x,y,class\n0,0,a\n1,oops,b\n"))
    assert err.value.row == 3


@pytest.mark.parametrize(
    "text",
    ["0,0,a\n1,b\n", "0,0,a\n", "x,y,l\n0,0,a\n", "0,nan,a\n1,1,b\n"],
    ids=["ragged", "one-row", "header-plus-one", "nan"],
)
def test_malformed_csv(text):
    with pytest.raises(ParseError):
        load_csv(io.StringIO(text))


def test_cross_label_duplicates_rejected_same_label_flagged():
    with pytest.raises(InvalidInputError):
        TrainingSet([[0, 0], [0, 0]], [0, 1], ("a", "b"))
    P = TrainingSet([[0, 0], [1, 1], [0, 0]], [0, 1, 0], ("a", "b"))
    assert P.duplicates == ((0, 2),)


def test_banana_file():
    with open(banana_path()) as fh:
        assert sum(1 for _ in fh) == 5301  # header + 5300 rows
    with pytest.raises(InvalidInputError, match="different labels"):
        load_csv(banana_path())
    P = load_banana()
    assert (P.n, P.dimension, P.num_classes) == (5298, 2, 2)
    raw = np.loadtxt(banana_path(), delimiter=",", skiprows=1)
    assert len(raw) == 5300


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 40), st.integers(1, 4))
def test_csv_round_trip(seed, n, d):
    rng = np.random.default_rng(seed)
    coords = rng.standard_normal((n, d)) * 10.0 ** rng.integers(-5, 5)
    P = TrainingSet.from_labels(coords, rng.choice(["red", "blue", "green"], n))
    buf = io.StringIO()
    save_csv(P, buf)
    Q = load_csv(io.StringIO(buf.getvalue()))
    assert Q.same_as(P)
    assert Q.content_hash() == P.content_hash()


def test_gen_circle():
    P = gen_circle(10_000, 42)
    Q = gen_circle(10_000, 42)
    assert P.coords.tobytes() == Q.coords.tobytes()
    assert P.labels.tobytes() == Q.labels.tobytes()
    counts = np.bincount(P.labels, minlength=2)
    assert counts.min() > 0
    # Monte-Carlo estimate of the disk area
    assert abs(counts[0] / P.n - math.pi * 0.25**2) <= 0.02
    with pytest.raises(InvalidInputError):
        gen_circle(1, 0)


def test_gen_mss_adversarial_layout():
    P = gen_mss_adversarial(0.5, 1)
    assert P.n == 8
    assert P.labels.tolist() == [0, 0] + [1] * 6
    assert P.coords[:2, 0].tolist() == [0.0, 1.0]
    assert np.allclose(P.coords[2:, 0], 0.125 * np.arange(1, 7))
    P3 = gen_mss_adversarial(0.5, 3)
    assert P3.dimension == 3 and np.all(P3.coords[:, 1:] == 0)
    for bad in (0, 1, -0.5, 1.5):
        with pytest.raises(InvalidInputError):
            gen_mss_adversarial(bad, 1)


@given(st.floats(0.01, 0.9), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_gen_mss_adversarial_has_four_ne_points(eps, d):
    P = gen_mss_adversarial(eps, d)
    assert count_ne_points(build_neighbor_table(P)) == 4


def test_gen_sphere_lowerbound():
    P = gen_sphere_lowerbound(2, 8, 2, 10)
    assert P.n == 9 and P.labels.tolist() == [0] + [1] * 8
    assert np.allclose(np.linalg.norm(P.coords[1:] - P.coords[0], axis=1), 1.0)
    Q = gen_sphere_lowerbound(4, 8, 2, 10)
    assert Q.n == 18
    assert np.allclose(Q.coords[9], [10, 0])
    R = gen_sphere_lowerbound(4, 10, 4, 6, seed=3)
    assert np.allclose(np.linalg.norm(R.coords[1:11] - R.coords[0], axis=1), 1.0)
    assert R.coords.tobytes() == gen_sphere_lowerbound(4, 10, 4, 6, seed=3).coords.tobytes()


@pytest.mark.parametrize(
    "args", [(3, 8, 2, 10), (0, 8, 2, 10), (2, 2, 2, 10), (2, 8, 2, 4)], ids=["odd", "zero", "few", "close"]
)
def test_gen_sphere_lowerbound_rejects(args):
    with pytest.raises(InvalidInputError):
        gen_sphere_lowerbound(*args)


def test_sphere_minimum_consistent_subset():
    # the brute force is the oracle: 2^9 subsets
    best = min_consistent_subset_bruteforce(gen_sphere_lowerbound(2, 8, 2, 10))
    assert len(best) == 4
