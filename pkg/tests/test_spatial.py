from __future__ import annotations

import numpy as np
import pytest

from cloiseg import RadiusIndex
from oracles import brute_radius_neighbors


def test_empty_index():
    index = RadiusIndex(np.empty((0, 3)))
    assert len(index) == 0
    assert index.pairs_within(1.0).shape == (0, 2)


def test_single_point_excludes_self():
    index = RadiusIndex(np.array([[1.0, 2.0, 3.0]]))
    assert index.radius_query(0, 10.0).size == 0


def test_two_points_three_cm_apart():
    index = RadiusIndex(np.array([[0, 0, 0], [0.03, 0, 0]]))
    assert index.radius_query(0, 0.04).tolist() == [1]
    assert index.radius_query(1, 0.04).tolist() == [0]


def test_two_points_five_cm_apart():
    index = RadiusIndex(np.array([[0, 0, 0], [0.05, 0, 0]]))
    assert index.radius_query(0, 0.04).size == 0
    assert index.radius_query(1, 0.04).size == 0


def test_boundary_distance_is_included():
    index = RadiusIndex(np.array([[0, 0, 0], [0.04, 0, 0]]))
    assert index.radius_query(0, 0.04).tolist() == [1]
    assert index.pairs_within(0.04).shape == (1, 2)


def test_argument_errors():
    index = RadiusIndex(np.array([[0, 0, 0]]))
    with pytest.raises(ValueError):
        index.radius_query(1, 0.1)
    with pytest.raises(ValueError):
        index.radius_query(-1, 0.1)
    with pytest.raises(ValueError):
        index.radius_query(0, 0.0)
    with pytest.raises(ValueError):
        RadiusIndex(np.array([[0, 0, np.inf]]))


def test_queries_match_brute_force_on_random_probes(rng):
    positions = rng.random((1000, 3))
    index = RadiusIndex(positions)
    for _ in range(50):
        i = int(rng.integers(1000))
        r = float(rng.uniform(0.01, 0.3))
        got = index.radius_query(i, r)
        expect = brute_radius_neighbors(positions, i, r)
        assert np.array_equal(got, np.sort(expect))


def test_query_results_sorted(rng):
    positions = rng.random((300, 3))
    index = RadiusIndex(positions)
    out = index.radius_query(7, 0.5)
    assert np.array_equal(out, np.sort(out))


def test_symmetry(rng):
    positions = rng.random((400, 3))
    index = RadiusIndex(positions)
    for _ in range(30):
        i = int(rng.integers(400))
        r = float(rng.uniform(0.02, 0.2))
        for j in index.radius_query(i, r):
            assert i in index.radius_query(int(j), r)


def test_pairs_within_matches_brute_force(rng):
    positions = rng.random((250, 3))
    index = RadiusIndex(positions)
    r = 0.15
    got = {tuple(p) for p in index.pairs_within(r)}
    expect = set()
    for i in range(250):
        for j in brute_radius_neighbors(positions, i, r):
            if i < j:
                expect.add((i, int(j)))
    assert got == expect
