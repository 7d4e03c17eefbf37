import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import brute_force_edt
from qinterp.edt import INF, NONE, distance, feature_transform, voronoi_pass


def check_against_oracle(mask, ft):
    expected, _ = brute_force_edt(mask)
    if not mask.any():
        assert np.all(ft.dist_sq == INF)
        assert np.all(ft.nearest == NONE)
        return
    assert np.array_equal(ft.dist_sq, expected)
    flat = mask.reshape(-1)
    near = ft.nearest.reshape(-1)
    assert flat[near].all()
    coords = np.indices(mask.shape).reshape(mask.ndim, -1).T
    d = ((coords - coords[near]) ** 2).sum(axis=1)
    assert np.array_equal(d, ft.dist_sq.reshape(-1))
    own = np.flatnonzero(flat)
    assert np.array_equal(near[own], own)


def test_voronoi_pass_examples():
    d, f = voronoi_pass([INF, 0, INF, INF], [NONE, 7, NONE, NONE])
    assert d.tolist() == [1, 0, 1, 4]
    assert f.tolist() == [7, 7, 7, 7]
    d, f = voronoi_pass([INF] * 4, [NONE] * 4)
    assert np.all(d == INF) and np.all(f == NONE)
    d, f = voronoi_pass([0, 0, 0], [0, 1, 2])
    assert d.tolist() == [0, 0, 0] and f.tolist() == [0, 1, 2]


def test_voronoi_pass_accumulated_values():
    # sites carry distances from earlier axes; the envelope picks the best mix
    d, _ = voronoi_pass([4, INF, INF, INF, 0])
    assert d.tolist() == [4, 5, 4, 1, 0]


def test_feature_transform_examples():
    ft = feature_transform(np.ones((3, 4), bool))
    assert np.all(ft.dist_sq == 0)
    ft = feature_transform(np.zeros((3, 4), bool))
    assert np.all(ft.dist_sq == INF) and np.all(ft.nearest == NONE)
    assert np.all(np.isinf(ft.distances()))
    mask = np.zeros((3, 3), bool)
    mask[0, 0] = True
    ft = feature_transform(mask)
    assert ft.dist_sq[2, 1] == 5
    assert ft.nearest[2, 1] == 0


def test_distance_examples():
    mask = np.zeros(5, bool)
    mask[0] = True
    ft = feature_transform(mask)
    assert distance(ft, 0) == 0.0
    assert distance(ft, 2) == 2.0
    ft = feature_transform(np.array([[1, 0, 0], [0, 0, 0]], bool))
    assert distance(ft, 5) == pytest.approx(2.2360679, abs=1e-7)
    assert distance(feature_transform(np.zeros(3, bool)), 1) == math.inf


def test_random_8cube_against_oracle(rng):
    for density in (0.001, 0.01, 0.1, 0.5):
        mask = rng.random((8, 8, 8)) < density
        check_against_oracle(mask, feature_transform(mask))


@settings(max_examples=150, deadline=None)
@given(arrays(bool, st.lists(st.integers(1, 9), min_size=1, max_size=3).map(tuple)))
def test_feature_transform_matches_oracle(mask):
    check_against_oracle(mask, feature_transform(mask))


def test_axis_order_does_not_change_distances(rng):
    mask = rng.random((7, 9, 6)) < 0.05
    base = feature_transform(mask)
    for order in itertools.permutations(range(3)):
        ft = feature_transform(mask, axis_order=order)
        assert np.array_equal(ft.dist_sq, base.dist_sq)
        check_against_oracle(mask, ft)


def test_distances_only_matches_tracked(rng):
    mask = rng.random((10, 11, 12)) < 0.02
    assert feature_transform(mask, indices=False).nearest is None
    assert np.array_equal(feature_transform(mask, indices=False).dist_sq,
                          feature_transform(mask).dist_sq)


def test_bad_axis_order():
    with pytest.raises(ValueError):
        feature_transform(np.zeros((2, 2), bool), axis_order=(0, 0))
