import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from grf_toolkit.errors import DataError, ShapeError
from grf_toolkit.maskfusion import (
    average_merge,
    distance_transform,
    signed_distance,
    squared_distance_transform,
)
from oracles import brute_force_sq_edt

masks = st.tuples(st.integers(1, 12), st.integers(1, 12)).flatmap(lambda s: arrays(bool, s))


def test_center_pixel_distances():
    m = np.zeros((3, 3), bool)
    m[1, 1] = True
    d = distance_transform(m)
    np.testing.assert_array_equal(squared_distance_transform(m), brute_force_sq_edt(m))
    assert d[1, 1] == 0 and d[0, 1] == 1 and d[0, 0] == np.sqrt(2)


def test_uniform_masks():
    assert np.all(distance_transform(np.ones((4, 6), bool)) == 0)
    assert np.all(distance_transform(np.zeros((4, 6), bool)) == 10)
    assert np.all(signed_distance(np.ones((4, 6), bool)) == 10)
    assert np.all(signed_distance(np.zeros((4, 6), bool)) == -10)


def test_signed_single_pixel():
    m = np.zeros((3, 3), bool)
    m[1, 1] = True
    sd = signed_distance(m)
    assert sd[1, 1] == 1.0
    assert np.all(sd[~m] < 0)
    np.testing.assert_array_equal(sd[~m], -np.sqrt(brute_force_sq_edt(m)[~m]))


@settings(max_examples=200, deadline=None)
@given(masks)
def test_edt_equals_brute_force(m):
    np.testing.assert_array_equal(squared_distance_transform(m), brute_force_sq_edt(m))


@settings(max_examples=100, deadline=None)
@given(masks)
def test_edt_lipschitz(m):
    d = distance_transform(m)
    if m.any():
        assert np.all(np.abs(np.diff(d, axis=0)) <= 1 + 1e-12)
        assert np.all(np.abs(np.diff(d, axis=1)) <= 1 + 1e-12)


@settings(max_examples=100, deadline=None)
@given(masks)
def test_signed_sign_agrees(m):
    sd = signed_distance(m)
    assert np.all(sd[m] > 0) and np.all(sd[~m] < 0)
    assert np.all(np.abs(sd) <= sum(m.shape))


def test_complement_near_negation(rng):
    for _ in range(50):
        m = rng.random((16, 16)) < rng.uniform(0.1, 0.9)
        assert np.all(np.abs(signed_distance(m) + signed_distance(~m)) <= 2)


def test_worked_1x4_example():
    a = np.array([[1, 1, 0, 0]], bool)
    c = np.array([[0, 1, 1, 0]], bool)
    np.testing.assert_array_equal(signed_distance(a), [[2, 1, -1, -2]])
    np.testing.assert_array_equal(signed_distance(c), [[-1, 1, 1, -1]])
    assert average_merge([a, a, c]).tolist() == [[True, True, False, False]]


@pytest.mark.parametrize("mode", ["sdf_mean", "pixel_mean"])
def test_idempotent_and_single(rng, mode):
    m = rng.random((20, 20)) < 0.4
    np.testing.assert_array_equal(average_merge([m], mode), m)
    np.testing.assert_array_equal(average_merge([m, m, m], mode), m)


@pytest.mark.parametrize("mode", ["sdf_mean", "pixel_mean"])
def test_permutation_and_duplication(rng, mode):
    for _ in range(30):
        ms = [rng.random((24, 24)) < 0.5 for _ in range(3)]
        ref = average_merge(ms, mode)
        np.testing.assert_array_equal(average_merge(ms[::-1], mode), ref)
        np.testing.assert_array_equal(average_merge([ms[1], ms[2], ms[0]], mode), ref)
        np.testing.assert_array_equal(average_merge(ms + ms, mode), ref)


def test_unanimous_pixels_preserved(rng):
    for _ in range(30):
        ms = [rng.random((24, 24)) < 0.5 for _ in range(3)]
        out = average_merge(ms)
        all_fg = np.logical_and.reduce(ms)
        all_bg = ~np.logical_or.reduce(ms)
        assert np.all(out[all_fg]) and not np.any(out[all_bg])


def test_pixel_mean_vote():
    a = np.array([[1, 0, 0, 1]], bool)
    b = np.array([[1, 1, 0, 0]], bool)
    assert average_merge([a, b], "pixel_mean").tolist() == [[True, True, False, True]]


def test_merge_errors():
    with pytest.raises(DataError):
        average_merge([])
    with pytest.raises(ShapeError):
        average_merge([np.zeros((2, 2), bool), np.zeros((3, 2), bool)])
    with pytest.raises(ValueError):
        average_merge([np.zeros((2, 2), bool)], "median")
