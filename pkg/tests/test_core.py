import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import multit as mt


def test_column_mean_hand():
    np.testing.assert_allclose(mt.column_mean([[0, 0], [2, 4]]), [1, 2])


def test_column_mean_single_row_identity():
    r = [3.5, -1.0, 2.0]
    np.testing.assert_array_equal(mt.column_mean([r]), r)


def test_column_mean_constant():
    np.testing.assert_array_equal(mt.column_mean([[1, 1], [1, 1], [1, 1]]), [1, 1])


def test_grand_mean_hand():
    assert mt.grand_mean([[0, 0], [2, 2]]) == 1.0
    assert mt.grand_mean(np.zeros((3, 4))) == 0.0
    assert mt.grand_mean([[1, 3]]) == 2.0


def test_mean_std_hand():
    assert mt.mean_std([1, 1, 1]) == (1.0, 0.0)
    assert mt.mean_std([0, 2]) == (1.0, 1.0)
    mean, std = mt.mean_std([1, 2, 3, 4])
    assert mean == 2.5
    assert std == pytest.approx(np.sqrt(1.25), abs=1e-12)


def test_median_mad_hand():
    assert mt.median_mad([1, 2, 3, 4, 100]) == (3.0, 1.0)
    assert mt.median_mad([5]) == (5.0, 0.0)
    assert mt.median_mad([1, 2, 3, 4]) == (2.5, 1.0)


def test_euclidean_distance_hand():
    assert mt.euclidean_distance([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert mt.euclidean_distance([0, 0], [3, 4]) == 5.0
    assert mt.euclidean_distance([1], [-1]) == 2.0


def test_euclidean_distance_length_mismatch():
    with pytest.raises(ValueError):
        mt.euclidean_distance([1, 2], [1, 2, 3])


def test_validators_reject_bad_input():
    with pytest.raises(ValueError):
        mt.as_feature_matrix([[np.nan, 1.0]])
    with pytest.raises(ValueError):
        mt.as_feature_matrix([1.0, 2.0])
    with pytest.raises(ValueError):
        mt.as_score_vector([])
    with pytest.raises(ValueError):
        mt.as_score_vector([np.inf])
    with pytest.raises(ValueError):
        mt.as_label_vector([0, 2])
    with pytest.raises(ValueError):
        mt.as_index_set([5], 3)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 2), alpha=st.floats(-8, 8, allow_nan=False))
def test_mean_linearity(seed, alpha):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(int(rng.integers(1, 12)), int(rng.integers(1, 8))))
    assert mt.grand_mean(alpha * X) == pytest.approx(alpha * mt.grand_mean(X), rel=1e-12, abs=1e-12)
    np.testing.assert_allclose(
        mt.column_mean(alpha * X), alpha * mt.column_mean(X), rtol=1e-12, atol=1e-12
    )


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_mean_std_zero_iff_constant(seed):
    rng = np.random.default_rng(seed)
    # integer-valued floats are exactly representable
    values = rng.integers(-5, 6, size=int(rng.integers(1, 20))).astype(float)
    _, std = mt.mean_std(values)
    assert (std == 0.0) == bool((values == values[0]).all())


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_median_mad_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    values = rng.normal(size=int(rng.integers(1, 30)))
    shuffled = rng.permutation(values)
    assert mt.median_mad(values) == mt.median_mad(shuffled)


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_euclidean_distance_metric_properties(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 10))
    a, b, c = rng.normal(size=(3, d)) * 10
    ab = mt.euclidean_distance(a, b)
    assert ab == mt.euclidean_distance(b, a)
    assert ab <= mt.euclidean_distance(a, c) + mt.euclidean_distance(c, b) + 1e-9
