import numpy as np
import pytest

import multit as mt
from multit.scoring import FALLBACK_ERGODIC

from conftest import domain_matrix


def test_initial_scores_zero_at_dataset_mean():
    # third row is exactly the column mean of the matrix
    X = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 3.0], [1.0, -3.0]])
    assert np.allclose(X.mean(axis=0), X[2])
    scores = mt.initial_scores(X)
    assert scores[2] == pytest.approx(0.0, abs=1e-12)


def test_initial_scores_symmetric_square():
    X = np.array([[0.0, 0.0], [0.0, 4.0], [4.0, 0.0], [4.0, 4.0]])
    scores = mt.initial_scores(X)
    np.testing.assert_allclose(scores, scores[0], rtol=1e-12)


def test_initial_scores_far_cluster_scores_higher():
    rng = np.random.default_rng(42)
    near = rng.normal(size=(40, 6)) + 20.0
    far = rng.normal(size=(10, 6)) + 20.0
    far[:, 0] += 15.0
    X = np.vstack([near, far])
    scores = mt.initial_scores(X)
    assert scores[40:].min() > scores[:40].max()


def test_initial_scores_needs_two_samples():
    with pytest.raises(ValueError):
        mt.initial_scores([[1.0, 2.0]])


def test_score_pair_ergodic_equals_initial(planted):
    X, _ = planted
    provisional = mt.mad_threshold(mt.initial_scores(X))
    f_shell, f_ergodic = mt.score_pair(X, provisional)
    np.testing.assert_array_equal(f_ergodic, mt.initial_scores(X))
    assert f_shell.shape == f_ergodic.shape


def test_score_pair_all_rows_reduces_to_full_mean_reference(planted):
    X, _ = planted
    f_shell, _ = mt.score_pair(X, np.arange(X.shape[0]))
    ref = mt.Reference(mt.column_mean(X), "shell")
    expected = np.linalg.norm(
        mt.normalize_rows(X, ref.values) - mt.normalize(mt.column_mean(X), ref.values),
        axis=1,
    )
    np.testing.assert_allclose(f_shell, expected, rtol=1e-12)


def test_score_pair_single_planted_outlier_ranks_last():
    rng = np.random.default_rng(5)
    X = np.vstack([rng.normal(size=(60, 8)) + 10.0, rng.normal(size=8) + 30.0])
    f_shell, _ = mt.score_pair(X, [60])
    assert f_shell[60] >= f_shell.max() - 1e-12


def test_score_pair_empty_raises(planted):
    X, _ = planted
    with pytest.raises(mt.EmptyOutlierSetError):
        mt.score_pair(X, [])


def test_multi_t_scores_fallback_reduces_to_initial(planted):
    X, _ = planted
    events: list[str] = []
    scores = mt.multi_t_scores(X, np.arange(X.shape[0]), [], events=events)
    np.testing.assert_array_equal(scores, mt.initial_scores(X))
    assert events == [FALLBACK_ERGODIC]


def test_multi_t_scores_single_inlier_row_is_centroid(planted):
    X, _ = planted
    out_idx = [0, 1]
    scores = mt.multi_t_scores(X, [5], out_idx)
    ref = mt.shell_reference(X, out_idx)
    expected = np.linalg.norm(
        mt.normalize_rows(X, ref.values) - mt.normalize(X[5], ref.values), axis=1
    )
    np.testing.assert_allclose(scores, expected, rtol=1e-12)


def test_multi_t_scores_empty_inliers_raises(planted):
    X, _ = planted
    with pytest.raises(mt.InvalidThresholdResultError):
        mt.multi_t_scores(X, [], [0])


def test_multi_t_scores_improves_auc_with_true_sets(planted):
    X, y = planted
    scores = mt.multi_t_scores(X, np.flatnonzero(y == 0), np.flatnonzero(y == 1))
    assert mt.roc_auc(scores, y) >= mt.roc_auc(mt.initial_scores(X), y)


def test_enhance_centroid_tracks_multi_t_scores(planted):
    # the detector centroid lives in normalized space, the direct scorer
    # normalizes the raw centroid; the two agree in ranking, not bitwise
    X, y = planted
    result = mt.run_multi_t(X)
    direct = mt.multi_t_scores(X, result.inlier_idx, result.outlier_idx)
    enhanced = mt.enhance_detector(
        mt.centroid_scorer(), X, result.inlier_idx, result.outlier_idx
    )
    rho = mt.rho_similarity(direct, enhanced)
    assert rho >= 0.99
    assert abs(mt.roc_auc(enhanced, y) - mt.roc_auc(direct, y)) < 0.02


def test_enhance_knn_beats_raw_knn(planted):
    X, y = planted
    result = mt.run_multi_t(X)
    raw = mt.knn_scorer(5).fit(X).predict(X)
    enhanced = mt.enhance_detector(mt.knn_scorer(5), X, result.inlier_idx, result.outlier_idx)
    assert mt.roc_auc(enhanced, y) >= mt.roc_auc(raw, y)


def test_enhance_fallback_equals_plain_detector_on_ergodic_rows(planted):
    X, _ = planted
    all_rows = np.arange(X.shape[0])
    enhanced = mt.enhance_detector(mt.knn_scorer(3), X, all_rows, [])
    Xn = mt.normalize_rows(X, mt.ergodic_reference(X).values)
    plain = mt.knn_scorer(3).fit(Xn).predict(Xn)
    np.testing.assert_allclose(enhanced, plain, rtol=1e-12)


def test_knn_hand_values():
    train = np.array([[0.0], [1.0]])
    test = np.array([[3.0]])
    assert mt.knn_scorer(2).fit(train).predict(test)[0] == pytest.approx(3.0)
    assert mt.knn_scorer(1).fit(train).predict(test)[0] == pytest.approx(2.0)
    assert mt.knn_scorer(1).fit(train).predict(np.array([[1.0]]))[0] == pytest.approx(0.0)


def test_knn_clamps_large_k_with_warning():
    train = np.array([[0.0], [1.0]])
    with pytest.warns(UserWarning, match="clamping"):
        det = mt.knn_scorer(10).fit(train)
    assert det.predict(np.array([[3.0]]))[0] == pytest.approx(3.0)


def test_knn_rejects_bad_k():
    with pytest.raises(ValueError):
        mt.knn_scorer(0)


def test_detectors_require_fit():
    with pytest.raises(mt.DetectorError):
        mt.centroid_scorer().predict(np.array([[1.0]]))
    with pytest.raises(mt.DetectorError):
        mt.knn_scorer(1).predict(np.array([[1.0]]))


def test_scores_finite_on_domain_matrices():
    for seed in range(5):
        X, _ = domain_matrix(seed)
        result = mt.run_multi_t(X)
        for vec in (
            result.initial_scores,
            mt.multi_t_scores(X, result.inlier_idx, result.outlier_idx),
        ):
            assert np.isfinite(vec).all()
