"""Score functions and the plug-in detector enhancement contract.

The initial score of a sample is the distance between its Ergodic-set
normalized form and the identically normalized dataset mean. The final
scorer swaps in the Shell reference (centroid of predicted outliers) and
the centroid of predicted inliers. Any detector exposing fit/predict can
be enhanced by fitting it on Shell-normalized predicted inliers only.
"""

from __future__ import annotations

import warnings
from abc import ABC, abstractmethod

import numpy as np

from .core import as_feature_matrix, as_index_set, column_mean, row_norms
from .errors import DetectorError, EmptyOutlierSetError, InvalidThresholdResultError
from .normalization import ergodic_reference, normalize, normalize_rows, shell_reference

FALLBACK_ERGODIC = "shell_fallback_ergodic"


class Detector(ABC):
    """Outlier scoring method contract: fit on a matrix, predict scores.

    predict may only be called after fit and must return one score per
    test row, higher meaning more anomalous. Fitted state is read-only
    after fit, so a fitted detector may be shared across threads.
    """

    @abstractmethod
    def fit(self, train: np.ndarray) -> "Detector":
        ...

    @abstractmethod
    def predict(self, test: np.ndarray) -> np.ndarray:
        ...


class CentroidDetector(Detector):
    """Scores by Euclidean distance to the training-set centroid."""

    def __init__(self) -> None:
        self.centroid_: np.ndarray | None = None

    def fit(self, train: np.ndarray) -> "CentroidDetector":
        train = as_feature_matrix(train)
        self.centroid_ = train.mean(axis=0)
        return self

    def predict(self, test: np.ndarray) -> np.ndarray:
        if self.centroid_ is None:
            raise DetectorError("predict called before fit")
        test = as_feature_matrix(test)
        return row_norms(test - self.centroid_)


class KNNDetector(Detector):
    """Scores by distance to the k-th nearest training row.

    The training row count includes the query itself when the same matrix
    is scored, so a training point has k-th neighbor distance 0 for k=1.
    k is clamped (with a warning) if it exceeds the training-set size.
    """

    def __init__(self, k: int) -> None:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        self.k = int(k)
        self.train_: np.ndarray | None = None

    def fit(self, train: np.ndarray) -> "KNNDetector":
        self.train_ = as_feature_matrix(train)
        if self.k > self.train_.shape[0]:
            warnings.warn(
                f"k={self.k} exceeds training size {self.train_.shape[0]}; clamping",
                stacklevel=2,
            )
        return self

    def predict(self, test: np.ndarray) -> np.ndarray:
        if self.train_ is None:
            raise DetectorError("predict called before fit")
        test = as_feature_matrix(test)
        k = min(self.k, self.train_.shape[0])
        train = self.train_
        out = np.empty(test.shape[0])
        # chunked brute force keeps the distance buffer bounded
        chunk = max(1, int(2e7) // max(1, train.shape[0]))
        t2 = np.einsum("ij,ij->i", train, train)
        for start in range(0, test.shape[0], chunk):
            block = test[start : start + chunk]
            d2 = t2[None, :] - 2.0 * block @ train.T
            d2 += np.einsum("ij,ij->i", block, block)[:, None]
            np.maximum(d2, 0.0, out=d2)
            kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
            out[start : start + chunk] = np.sqrt(kth)
        return out


def knn_scorer(k: int) -> KNNDetector:
    """Built-in kNN-distance detector (see KNNDetector)."""
    return KNNDetector(k)


def centroid_scorer() -> CentroidDetector:
    """Built-in distance-to-training-centroid detector."""
    return CentroidDetector()


def _scores_against(X: np.ndarray, ref_values: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Distance of each normalized row of X to the normalized target point."""
    Xn = normalize_rows(X, ref_values)
    tn = normalize(target, ref_values)
    return row_norms(Xn - tn)


def initial_scores(X: np.ndarray) -> np.ndarray:
    """Ergodic-normalized distance of every sample to the dataset mean.

    Propagates DegenerateNormalizationError if the dataset mean coincides
    with the Ergodic reference exactly.
    """
    X = as_feature_matrix(X)
    if X.shape[0] < 2:
        raise ValueError("initial scores need at least 2 samples")
    ref = ergodic_reference(X)
    return _scores_against(X, ref.values, column_mean(X))


def score_pair(X: np.ndarray, provisional_outliers) -> tuple[np.ndarray, np.ndarray]:
    """Shell- and Ergodic-normalized score functions over the same data.

    The Shell reference comes from the provisional outlier rows (normally
    the MAD-thresholded tail); both scores measure the distance of each
    normalized sample to the identically normalized dataset mean. The
    second component equals initial_scores(X) exactly.

    Raises EmptyOutlierSetError for an empty provisional set; the caller
    substitutes rank similarity 0 (low-similarity regime).
    """
    X = as_feature_matrix(X)
    idx = as_index_set(provisional_outliers, X.shape[0])
    if idx.size == 0:
        raise EmptyOutlierSetError("score_pair needs a non-empty provisional outlier set")
    m = column_mean(X)
    f_shell = _scores_against(X, shell_reference(X, idx).values, m)
    f_ergodic = _scores_against(X, ergodic_reference(X).values, m)
    return f_shell, f_ergodic


def multi_t_scores(
    X: np.ndarray,
    inlier_idx,
    outlier_idx,
    events: list[str] | None = None,
) -> np.ndarray:
    """Final scorer: Shell-normalized distance to the predicted-inlier centroid.

    The reference vector is the centroid of the predicted outlier rows; the
    comparison point is the raw-space centroid of the predicted inlier rows,
    normalized afterward. An empty outlier set falls back to the Ergodic
    reference; the fallback is appended to ``events`` when a list is passed.
    """
    X = as_feature_matrix(X)
    in_idx = as_index_set(inlier_idx, X.shape[0])
    out_idx = as_index_set(outlier_idx, X.shape[0])
    if in_idx.size == 0:
        raise InvalidThresholdResultError("multi_t_scores needs a non-empty inlier set")
    if out_idx.size == 0:
        ref = ergodic_reference(X)
        if events is not None:
            events.append(FALLBACK_ERGODIC)
    else:
        ref = shell_reference(X, out_idx)
    inlier_centroid = X[in_idx].mean(axis=0)
    return _scores_against(X, ref.values, inlier_centroid)


def enhance_detector(
    detector: Detector,
    X: np.ndarray,
    inlier_idx,
    outlier_idx,
    events: list[str] | None = None,
) -> np.ndarray:
    """Fit a detector on Shell-normalized predicted inliers, score all rows.

    All rows are normalized with the same reference as multi_t_scores
    (Shell centroid of predicted outliers, Ergodic fallback when empty);
    the detector is fitted on the normalized inlier rows only and predicts
    on every normalized row, aligned to the original sample order.
    """
    X = as_feature_matrix(X)
    in_idx = as_index_set(inlier_idx, X.shape[0])
    out_idx = as_index_set(outlier_idx, X.shape[0])
    if in_idx.size == 0:
        raise InvalidThresholdResultError("enhance_detector needs a non-empty inlier set")
    if out_idx.size == 0:
        ref = ergodic_reference(X)
        if events is not None:
            events.append(FALLBACK_ERGODIC)
    else:
        ref = shell_reference(X, out_idx)
    Xn = normalize_rows(X, ref.values)
    try:
        detector.fit(Xn[in_idx])
    except Exception as exc:
        raise DetectorError(f"detector fit failed on {in_idx.size} inlier rows: {exc}") from exc
    scores = np.asarray(detector.predict(Xn), dtype=np.float64)
    if scores.shape != (X.shape[0],):
        raise DetectorError(f"detector returned shape {scores.shape}, expected ({X.shape[0]},)")
    return scores
