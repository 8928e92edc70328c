"""Dense matrix/vector containers and robust-statistics primitives.

Feature matrices are plain ``numpy`` arrays of shape (n, d), scores are
length-n vectors, labels are length-n 0/1 vectors (1 = outlier). The
``as_*`` validators are applied at every public entry point; internal code
assumes already-validated float64 arrays. Row i always refers to the same
sample throughout the pipeline.
"""

from __future__ import annotations

import numpy as np


def as_feature_matrix(data) -> np.ndarray:
    """Validate and return a float64 feature matrix of shape (n, d).

    Requires n >= 1, d >= 1 and every entry finite.
    """
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"feature matrix must be 2-d, got shape {X.shape}")
    n, d = X.shape
    if n < 1 or d < 1:
        raise ValueError(f"feature matrix must be at least 1x1, got {n}x{d}")
    if not np.isfinite(X).all():
        raise ValueError("feature matrix contains non-finite entries")
    return X


def as_score_vector(values) -> np.ndarray:
    """Validate and return a float64 score vector of length n >= 1."""
    s = np.asarray(values, dtype=np.float64)
    if s.ndim != 1:
        raise ValueError(f"score vector must be 1-d, got shape {s.shape}")
    if s.size < 1:
        raise ValueError("score vector must not be empty")
    if not np.isfinite(s).all():
        raise ValueError("score vector contains non-finite entries")
    return s


def as_label_vector(values) -> np.ndarray:
    """Validate and return an int64 label vector over {0, 1}."""
    y = np.asarray(values)
    if y.ndim != 1:
        raise ValueError(f"label vector must be 1-d, got shape {y.shape}")
    y = y.astype(np.int64)
    if not np.isin(y, (0, 1)).all():
        raise ValueError("label vector entries must be 0 or 1")
    return y


def as_index_set(idx, n: int) -> np.ndarray:
    """Validate a set of sample indices against a dataset of n rows.

    Returns a sorted, duplicate-free int64 array.
    """
    a = np.asarray(idx, dtype=np.int64).ravel()
    if a.size and (a.min() < 0 or a.max() >= n):
        raise ValueError(f"index set out of range for n={n}")
    return np.unique(a)


def column_mean(X: np.ndarray) -> np.ndarray:
    """Per-dimension mean of the rows of X (length-d vector)."""
    X = as_feature_matrix(X)
    return X.mean(axis=0)


def grand_mean(X: np.ndarray) -> float:
    """Mean over all n*d entries of X."""
    X = as_feature_matrix(X)
    return float(X.mean())


def mean_std(s: np.ndarray) -> tuple[float, float]:
    """Arithmetic mean and population (1/n) standard deviation of s."""
    s = as_score_vector(s)
    return float(s.mean()), float(s.std())


def median_mad(s: np.ndarray) -> tuple[float, float]:
    """Median and raw median absolute deviation of s.

    Even-length medians use the midpoint of the two central order
    statistics. The MAD is unscaled; callers apply the Gaussian
    consistency factor where needed.
    """
    s = as_score_vector(s)
    med = float(np.median(s))
    return med, float(np.median(np.abs(s - med)))


def euclidean_distance(a: np.ndarray, b: np.ndarray) -> float:
    """l2 distance between two equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def row_norms(X: np.ndarray) -> np.ndarray:
    """l2 norm of every row; single pass, no intermediate copies."""
    return np.sqrt(np.einsum("ij,ij->i", X, X))
