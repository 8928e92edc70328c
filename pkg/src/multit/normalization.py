"""Ergodic-set and Shell feature normalization.

Both procedures map a sample x to (x - v) / ||x - v|| and differ only in
the reference vector v: the Ergodic reference replicates the grand mean of
all feature entries (contamination-independent), the Shell reference is
the per-dimension centroid of a designated outlier subset (quality depends
on that prediction).
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from .core import as_feature_matrix, as_index_set, grand_mean, row_norms
from .errors import DegenerateNormalizationError, EmptyOutlierSetError

logger = logging.getLogger(__name__)

ERGODIC = "ergodic"
SHELL = "shell"


class Reference(NamedTuple):
    """A normalization reference vector together with its kind."""

    values: np.ndarray
    kind: str


def ergodic_reference(X: np.ndarray) -> Reference:
    """Constant reference: the grand mean of X replicated over d entries."""
    X = as_feature_matrix(X)
    return Reference(np.full(X.shape[1], grand_mean(X)), ERGODIC)


def shell_reference(X: np.ndarray, outlier_idx) -> Reference:
    """Per-dimension centroid of the rows selected by outlier_idx.

    Raises EmptyOutlierSetError for an empty selection; callers fall back
    to the Ergodic reference (see the scoring module).
    """
    X = as_feature_matrix(X)
    idx = as_index_set(outlier_idx, X.shape[0])
    if idx.size == 0:
        raise EmptyOutlierSetError("shell reference needs at least one outlier row")
    return Reference(X[idx].mean(axis=0), SHELL)


def normalize(x: np.ndarray, v: np.ndarray | Reference) -> np.ndarray:
    """(x - v) / ||x - v||; the result has unit l2 norm.

    Raises DegenerateNormalizationError when x equals v exactly. Batch
    callers use normalize_rows, which substitutes the zero vector for such
    rows instead of raising.
    """
    if isinstance(v, Reference):
        v = v.values
    x = np.asarray(x, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    diff = x - v
    norm = np.linalg.norm(diff)
    if norm == 0.0:
        raise DegenerateNormalizationError("sample coincides with its reference vector")
    return diff / norm


def normalize_rows(X: np.ndarray, v: np.ndarray | Reference) -> np.ndarray:
    """Normalize every row of X against v.

    Rows that coincide with v exactly (probability ~0 on real features)
    become zero vectors and are logged rather than raised, so that batch
    scoring never aborts mid-pipeline.
    """
    if isinstance(v, Reference):
        v = v.values
    diff = np.asarray(X, dtype=np.float64) - v
    norms = row_norms(diff)
    degenerate = norms == 0.0
    if degenerate.any():
        logger.warning(
            "normalize_rows: %d row(s) equal the reference vector; using zero vectors",
            int(degenerate.sum()),
        )
        norms = np.where(degenerate, 1.0, norms)
    out = diff / norms[:, None]
    out[degenerate] = 0.0
    return out
