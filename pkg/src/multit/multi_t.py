"""The multiple-thresholding engine.

Stage 1 isolates uncontaminated inliers: the initial scores are sorted,
fitted with a straight line, and everything above the 3-sigma bound of the
below-line prefix is filtered out, iterating until no sample is removed.
Stage 2 picks the outlier threshold among three candidates (the converged
bound, the first-iteration bound, and the 3-sigma bound of the full score
distribution) according to the rank similarity between Shell- and
Ergodic-normalized score functions, a proxy for the contamination regime.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import as_feature_matrix, as_index_set, as_score_vector, mean_std, median_mad
from .errors import InsufficientPointsError
from .scoring import initial_scores, score_pair

SIGMA_MULTIPLIER = 3.0
MAD_SCALE = 1.4826  # Gaussian consistency factor
MAD_MULTIPLIER = 3.0
RHO_HIGH = 0.3
RHO_LOW = 0.1
MIN_SURVIVORS = 4
DEFAULT_MAX_ITER = 100

FALLBACK_NO_CROSSING = "below_line_no_crossing"
FALLBACK_SURVIVOR_FLOOR = "survivor_floor"
FALLBACK_MAD_DEGENERATE = "mad_degenerate"
FALLBACK_EMPTY_PROVISIONAL = "empty_provisional_outliers"


class Regime(enum.Enum):
    """Similarity regime that selects the outlier threshold candidate."""

    HIGH = "High"
    MID = "Mid"
    LOW = "Low"


@dataclass
class SortedScores:
    """Ascending view of a score subset with its sample-index permutation."""

    values: np.ndarray
    original_index: np.ndarray


@dataclass
class LinearFit:
    """Least-squares line over sorted-score positions 0..m-1."""

    beta0: float
    beta1: float

    def predict(self, positions: np.ndarray) -> np.ndarray:
        return self.beta0 + self.beta1 * np.asarray(positions, dtype=np.float64)


@dataclass
class IterationState:
    """Converged state of the inlier-isolation loop."""

    inlier_idx: np.ndarray
    phi_out_first: float
    phi_out_star: float
    iterations: int
    events: list[str] = field(default_factory=list)


@dataclass
class ThresholdResult:
    """Everything the thresholding stage produces for one dataset."""

    phi_in: float
    phi_out: float
    phi_out_first: float
    phi_out_star: float
    phi_out_zero: float
    rho: float
    regime: Regime
    inlier_idx: np.ndarray
    outlier_idx: np.ndarray
    iterations: int
    fallbacks: list[str]
    initial_scores: np.ndarray


def sort_transform(s: np.ndarray, alive=None) -> SortedScores:
    """Stable ascending sort of s restricted to the alive index set.

    Ties keep original index order, so the permutation is deterministic.
    """
    s = as_score_vector(s)
    if alive is None:
        alive = np.arange(s.size)
    else:
        alive = as_index_set(alive, s.size)
        if alive.size == 0:
            raise ValueError("alive index set must not be empty")
    sub = s[alive]
    order = np.argsort(sub, kind="stable")
    return SortedScores(values=sub[order], original_index=alive[order])


def fit_line(ss: SortedScores) -> LinearFit:
    """Ordinary least squares of sorted values against positions 0..m-1."""
    y = ss.values
    m = y.size
    if m < 2:
        raise InsufficientPointsError(f"line fit needs >= 2 points, got {m}")
    a = np.arange(m, dtype=np.float64)
    a_mean = a.mean()
    y_mean = y.mean()
    sxx = float(((a - a_mean) ** 2).sum())
    sxy = float(((a - a_mean) * (y - y_mean)).sum())
    beta1 = sxy / sxx
    return LinearFit(beta0=float(y_mean - beta1 * a_mean), beta1=beta1)


def _prefix_length(values: np.ndarray, fit: LinearFit) -> tuple[int, bool]:
    """Sorted-position count of the below-line prefix, plus fallback flag.

    The prefix ends just before the last position where the fitted line
    lies strictly above the sorted value. Without any strict crossing
    (exact fits, m=2) the whole set is kept and the fallback is flagged.
    """
    m = values.size
    above = fit.predict(np.arange(m)) > values
    if not above.any():
        return m, True
    return int(np.flatnonzero(above).max()), False


def below_line_prefix(ss: SortedScores, fit: LinearFit) -> np.ndarray:
    """Sample indices of the below-line prefix (whole set when no crossing)."""
    p, _ = _prefix_length(ss.values, fit)
    return np.sort(ss.original_index[:p])


def iterate_inliers(s: np.ndarray, max_iter: int = DEFAULT_MAX_ITER) -> IterationState:
    """Iteratively filter high scores until the 3-sigma bound removes none.

    Each pass sorts the surviving scores, fits a line, takes the
    below-line prefix, and removes every surviving sample above the
    prefix's mean + 3*std. The returned inlier set is the prefix of the
    final pass; phi_out_first/phi_out_star are the bounds from the first
    and final passes. Shrinking below MIN_SURVIVORS stops early with a
    recorded fallback event.
    """
    s = as_score_vector(s)
    n = s.size
    if n < MIN_SURVIVORS:
        raise InsufficientPointsError(f"need >= {MIN_SURVIVORS} samples, got {n}")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    events: list[str] = []
    alive = np.arange(n)
    phi_first = np.nan
    phi_b = np.nan
    prefix_idx = alive
    iterations = 0
    for b in range(1, max_iter + 1):
        iterations = b
        ss = sort_transform(s, alive)
        fit = fit_line(ss)
        p, fell_back = _prefix_length(ss.values, fit)
        if fell_back:
            events.append(FALLBACK_NO_CROSSING)
        prefix_vals = ss.values[:p]
        prefix_idx = np.sort(ss.original_index[:p])
        phi_b = float(prefix_vals.mean() + SIGMA_MULTIPLIER * prefix_vals.std())
        if b == 1:
            phi_first = phi_b
        keep = s[alive] <= phi_b
        if keep.all():
            break
        survivors = alive[keep]
        if survivors.size < MIN_SURVIVORS:
            events.append(FALLBACK_SURVIVOR_FLOOR)
            break
        alive = survivors
    return IterationState(
        inlier_idx=prefix_idx,
        phi_out_first=phi_first,
        phi_out_star=phi_b,
        iterations=iterations,
        events=events,
    )


def mad_threshold(s: np.ndarray, events: list[str] | None = None) -> np.ndarray:
    """Provisional outliers: scores above median + 3 * 1.4826 * MAD.

    A zero MAD degenerates to scores strictly above the median; the
    substitution is appended to ``events`` when a list is passed.
    """
    s = as_score_vector(s)
    if s.size < 2:
        raise InsufficientPointsError("mad threshold needs >= 2 scores")
    med, mad = median_mad(s)
    if mad == 0.0:
        if events is not None:
            events.append(FALLBACK_MAD_DEGENERATE)
        return np.flatnonzero(s > med)
    return np.flatnonzero(s > med + MAD_MULTIPLIER * MAD_SCALE * mad)


def rank_vector(s: np.ndarray) -> np.ndarray:
    """Ordinal ascending ranks 0..n-1, ties broken by original index."""
    s = as_score_vector(s)
    if s.size < 2:
        raise InsufficientPointsError("ranks need >= 2 scores")
    order = np.argsort(s, kind="stable")
    ranks = np.empty(s.size, dtype=np.int64)
    ranks[order] = np.arange(s.size)
    return ranks


def rho_similarity(f_shell: np.ndarray, f_ergodic: np.ndarray) -> float:
    """Pearson correlation between the two score functions' rank vectors.

    Ordinal ranks are exact permutations of 0..n-1, so both standard
    deviations are fixed and positive and the value lies in [-1, 1].
    """
    f_shell = as_score_vector(f_shell)
    f_ergodic = as_score_vector(f_ergodic)
    if f_shell.size != f_ergodic.size:
        raise ValueError("score functions must have equal length")
    r_s = rank_vector(f_shell).astype(np.float64)
    r_e = rank_vector(f_ergodic).astype(np.float64)
    r_s -= r_s.mean()
    r_e -= r_e.mean()
    denom = np.sqrt(float((r_s * r_s).sum()) * float((r_e * r_e).sum()))
    return float((r_s * r_e).sum() / denom)


def select_outlier_threshold(
    rho: float,
    phi_out_star: float,
    phi_out_first: float,
    phi_out_zero: float,
) -> tuple[float, Regime]:
    """Pick the outlier threshold candidate for the similarity regime.

    rho > 0.3 selects the converged bound, 0.1 <= rho <= 0.3 (closed
    interval) the first-iteration bound, and anything lower the
    conservative full-distribution bound.
    """
    if rho > RHO_HIGH:
        return phi_out_star, Regime.HIGH
    if rho >= RHO_LOW:
        return phi_out_first, Regime.MID
    return phi_out_zero, Regime.LOW


def run_multi_t(X: np.ndarray, max_iter: int = DEFAULT_MAX_ITER) -> ThresholdResult:
    """Run the full thresholding pipeline on a feature matrix.

    Deterministic for a fixed X: initial scores, inlier isolation, the
    MAD-seeded rank-similarity estimate, regime selection, and the two
    label sets. Every fallback taken along the way is recorded.
    """
    X = as_feature_matrix(X)
    if X.shape[0] < MIN_SURVIVORS:
        raise InsufficientPointsError(f"need >= {MIN_SURVIVORS} samples, got {X.shape[0]}")
    s = initial_scores(X)

    state = iterate_inliers(s, max_iter=max_iter)
    events = list(state.events)
    phi_in = float(s[state.inlier_idx].max())
    inlier_idx = np.flatnonzero(s <= phi_in)

    mu, sigma = mean_std(s)
    phi_out_zero = mu + SIGMA_MULTIPLIER * sigma

    provisional = mad_threshold(s, events)
    if provisional.size == 0:
        events.append(FALLBACK_EMPTY_PROVISIONAL)
        rho = 0.0
    else:
        f_shell, f_ergodic = score_pair(X, provisional)
        rho = rho_similarity(f_shell, f_ergodic)

    phi_out, regime = select_outlier_threshold(
        rho, state.phi_out_star, state.phi_out_first, phi_out_zero
    )
    outlier_idx = np.flatnonzero(s > phi_out)

    return ThresholdResult(
        phi_in=phi_in,
        phi_out=float(phi_out),
        phi_out_first=state.phi_out_first,
        phi_out_star=state.phi_out_star,
        phi_out_zero=phi_out_zero,
        rho=rho,
        regime=regime,
        inlier_idx=inlier_idx,
        outlier_idx=outlier_idx,
        iterations=state.iterations,
        fallbacks=events,
        initial_scores=s,
    )
