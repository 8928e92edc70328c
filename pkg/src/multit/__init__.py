"""Multiple-thresholding pipeline for unsupervised outlier detection.

Scores an unlabeled feature matrix, derives an inlier threshold and an
outlier threshold that isolate uncontaminated inliers and adaptive
outliers, and uses the two predicted sets (Shell normalization plus an
inlier-manifold fit) to enhance any plug-in outlier scorer.
"""

from .core import (
    as_feature_matrix,
    as_index_set,
    as_label_vector,
    as_score_vector,
    column_mean,
    euclidean_distance,
    grand_mean,
    mean_std,
    median_mad,
)
from .errors import (
    CsvFormatError,
    DegenerateNormalizationError,
    DetectorError,
    EmptyOutlierSetError,
    IdxFormatError,
    InsufficientPointsError,
    InvalidThresholdResultError,
    MultiTError,
    UndefinedMetricError,
)
from .evaluation import ConfusionCounts, confusion_counts, f_beta, k_sigma_labels, roc_auc
from .harness import (
    DEFAULT_GAMMA_GRID,
    DETECTOR_CHOICES,
    CellRecord,
    ExperimentReport,
    LabeledFeatureSet,
    TargetDatasetSpec,
    build_target,
    detector_scores,
    export_report,
    load_report,
    outlier_count,
    read_features_csv,
    read_idx,
    run_experiment,
    synth_benchmark,
    threshold_label_sets,
    write_features_csv,
)
from .multi_t import (
    DEFAULT_MAX_ITER,
    IterationState,
    LinearFit,
    Regime,
    SortedScores,
    ThresholdResult,
    below_line_prefix,
    fit_line,
    iterate_inliers,
    mad_threshold,
    rank_vector,
    rho_similarity,
    run_multi_t,
    select_outlier_threshold,
    sort_transform,
)
from .normalization import (
    Reference,
    ergodic_reference,
    normalize,
    normalize_rows,
    shell_reference,
)
from .scoring import (
    CentroidDetector,
    Detector,
    KNNDetector,
    centroid_scorer,
    enhance_detector,
    initial_scores,
    knn_scorer,
    multi_t_scores,
    score_pair,
)

__version__ = "0.1.0"

__all__ = [
    "as_feature_matrix",
    "as_index_set",
    "as_label_vector",
    "as_score_vector",
    "column_mean",
    "euclidean_distance",
    "grand_mean",
    "mean_std",
    "median_mad",
    "MultiTError",
    "EmptyOutlierSetError",
    "DegenerateNormalizationError",
    "InvalidThresholdResultError",
    "InsufficientPointsError",
    "UndefinedMetricError",
    "DetectorError",
    "IdxFormatError",
    "CsvFormatError",
    "ConfusionCounts",
    "confusion_counts",
    "f_beta",
    "roc_auc",
    "k_sigma_labels",
    "Reference",
    "ergodic_reference",
    "shell_reference",
    "normalize",
    "normalize_rows",
    "Detector",
    "CentroidDetector",
    "KNNDetector",
    "centroid_scorer",
    "knn_scorer",
    "initial_scores",
    "score_pair",
    "multi_t_scores",
    "enhance_detector",
    "Regime",
    "SortedScores",
    "LinearFit",
    "IterationState",
    "ThresholdResult",
    "sort_transform",
    "fit_line",
    "below_line_prefix",
    "iterate_inliers",
    "mad_threshold",
    "rank_vector",
    "rho_similarity",
    "select_outlier_threshold",
    "run_multi_t",
    "DEFAULT_MAX_ITER",
    "LabeledFeatureSet",
    "TargetDatasetSpec",
    "CellRecord",
    "ExperimentReport",
    "DEFAULT_GAMMA_GRID",
    "DETECTOR_CHOICES",
    "read_idx",
    "read_features_csv",
    "write_features_csv",
    "synth_benchmark",
    "outlier_count",
    "build_target",
    "threshold_label_sets",
    "detector_scores",
    "run_experiment",
    "export_report",
    "load_report",
]
