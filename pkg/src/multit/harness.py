"""Data ingestion, synthetic benchmarks, and the experiment grid runner.

Benchmark protocol: one class of a labeled feature set plays the inlier
role, a seeded random subset of all other classes is mixed in to reach the
requested contamination ratio, and metrics are averaged per class and
across the ratio grid.
"""

from __future__ import annotations

import csv
import gzip
import json
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import as_feature_matrix, as_label_vector
from .errors import CsvFormatError, IdxFormatError, MultiTError
from .evaluation import f_beta, roc_auc
from .multi_t import DEFAULT_MAX_ITER, ThresholdResult, run_multi_t
from .scoring import centroid_scorer, enhance_detector, knn_scorer, multi_t_scores

REPORT_SCHEMA_VERSION = 1
DEFAULT_GAMMA_GRID = (0.05, 0.1, 0.2, 0.3, 0.4)
DETECTOR_CHOICES = ("multi-t", "knn", "centroid", "knn+multi-t", "centroid+multi-t")

IDX_IMAGES_MAGIC = 2051
IDX_LABELS_MAGIC = 2049

CSV_COLUMNS = (
    "kind",
    "inlier_class",
    "gamma",
    "seed",
    "auc",
    "f01",
    "f10",
    "rho",
    "regime",
    "wall_time_ms",
    "status",
    "error",
)


@dataclass
class LabeledFeatureSet:
    """A feature matrix with per-sample class labels and provenance."""

    features: np.ndarray
    class_id: np.ndarray
    source: str = ""

    def __post_init__(self) -> None:
        self.features = as_feature_matrix(self.features)
        self.class_id = np.asarray(self.class_id)
        if self.class_id.shape != (self.features.shape[0],):
            raise ValueError("class_id length must equal the sample count")

    def classes(self) -> list:
        return sorted(np.unique(self.class_id).tolist())


@dataclass(frozen=True)
class TargetDatasetSpec:
    """One benchmark cell: inlier class, contamination ratio, RNG seed."""

    inlier_class: object
    gamma: float
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")


@dataclass
class CellRecord:
    """Metrics for one (class, gamma, seed) experiment cell."""

    inlier_class: object
    gamma: float
    seed: int
    auc: float = float("nan")
    f01: float = float("nan")
    f10: float = float("nan")
    rho: float = float("nan")
    regime: str = ""
    wall_time_ms: float = 0.0
    status: str = "ok"
    error: str = ""


AGGREGATE_METRICS = ("auc", "f01", "f10", "rho")


@dataclass
class ExperimentReport:
    """Cell records plus per-class and grand metric means."""

    records: list[CellRecord]
    per_class: dict
    grand: dict
    detector: str
    gammas: tuple
    seeds_per_cell: int
    master_seed: int
    schema_version: int = REPORT_SCHEMA_VERSION

    @property
    def failed_cells(self) -> list[CellRecord]:
        return [r for r in self.records if r.status != "ok"]


def _open_maybe_gzip(path):
    with open(path, "rb") as f:
        magic = f.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _read_exact(f, count: int, offset: int, path) -> bytes:
    data = f.read(count)
    if len(data) != count:
        raise IdxFormatError(
            f"{path}: truncated file, expected {count} bytes at byte offset {offset}, "
            f"got {len(data)}"
        )
    return data


def read_idx(images_path, labels_path) -> LabeledFeatureSet:
    """Read an IDX image/label file pair (plain or gzipped).

    Images are flattened row-major to rows*cols dimensions and scaled to
    [0, 1] by dividing by 255. Bad magic numbers, truncation, and a count
    mismatch between the two files raise IdxFormatError naming the byte
    offset.
    """
    with _open_maybe_gzip(images_path) as f:
        (magic,) = struct.unpack(">I", _read_exact(f, 4, 0, images_path))
        if magic != IDX_IMAGES_MAGIC:
            raise IdxFormatError(
                f"{images_path}: bad images magic {magic:#010x} at byte offset 0, "
                f"expected {IDX_IMAGES_MAGIC:#010x}"
            )
        n, rows, cols = struct.unpack(">III", _read_exact(f, 12, 4, images_path))
        pixels = _read_exact(f, n * rows * cols, 16, images_path)
    features = np.frombuffer(pixels, dtype=np.uint8).astype(np.float64) / 255.0
    features = features.reshape(n, rows * cols)

    with _open_maybe_gzip(labels_path) as f:
        (magic,) = struct.unpack(">I", _read_exact(f, 4, 0, labels_path))
        if magic != IDX_LABELS_MAGIC:
            raise IdxFormatError(
                f"{labels_path}: bad labels magic {magic:#010x} at byte offset 0, "
                f"expected {IDX_LABELS_MAGIC:#010x}"
            )
        (n_labels,) = struct.unpack(">I", _read_exact(f, 4, 4, labels_path))
        if n_labels != n:
            raise IdxFormatError(
                f"{labels_path}: label count {n_labels} (byte offset 4) does not match "
                f"image count {n}"
            )
        labels = np.frombuffer(_read_exact(f, n_labels, 8, labels_path), dtype=np.uint8)

    return LabeledFeatureSet(features, labels.astype(np.int64), source=f"idx:{images_path}")


def read_features_csv(path) -> LabeledFeatureSet:
    """Read a `class,f0,f1,...` feature CSV produced by write_features_csv.

    Ragged rows and non-numeric or non-finite cells raise CsvFormatError
    naming the offending row (1-based, header = row 1).
    """
    rows: list[np.ndarray] = []
    classes: list = []
    with open(path, "r", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file") from None
        expected = ["class"] + [f"f{i}" for i in range(len(header) - 1)]
        if header != expected or len(header) < 2:
            raise CsvFormatError(f"{path}: row 1: header must be class,f0,f1,...")
        d = len(header) - 1
        for lineno, row in enumerate(reader, start=2):
            if len(row) != d + 1:
                raise CsvFormatError(
                    f"{path}: row {lineno}: expected {d + 1} cells, got {len(row)}"
                )
            try:
                values = np.array(row[1:], dtype=np.float64)
            except ValueError:
                raise CsvFormatError(f"{path}: row {lineno}: non-numeric feature cell") from None
            if not np.isfinite(values).all():
                raise CsvFormatError(f"{path}: row {lineno}: non-finite feature cell")
            rows.append(values)
            cls = row[0]
            try:
                cls = int(cls)
            except ValueError:
                pass
            classes.append(cls)
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    return LabeledFeatureSet(np.vstack(rows), np.asarray(classes), source=f"csv:{path}")


def write_features_csv(dataset: LabeledFeatureSet, path) -> None:
    """Write a feature CSV with full-precision (round-trip exact) values."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["class"] + [f"f{i}" for i in range(dataset.features.shape[1])])
        for cls, row in zip(dataset.class_id.tolist(), dataset.features):
            writer.writerow([cls] + [repr(v) for v in row.tolist()])


def synth_benchmark(
    n_in: int,
    n_out_pool: int,
    d: int,
    spread: float,
    seed: int,
    n_clusters: int = 4,
    outlier_sigma: float = 1.0,
    center_scale: float = 3.0,
) -> LabeledFeatureSet:
    """Generate a synthetic benchmark set with a planted geometry.

    Class 0 is an isotropic unit-width Gaussian at a random center of norm
    center_scale * sqrt(d). The outlier pool is split across n_clusters
    Gaussians of width outlier_sigma whose centers sit at Euclidean
    distance `spread` from the inlier center in random directions
    (classes 1..n_clusters). Deterministic in the seed.
    """
    if n_in < 1 or n_out_pool < 1:
        raise ValueError("n_in and n_out_pool must be >= 1")
    if d < 2:
        raise ValueError("d must be >= 2")
    if n_clusters < 1:
        raise ValueError("n_clusters must be >= 1")
    rng = np.random.default_rng(seed)
    direction = rng.normal(0.0, 1.0, d)
    center = center_scale * np.sqrt(d) * direction / np.linalg.norm(direction)
    inliers = center + rng.normal(0.0, 1.0, (n_in, d))
    parts = [inliers]
    labels = [np.zeros(n_in, dtype=np.int64)]
    base, extra = divmod(n_out_pool, n_clusters)
    for c in range(n_clusters):
        count = base + (1 if c < extra else 0)
        u = rng.normal(0.0, 1.0, d)
        u /= np.linalg.norm(u)
        cluster_center = center + spread * u
        parts.append(cluster_center + outlier_sigma * rng.normal(0.0, 1.0, (count, d)))
        labels.append(np.full(count, c + 1, dtype=np.int64))
    return LabeledFeatureSet(
        np.vstack(parts),
        np.concatenate(labels),
        source=f"synth:seed={seed},d={d},spread={spread}",
    )


def outlier_count(gamma: float, n_in: int) -> int:
    """Outliers needed so that gamma of the target dataset is contaminated.

    ceil(gamma / (1 - gamma) * n_in), with a tiny rounding guard so exact
    ratios (0.2 of 800 -> 200) do not tip over from float noise.
    """
    return int(np.ceil(round(gamma / (1.0 - gamma) * n_in, 9)))


def build_target(
    dataset: LabeledFeatureSet, spec: TargetDatasetSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Assemble one target dataset: all inliers plus sampled outliers.

    Every sample of the inlier class is kept; a seeded uniform subset of
    all other classes is drawn to reach the requested ratio, and the rows
    are shuffled deterministically. Returns the matrix and ground-truth
    labels (1 = outlier).
    """
    in_mask = dataset.class_id == spec.inlier_class
    n_in = int(in_mask.sum())
    if n_in == 0:
        raise ValueError(f"inlier class {spec.inlier_class!r} not present")
    pool = dataset.features[~in_mask]
    n_out = outlier_count(spec.gamma, n_in)
    if n_out > pool.shape[0]:
        max_gamma = pool.shape[0] / (n_in + pool.shape[0])
        raise ValueError(
            f"outlier pool too small for gamma={spec.gamma}: needs {n_out} of "
            f"{pool.shape[0]} rows; achievable maximum gamma is {max_gamma:.4f}"
        )
    rng = np.random.default_rng(spec.seed)
    picked = rng.choice(pool.shape[0], size=n_out, replace=False)
    X = np.vstack([dataset.features[in_mask], pool[picked]])
    y = np.concatenate([np.zeros(n_in, dtype=np.int64), np.ones(n_out, dtype=np.int64)])
    perm = rng.permutation(X.shape[0])
    return X[perm], y[perm]


def threshold_label_sets(result: ThresholdResult) -> tuple[np.ndarray, np.ndarray]:
    """Outlier-positive label vectors from the two thresholds.

    The first labels scores above the outlier threshold (precision-side
    evaluation), the second labels scores above the inlier threshold
    (recall-side evaluation; its complement is the predicted inlier set).
    """
    s = result.initial_scores
    return (
        (s > result.phi_out).astype(np.int64),
        (s > result.phi_in).astype(np.int64),
    )


def detector_scores(
    choice: str,
    X: np.ndarray,
    result: ThresholdResult,
    knn_k: int = 5,
) -> np.ndarray:
    """Score a target dataset with the requested detector configuration.

    Plain detectors fit and predict on the raw matrix; `+multi-t` variants
    are fitted on Shell-normalized predicted inliers only.
    """
    if choice == "multi-t":
        return multi_t_scores(X, result.inlier_idx, result.outlier_idx)
    if choice == "knn":
        return knn_scorer(knn_k).fit(X).predict(X)
    if choice == "centroid":
        return centroid_scorer().fit(X).predict(X)
    if choice == "knn+multi-t":
        return enhance_detector(knn_scorer(knn_k), X, result.inlier_idx, result.outlier_idx)
    if choice == "centroid+multi-t":
        return enhance_detector(centroid_scorer(), X, result.inlier_idx, result.outlier_idx)
    raise ValueError(f"unknown detector {choice!r}; choose from {DETECTOR_CHOICES}")


def cell_seed(master_seed: int, class_index: int, gamma_index: int, rep: int) -> int:
    """Deterministic per-cell seed mixed from the master seed and indices."""
    seq = np.random.SeedSequence([master_seed, class_index, gamma_index, rep])
    return int(seq.generate_state(1)[0])


def run_experiment(
    dataset: LabeledFeatureSet,
    classes=None,
    gammas=DEFAULT_GAMMA_GRID,
    seeds_per_cell: int = 3,
    master_seed: int = 0,
    detector: str = "multi-t",
    knn_k: int = 5,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ExperimentReport:
    """Run the benchmark grid and aggregate the metrics.

    Each (class, gamma, rep) cell builds a target dataset, runs the
    thresholding pipeline, scores it with the chosen detector, and records
    ROC-AUC plus F0.1/F10 from the two threshold label sets. Cell failures
    are recorded and skipped by the aggregates; the run itself continues.
    """
    if detector not in DETECTOR_CHOICES:
        raise ValueError(f"unknown detector {detector!r}; choose from {DETECTOR_CHOICES}")
    if classes is None:
        classes = dataset.classes()
    gammas = tuple(float(g) for g in gammas)
    records: list[CellRecord] = []
    for class_index, inlier_class in enumerate(classes):
        for gamma_index, gamma in enumerate(gammas):
            for rep in range(seeds_per_cell):
                seed = cell_seed(master_seed, class_index, gamma_index, rep)
                record = CellRecord(inlier_class=inlier_class, gamma=gamma, seed=seed)
                started = time.perf_counter()
                try:
                    X, truth = build_target(
                        dataset, TargetDatasetSpec(inlier_class, gamma, seed)
                    )
                    result = run_multi_t(X, max_iter=max_iter)
                    scores = detector_scores(detector, X, result, knn_k=knn_k)
                    pred_out, pred_in = threshold_label_sets(result)
                    record.auc = roc_auc(scores, truth)
                    record.f01 = f_beta(pred_out, truth, 0.1)
                    record.f10 = f_beta(pred_in, truth, 10.0)
                    record.rho = result.rho
                    record.regime = result.regime.value
                except (MultiTError, ValueError) as exc:
                    record.status = "error"
                    record.error = str(exc)
                record.wall_time_ms = (time.perf_counter() - started) * 1000.0
                records.append(record)

    per_class = {}
    for inlier_class in classes:
        ok = [r for r in records if r.inlier_class == inlier_class and r.status == "ok"]
        per_class[inlier_class] = {
            m: (float(np.mean([getattr(r, m) for r in ok])) if ok else float("nan"))
            for m in AGGREGATE_METRICS
        }
    ok = [r for r in records if r.status == "ok"]
    grand = {
        m: (float(np.mean([getattr(r, m) for r in ok])) if ok else float("nan"))
        for m in AGGREGATE_METRICS
    }
    return ExperimentReport(
        records=records,
        per_class=per_class,
        grand=grand,
        detector=detector,
        gammas=gammas,
        seeds_per_cell=seeds_per_cell,
        master_seed=master_seed,
    )


def _report_payload(report: ExperimentReport) -> dict:
    return {
        "schema_version": report.schema_version,
        "detector": report.detector,
        "gammas": list(report.gammas),
        "seeds_per_cell": report.seeds_per_cell,
        "master_seed": report.master_seed,
        "records": [
            {
                "inlier_class": record.inlier_class,
                "gamma": record.gamma,
                "seed": record.seed,
                "auc": record.auc,
                "f01": record.f01,
                "f10": record.f10,
                "rho": record.rho,
                "regime": record.regime,
                "wall_time_ms": record.wall_time_ms,
                "status": record.status,
                "error": record.error,
            }
            for record in report.records
        ],
        "aggregates": {
            "per_class": {str(k): v for k, v in report.per_class.items()},
            "grand": report.grand,
        },
    }


def export_report(report: ExperimentReport, path, format: str = "json") -> None:
    """Serialize a report to JSON (versioned schema) or fixed-column CSV.

    The CSV holds one row per record plus one per-class mean row per class
    and a single grand-mean row.
    """
    path = Path(path)
    if format == "json":
        with open(path, "w") as f:
            json.dump(_report_payload(report), f, indent=2, allow_nan=True)
            f.write("\n")
    elif format == "csv":
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(CSV_COLUMNS)
            for r in report.records:
                writer.writerow(
                    [
                        "cell",
                        r.inlier_class,
                        r.gamma,
                        r.seed,
                        repr(r.auc),
                        repr(r.f01),
                        repr(r.f10),
                        repr(r.rho),
                        r.regime,
                        repr(r.wall_time_ms),
                        r.status,
                        r.error,
                    ]
                )
            for cls, metrics in report.per_class.items():
                writer.writerow(
                    ["class_mean", cls, "", "", repr(metrics["auc"]), repr(metrics["f01"]),
                     repr(metrics["f10"]), repr(metrics["rho"]), "", "", "", ""]
                )
            g = report.grand
            writer.writerow(
                ["grand_mean", "", "", "", repr(g["auc"]), repr(g["f01"]),
                 repr(g["f10"]), repr(g["rho"]), "", "", "", ""]
            )
    else:
        raise ValueError(f"unknown report format {format!r}")


def load_report(path) -> ExperimentReport:
    """Load a JSON report written by export_report."""
    with open(path) as f:
        payload = json.load(f)
    if payload.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema {payload.get('schema_version')!r}")
    records = [CellRecord(**r) for r in payload["records"]]
    return ExperimentReport(
        records=records,
        per_class=payload["aggregates"]["per_class"],
        grand=payload["aggregates"]["grand"],
        detector=payload["detector"],
        gammas=tuple(payload["gammas"]),
        seeds_per_cell=payload["seeds_per_cell"],
        master_seed=payload["master_seed"],
        schema_version=payload["schema_version"],
    )
