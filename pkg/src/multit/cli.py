"""Command-line interface: score, bench, synth, convert."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import MultiTError
from .harness import (
    DEFAULT_GAMMA_GRID,
    DETECTOR_CHOICES,
    build_target,  # noqa: F401  (re-exported for scripting convenience)
    detector_scores,
    export_report,
    read_features_csv,
    read_idx,
    run_experiment,
    synth_benchmark,
    write_features_csv,
)
from .multi_t import DEFAULT_MAX_ITER, run_multi_t


def _parse_gamma_grid(text: str) -> tuple[float, ...]:
    try:
        grid = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad gamma grid {text!r}") from None
    if not grid or not all(0.0 < g < 1.0 for g in grid):
        raise argparse.ArgumentTypeError("gamma grid values must lie in (0, 1)")
    return grid


def _parse_classes(text: str) -> list:
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            out.append(int(item))
        except ValueError:
            out.append(item)
    return out


def _load_dataset(args):
    if args.input:
        return read_features_csv(args.input)
    if args.idx_images and args.idx_labels:
        return read_idx(args.idx_images, args.idx_labels)
    raise MultiTError("provide --input CSV or both --idx-images and --idx-labels")


def _add_io_arguments(parser, idx: bool = True) -> None:
    parser.add_argument("--input", help="feature CSV (class,f0,f1,...)")
    if idx:
        parser.add_argument("--idx-images", help="IDX image file (optionally gzipped)")
        parser.add_argument("--idx-labels", help="IDX label file (optionally gzipped)")


def cmd_score(args) -> int:
    dataset = _load_dataset(args)
    result = run_multi_t(dataset.features, max_iter=args.max_iter)
    scores = detector_scores(args.detector, dataset.features, result, knn_k=args.knn_k)
    if args.format == "json":
        payload = {
            "n": int(dataset.features.shape[0]),
            "thresholds": {
                "phi_in": result.phi_in,
                "phi_out": result.phi_out,
                "phi_out_first": result.phi_out_first,
                "phi_out_star": result.phi_out_star,
                "phi_out_zero": result.phi_out_zero,
            },
            "rho": result.rho,
            "regime": result.regime.value,
            "iterations": result.iterations,
            "fallbacks": result.fallbacks,
            "detector": args.detector,
            "scores": scores.tolist(),
            "initial_scores": result.initial_scores.tolist(),
            "inlier_idx": result.inlier_idx.tolist(),
            "outlier_idx": result.outlier_idx.tolist(),
        }
        text = json.dumps(payload, indent=2) + "\n"
        if args.out:
            with open(args.out, "w") as f:
                f.write(text)
        else:
            sys.stdout.write(text)
    else:
        import csv as _csv

        inlier = set(result.inlier_idx.tolist())
        outlier = set(result.outlier_idx.tolist())
        out = open(args.out, "w", newline="") if args.out else sys.stdout
        try:
            writer = _csv.writer(out)
            writer.writerow(["index", "initial_score", "score", "pred_inlier", "pred_outlier"])
            for i in range(dataset.features.shape[0]):
                writer.writerow(
                    [i, repr(result.initial_scores[i]), repr(float(scores[i])),
                     int(i in inlier), int(i in outlier)]
                )
        finally:
            if args.out:
                out.close()
    return 0


def cmd_bench(args) -> int:
    dataset = _load_dataset(args)
    classes = _parse_classes(args.classes) if args.classes else None
    report = run_experiment(
        dataset,
        classes=classes,
        gammas=args.gamma_grid,
        seeds_per_cell=args.seeds_per_cell,
        master_seed=args.seed,
        detector=args.detector,
        knn_k=args.knn_k,
        max_iter=args.max_iter,
    )
    export_report(report, args.out, format=args.format)
    failed = len(report.failed_cells)
    print(
        f"bench: {len(report.records)} cells ({failed} failed), "
        f"grand mean AUC={report.grand['auc']:.4f} "
        f"F0.1={report.grand['f01']:.4f} F10={report.grand['f10']:.4f} -> {args.out}"
    )
    return 0


def cmd_synth(args) -> int:
    dataset = synth_benchmark(
        n_in=args.n_in,
        n_out_pool=args.n_out_pool,
        d=args.d,
        spread=args.spread,
        seed=args.seed,
        n_clusters=args.n_clusters,
        outlier_sigma=args.outlier_sigma,
        center_scale=args.center_scale,
    )
    write_features_csv(dataset, args.out)
    print(f"synth: wrote {dataset.features.shape[0]} x {dataset.features.shape[1]} -> {args.out}")
    return 0


def cmd_convert(args) -> int:
    dataset = read_idx(args.idx_images, args.idx_labels)
    write_features_csv(dataset, args.out)
    print(
        f"convert: wrote {dataset.features.shape[0]} x {dataset.features.shape[1]} -> {args.out}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multit",
        description="Multiple-thresholding pipeline for unsupervised outlier detection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score a feature file, emit thresholds and labels")
    _add_io_arguments(p_score)
    p_score.add_argument("--detector", choices=DETECTOR_CHOICES, default="multi-t")
    p_score.add_argument("--knn-k", type=int, default=5)
    p_score.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p_score.add_argument("--format", choices=("json", "csv"), default="json")
    p_score.add_argument("--out", help="output path (stdout if omitted)")
    p_score.set_defaults(func=cmd_score)

    p_bench = sub.add_parser("bench", help="run the benchmark grid, export a report")
    _add_io_arguments(p_bench)
    p_bench.add_argument("--classes", help="comma-separated inlier classes (default: all)")
    p_bench.add_argument(
        "--gamma-grid",
        type=_parse_gamma_grid,
        default=DEFAULT_GAMMA_GRID,
        help="comma-separated contamination ratios (default 0.05,0.1,0.2,0.3,0.4)",
    )
    p_bench.add_argument("--seeds-per-cell", type=int, default=3)
    p_bench.add_argument("--seed", type=int, default=0, help="master seed")
    p_bench.add_argument("--detector", choices=DETECTOR_CHOICES, default="multi-t")
    p_bench.add_argument("--knn-k", type=int, default=5)
    p_bench.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p_bench.add_argument("--format", choices=("csv", "json"), default="json")
    p_bench.add_argument("--out", required=True)
    p_bench.set_defaults(func=cmd_bench)

    p_synth = sub.add_parser("synth", help="generate a synthetic labeled feature set")
    p_synth.add_argument("--n-in", type=int, required=True)
    p_synth.add_argument("--n-out-pool", type=int, required=True)
    p_synth.add_argument("--d", type=int, required=True)
    p_synth.add_argument("--spread", type=float, required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--n-clusters", type=int, default=4)
    p_synth.add_argument("--outlier-sigma", type=float, default=1.0)
    p_synth.add_argument("--center-scale", type=float, default=3.0)
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=cmd_synth)

    p_convert = sub.add_parser("convert", help="convert an IDX pair to feature CSV")
    p_convert.add_argument("--idx-images", required=True)
    p_convert.add_argument("--idx-labels", required=True)
    p_convert.add_argument("--out", required=True)
    p_convert.set_defaults(func=cmd_convert)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MultiTError, OSError, ValueError) as exc:
        print(f"multit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
