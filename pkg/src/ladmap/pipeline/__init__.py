"""Synthetic data, ground truth, metrics, clustering, benchmarks and matrix I/O."""

from .bench import BenchRow, format_table, run_benchmark, write_bench_csv
from .clustering import cluster_from_Z
from .groundtruth import GroundTruth, ground_truth
from .matio import load_labels, load_matrix, save_labels, save_matrix
from .metrics import accuracy, relative_errors
from .synthetic import Dataset, SyntheticSpec, gen_synthetic

__all__ = [
    "BenchRow", "Dataset", "GroundTruth", "SyntheticSpec", "accuracy",
    "cluster_from_Z", "format_table", "gen_synthetic", "ground_truth",
    "load_labels", "load_matrix", "relative_errors", "run_benchmark",
    "save_labels", "save_matrix", "write_bench_csv",
]
