"""Solution-quality metrics: relative errors and permutation-optimal accuracy."""

from __future__ import annotations

import math
from typing import Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..linalg import Array, SkinnySvd, skinny_diff_norm

MatrixLike = Union[Array, SkinnySvd]


def _diff_norm(A: MatrixLike, B: MatrixLike) -> float:
    if isinstance(A, SkinnySvd) and isinstance(B, SkinnySvd):
        # Factored Gram products; no densification.
        return skinny_diff_norm(A, B)
    Ad = A.to_dense() if isinstance(A, SkinnySvd) else np.asarray(A)
    Bd = B.to_dense() if isinstance(B, SkinnySvd) else np.asarray(B)
    if Ad.shape != Bd.shape:
        raise ValueError(f"shape mismatch {Ad.shape} vs {Bd.shape}")
    return float(np.linalg.norm(Ad - Bd))


def _norm(A: MatrixLike) -> float:
    if isinstance(A, SkinnySvd):
        return A.norm_fro()
    return float(np.linalg.norm(A))


def relative_errors(E_hat: Array, Z_hat: MatrixLike,
                    E0: Array, Z0: MatrixLike) -> tuple[float, float]:
    """Frobenius-norm ratios (||Z_hat - Z0||/||Z0||, ||E_hat - E0||/||E0||)."""
    den_Z = _norm(Z0)
    den_E = _norm(E0)
    if den_Z == 0.0 or den_E == 0.0:
        raise ValueError("reference solution has zero norm: relative error undefined")
    rel_Z = _diff_norm(Z_hat, Z0) / den_Z
    rel_E = _diff_norm(E_hat, E0) / den_E
    return rel_Z, rel_E


def accuracy(pred_labels, true_labels) -> float:
    """Largest fraction of agreements over all relabelings of the prediction.

    Solved exactly as an assignment problem on the confusion matrix, so
    the result is invariant to permutations of either labeling.
    """
    pred = np.asarray(pred_labels)
    true = np.asarray(true_labels)
    if pred.shape != true.shape or pred.ndim != 1:
        raise ValueError("label vectors must be 1-D and of equal length")
    pred_ids = {v: i for i, v in enumerate(np.unique(pred))}
    true_ids = {v: i for i, v in enumerate(np.unique(true))}
    conf = np.zeros((len(pred_ids), len(true_ids)), dtype=np.int64)
    for a, b in zip(pred, true):
        conf[pred_ids[a], true_ids[b]] += 1
    rows, cols = linear_sum_assignment(conf, maximize=True)
    return float(conf[rows, cols].sum()) / pred.shape[0]
