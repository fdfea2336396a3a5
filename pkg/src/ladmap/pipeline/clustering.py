"""Spectral clustering of the representation matrix.

Follows the usual post-processing for self-representation methods: build
the symmetric affinity (|Z| + |Z^T|)/2, embed with the bottom eigenvectors
of the symmetric normalized Laplacian, and run seeded k-means on the
row-normalized embedding.  Runs densely, so desk scale only.
"""

from __future__ import annotations

from typing import Union

import numpy as np
import scipy.linalg
from sklearn.cluster import KMeans

from ..linalg import Array, SkinnySvd


def cluster_from_Z(Z: Union[Array, SkinnySvd], s: int, seed: int = 0) -> Array:
    """Cluster the n points encoded by an n x n representation matrix."""
    Zd = Z.to_dense() if isinstance(Z, SkinnySvd) else np.asarray(Z, dtype=np.float64)
    if Zd.ndim != 2 or Zd.shape[0] != Zd.shape[1]:
        raise ValueError(f"Z must be square, got shape {Zd.shape}")
    n = Zd.shape[0]
    if s < 2:
        raise ValueError("need at least two clusters")
    if s > n:
        raise ValueError(f"cannot split {n} points into {s} clusters")

    W = 0.5 * (np.abs(Zd) + np.abs(Zd.T))
    deg = W.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(np.maximum(deg, 1e-12))
    L = np.eye(n) - inv_sqrt[:, None] * W * inv_sqrt[None, :]
    L = 0.5 * (L + L.T)
    _, vecs = scipy.linalg.eigh(L, subset_by_index=[0, s - 1])

    row_norm = np.linalg.norm(vecs, axis=1, keepdims=True)
    embedding = vecs / np.maximum(row_norm, 1e-12)
    km = KMeans(n_clusters=s, n_init=20, random_state=seed)
    return km.fit_predict(embedding)
