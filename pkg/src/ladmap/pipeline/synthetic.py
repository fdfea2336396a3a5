"""Synthetic multi-subspace data with column corruption.

``s`` independent rank-``r_tilde`` subspaces are built by repeatedly
rotating a random orthonormal basis; ``p`` points are sampled from each
with unit-variance Gaussian coefficients, then a fraction of the columns
is corrupted by Gaussian noise scaled to the column norm.  Everything is
deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import Array


@dataclass(frozen=True)
class SyntheticSpec:
    """Generation parameters (s subspaces, p points each, ambient dim d, rank r_tilde)."""

    s: int
    p: int
    d: int
    r_tilde: int
    corrupt_frac: float = 0.2
    noise_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if min(self.s, self.p, self.d, self.r_tilde) < 1:
            raise ValueError("s, p, d and r_tilde must all be positive")
        if self.r_tilde > self.d:
            raise ValueError(f"subspace rank {self.r_tilde} exceeds ambient dimension {self.d}")
        if not 0.0 <= self.corrupt_frac <= 1.0:
            raise ValueError("corrupt_frac must lie in [0, 1]")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be nonnegative")

    @property
    def n_points(self) -> int:
        return self.s * self.p

    def label(self) -> str:
        return f"({self.s},{self.p},{self.d},{self.r_tilde})"


@dataclass(frozen=True)
class Dataset:
    """Data matrix (d x s*p, columns are points) with subspace labels."""

    X: Array
    labels: Array


def random_rotation(d: int, rng: np.random.Generator) -> Array:
    """Haar-like random orthogonal matrix with determinant +1."""
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, -1] = -Q[:, -1]
    return Q


def gen_synthetic(spec: SyntheticSpec) -> Dataset:
    """Generate the stacked data matrix and its ground-truth labels."""
    rng = np.random.default_rng(spec.seed)
    d, r, s, p = spec.d, spec.r_tilde, spec.s, spec.p

    U, _ = np.linalg.qr(rng.standard_normal((d, r)))
    T = random_rotation(d, rng)

    blocks = []
    labels = np.repeat(np.arange(s), p)
    for _ in range(s):
        Q = rng.standard_normal((r, p))
        blocks.append(U @ Q)
        U = T @ U
    X = np.hstack(blocks)

    n = s * p
    n_corrupt = int(np.floor(spec.corrupt_frac * n))
    if n_corrupt > 0 and spec.noise_scale > 0:
        idx = rng.choice(n, size=n_corrupt, replace=False)
        for j in idx:
            std = spec.noise_scale * np.linalg.norm(X[:, j])
            X[:, j] = X[:, j] + rng.normal(0.0, std, size=d)
    return Dataset(X=X, labels=labels)
