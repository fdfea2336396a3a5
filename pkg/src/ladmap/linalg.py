"""Dense matrix primitives, spectral-norm estimation, and partial SVD.

Matrices are plain float64 ``numpy`` arrays.  Low-rank matrices are kept in
factored form (:class:`SkinnySvd`) and large operators are represented only
through their matrix-vector products (:class:`ImplicitOperator`), so the
leading singular triplets can be computed without ever materializing the
operator as a dense array.

All objects here are immutable after construction and safe to share across
threads for read-only use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

Array = np.ndarray


class ConvergenceError(RuntimeError):
    """Iterative routine hit its step cap before reaching the tolerance.

    Carries the best factorization found so far in ``best``.
    """

    def __init__(self, message: str, best: "SkinnySvd"):
        super().__init__(message)
        self.best = best


def check_matrix(M: Array, name: str = "matrix") -> Array:
    """Validate a dense matrix: 2-D, nonempty, finite. Returns float64 view."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ValueError(f"{name} must be a nonempty 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


@dataclass(frozen=True)
class SkinnySvd:
    """Low-rank matrix stored as its thin SVD ``U @ diag(sigma) @ V.T``.

    ``U`` is (rows, r), ``sigma`` is (r,) positive and non-increasing, ``V``
    is (cols, r).  ``r = 0`` represents the zero matrix.
    """

    U: Array
    sigma: Array
    V: Array

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SkinnySvd":
        return cls(np.zeros((rows, 0)), np.zeros(0), np.zeros((cols, 0)))

    @property
    def rank(self) -> int:
        return self.sigma.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.U.shape[0], self.V.shape[0])

    def to_dense(self) -> Array:
        if self.rank == 0:
            return np.zeros(self.shape)
        return (self.U * self.sigma) @ self.V.T

    def norm_fro(self) -> float:
        # U, V orthonormal, so the Frobenius norm is that of the spectrum.
        return float(np.linalg.norm(self.sigma))

    def norm_nuclear(self) -> float:
        return float(np.sum(self.sigma))

    def validate(self, atol: float = 1e-10) -> None:
        """Check orthonormality of the factors and ordering of the spectrum."""
        r = self.rank
        if self.U.shape != (self.U.shape[0], r) or self.V.shape != (self.V.shape[0], r):
            raise ValueError("factor shapes inconsistent with rank")
        if r == 0:
            return
        if np.any(self.sigma <= 0) or np.any(np.diff(self.sigma) > 0):
            raise ValueError("sigma must be positive and non-increasing")
        du = np.max(np.abs(self.U.T @ self.U - np.eye(r)))
        dv = np.max(np.abs(self.V.T @ self.V - np.eye(r)))
        if du > atol or dv > atol:
            raise ValueError(f"factors not orthonormal (defects {du:.2e}, {dv:.2e})")


def skinny_inner(A: SkinnySvd, B: SkinnySvd) -> float:
    """Frobenius inner product <A, B> via r x r Gram products, O(r^2 n)."""
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    if A.rank == 0 or B.rank == 0:
        return 0.0
    G_u = A.U.T @ B.U
    G_v = A.V.T @ B.V
    return float(np.sum((A.sigma[:, None] * G_u * B.sigma[None, :]) * G_v))


def skinny_diff_norm(A: SkinnySvd, B: SkinnySvd) -> float:
    """Frobenius norm of A - B without densifying either factor."""
    sq = A.norm_fro() ** 2 + B.norm_fro() ** 2 - 2.0 * skinny_inner(A, B)
    return math.sqrt(max(sq, 0.0))


def skinny_matmul_left(X: Array, Z: SkinnySvd) -> Array:
    """Compute X @ Z strictly in factored order ((X U) Sigma) V^T.

    Cost O(r * rows(X) * cols(Z)); never forms Z densely.
    """
    X = check_matrix(X, "X")
    if X.shape[1] != Z.U.shape[0]:
        raise ValueError(f"dimension mismatch: X has {X.shape[1]} cols, Z has {Z.U.shape[0]} rows")
    if Z.rank == 0:
        return np.zeros((X.shape[0], Z.V.shape[0]))
    return ((X @ Z.U) * Z.sigma) @ Z.V.T


@dataclass(frozen=True)
class ImplicitOperator:
    """Linear operator given only by v -> N v and u -> N^T u products."""

    rows: int
    cols: int
    apply: Callable[[Array], Array]
    apply_adjoint: Callable[[Array], Array]

    @classmethod
    def from_dense(cls, M: Array) -> "ImplicitOperator":
        M = check_matrix(M, "operator matrix")
        return cls(M.shape[0], M.shape[1], lambda v: M @ v, lambda u: M.T @ u)

    def adjoint_gap(self, rng: np.random.Generator, probes: int = 10) -> float:
        """Largest relative defect of <Nv, u> = <v, N^T u> over random probes."""
        worst = 0.0
        for _ in range(probes):
            v = rng.standard_normal(self.cols)
            u = rng.standard_normal(self.rows)
            lhs = float(self.apply(v) @ u)
            rhs = float(v @ self.apply_adjoint(u))
            scale = max(abs(lhs), abs(rhs), 1e-30)
            worst = max(worst, abs(lhs - rhs) / scale)
        return worst


def spectral_norm_sq(X: Array, tol: float = 1e-6, max_iter: int = 1000,
                     rng: np.random.Generator | None = None) -> float:
    """Estimate sigma_max(X)^2 by power iteration on X^T X.

    The Rayleigh quotient of power iterates is non-decreasing for a
    positive-semidefinite operator, so the estimate approaches the true
    value from below.  Iteration stops once the relative gain stays under
    ``tol`` for three consecutive steps.  Deterministic for a given ``rng``
    state (a fresh seeded generator is used when none is passed).
    """
    X = check_matrix(X, "X")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if rng is None:
        rng = np.random.default_rng(0)
    v = rng.standard_normal(X.shape[1])
    nv = np.linalg.norm(v)
    if nv == 0.0:
        v = np.ones(X.shape[1])
        nv = np.linalg.norm(v)
    v /= nv
    est = 0.0
    quiet = 0
    for _ in range(max_iter):
        w = X @ v
        new_est = float(w @ w)
        if new_est == 0.0:
            return 0.0
        v = X.T @ w
        v /= np.linalg.norm(v)
        if new_est - est <= tol * new_est:
            quiet += 1
            if quiet >= 3:
                return new_est
        else:
            quiet = 0
        est = new_est
    return est


def _ritz_from_bidiagonal(alphas: list, betas: list):
    """Dense SVD of the accumulated upper-bidiagonal matrix."""
    j = len(alphas)
    B = np.zeros((j, j))
    B[np.arange(j), np.arange(j)] = alphas
    if j > 1:
        B[np.arange(j - 1), np.arange(1, j)] = betas[: j - 1]
    P, s, Qt = np.linalg.svd(B)
    return P, s, Qt.T


def lanczos_partial_svd(op: ImplicitOperator, k: int, tol: float = 1e-10,
                        rng: np.random.Generator | None = None,
                        max_steps: int | None = None) -> SkinnySvd:
    """Top-k singular triplets of an implicit operator.

    Golub-Kahan bidiagonalization with full reorthogonalization at every
    step.  The operator is only touched through ``apply``/``apply_adjoint``,
    never materialized.  A Ritz triplet counts as converged once its
    residual bound drops below ``tol`` times the current largest Ritz value.

    Returns a :class:`SkinnySvd` with at most k triplets; singular values
    that are exactly zero (rank-deficient operators) are dropped rather
    than reported, so the result may have rank < k.

    Raises
    ------
    ValueError
        if k exceeds the operator dimensions.
    ConvergenceError
        if the step cap (default 10k + 50) is reached first; the error
        carries the best triplets found so far.
    """
    m, n = op.rows, op.cols
    if not 1 <= k <= min(m, n):
        raise ValueError(f"k={k} out of range for a {m}x{n} operator")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if rng is None:
        rng = np.random.default_rng(0)
    cap = max_steps if max_steps is not None else 10 * k + 50
    j_limit = min(cap, min(m, n))

    # Right/left Lanczos bases, grown column by column.
    V = np.zeros((n, j_limit + 1))
    U = np.zeros((m, j_limit))
    alphas: list = []
    betas: list = []

    # A start vector annihilated by the operator only happens for (nearly)
    # zero operators; a few redraws distinguish that from bad luck.
    v = None
    for _ in range(4):
        cand = rng.standard_normal(n)
        cand /= np.linalg.norm(cand)
        if np.linalg.norm(op.apply(cand)) > 0.0:
            v = cand
            break
    if v is None:
        return SkinnySvd.zero(m, n)
    V[:, 0] = v

    exhausted = False
    j = 0
    while j < j_limit:
        p = op.apply(V[:, j])
        if j > 0:
            p -= betas[j - 1] * U[:, j - 1]
        # Full reorthogonalization against all existing left vectors.
        if j > 0:
            p -= U[:, :j] @ (U[:, :j].T @ p)
            p -= U[:, :j] @ (U[:, :j].T @ p)
        alpha = np.linalg.norm(p)
        if alpha <= 1e-14 * max(1.0, _spectral_scale(alphas, betas)):
            exhausted = True
            break
        U[:, j] = p / alpha
        alphas.append(float(alpha))

        r = op.apply_adjoint(U[:, j]) - alpha * V[:, j]
        r -= V[:, : j + 1] @ (V[:, : j + 1].T @ r)
        r -= V[:, : j + 1] @ (V[:, : j + 1].T @ r)
        beta = np.linalg.norm(r)
        j += 1
        if beta <= 1e-14 * max(1.0, _spectral_scale(alphas, betas)):
            exhausted = True
            break
        betas.append(float(beta))
        V[:, j] = r / beta

        # Convergence test on the residual bounds of the top-k Ritz values.
        if j >= k and (j % 3 == 0 or j == j_limit):
            P, s, Q = _ritz_from_bidiagonal(alphas, betas)
            if s[0] == 0.0:
                exhausted = True
                break
            res = beta * np.abs(P[j - 1, :k])
            if np.all(res <= tol * s[0]):
                return _assemble(U[:, :j], V[:, :j], P, s, Q, k)

    if j == 0:
        return SkinnySvd.zero(m, n)

    P, s, Q = _ritz_from_bidiagonal(alphas, betas)
    if exhausted or j == min(m, n):
        # Krylov space exhausted: the captured spectrum is exact and any
        # remaining singular values are zero.
        return _assemble(U[:, :j], V[:, :j], P, s, Q, min(k, j))
    best = _assemble(U[:, :j], V[:, :j], P, s, Q, min(k, j))
    raise ConvergenceError(
        f"partial SVD did not converge within {j_limit} bidiagonalization steps", best
    )


def _spectral_scale(alphas: list, betas: list) -> float:
    top = 0.0
    if alphas:
        top = max(top, max(alphas))
    if betas:
        top = max(top, max(betas))
    return top


def _assemble(U: Array, V: Array, P: Array, s: Array, Q: Array, k: int) -> SkinnySvd:
    """Lift the Ritz triplets of the small bidiagonal problem to full size."""
    keep = min(k, s.shape[0])
    sig = s[:keep]
    nz = int(np.sum(sig > max(sig[0] if keep else 0.0, 0.0) * 1e-15))
    sig = sig[:nz]
    if nz == 0:
        return SkinnySvd.zero(U.shape[0], V.shape[0])
    return SkinnySvd(U @ P[:, :nz], sig.copy(), V @ Q[:, :nz])
