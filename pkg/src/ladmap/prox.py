"""Closed-form proximal operators: column shrinkage and singular value thresholding.

These are the two subproblem solvers every algorithm in this package relies
on.  Both are exact minimizers of their respective objectives:

* ``l21_shrink(M, eps)``  solves  argmin_W  eps*||W||_{2,1} + 1/2 ||W - M||^2
* ``svt(M, tau, r)``      solves  argmin_Z  tau*||Z||_*    + 1/2 ||Z - M||^2
  (restricted to the top-r spectrum when given an implicit operator)

Both are pure functions and safe for concurrent use.
"""

from __future__ import annotations

from typing import NamedTuple, Union

import numpy as np

from .linalg import Array, ImplicitOperator, SkinnySvd, check_matrix, lanczos_partial_svd


def l21_shrink(M: Array, eps: float) -> Array:
    """Column-wise shrinkage: scale column m_i by max(0, 1 - eps/||m_i||).

    Columns with norm at most ``eps`` collapse to zero.  ``eps = 0`` is the
    identity.
    """
    M = check_matrix(M, "M")
    if not (np.isfinite(eps) and eps >= 0):
        raise ValueError("shrinkage threshold must be finite and nonnegative")
    if eps == 0.0:
        return M.copy()
    norms = np.linalg.norm(M, axis=0)
    scale = np.zeros_like(norms)
    nz = norms > eps
    scale[nz] = 1.0 - eps / norms[nz]
    return M * scale


class SvtResult(NamedTuple):
    """Outcome of singular value thresholding.

    ``rank_hint_too_small`` is set when every computed singular value
    exceeded the threshold, i.e. the true shrunk rank may be larger than
    what was requested and the caller should retry with a bigger hint.
    """

    Z: SkinnySvd
    kept: int
    rank_hint_too_small: bool


def svt(M_or_op: Union[Array, ImplicitOperator], tau: float, rank_hint: int,
        svd_tol: float = 1e-10, rng: np.random.Generator | None = None) -> SvtResult:
    """Shrink the top-``rank_hint`` spectrum by ``tau``, dropping values <= tau.

    Dense input uses a dense SVD; an :class:`ImplicitOperator` goes through
    the matrix-free Lanczos partial SVD.  Values exactly equal to ``tau``
    are discarded (strict inequality).
    """
    if not (np.isfinite(tau) and tau >= 0):
        raise ValueError("tau must be finite and nonnegative")
    if rank_hint < 1:
        raise ValueError("rank_hint must be at least 1")
    if isinstance(M_or_op, ImplicitOperator):
        op = M_or_op
        if rank_hint > min(op.rows, op.cols):
            raise ValueError(f"rank_hint={rank_hint} exceeds operator size {op.rows}x{op.cols}")
        part = lanczos_partial_svd(op, rank_hint, tol=svd_tol, rng=rng)
        U, s, V = part.U, part.sigma, part.V
        shape = (op.rows, op.cols)
    else:
        M = check_matrix(M_or_op, "M")
        if rank_hint > min(M.shape):
            raise ValueError(f"rank_hint={rank_hint} exceeds matrix size {M.shape[0]}x{M.shape[1]}")
        Uf, sf, Vtf = np.linalg.svd(M, full_matrices=False)
        U, s, V = Uf[:, :rank_hint], sf[:rank_hint], Vtf[:rank_hint].T
        shape = M.shape

    # Every computed value above the threshold means the spectrum may not
    # have been resolved deep enough to see where the cut lands.
    kept = int(np.sum(s > tau))
    too_small = bool(s.shape[0] == rank_hint and kept == rank_hint)
    if kept == 0:
        return SvtResult(SkinnySvd.zero(*shape), 0, too_small)
    Z = SkinnySvd(U[:, :kept].copy(), s[:kept] - tau, V[:, :kept].copy())
    return SvtResult(Z, kept, too_small)


def l21_optimality_residual(W: Array, M: Array, eps: float) -> float:
    """Worst-column defect of the zero-subgradient condition of l21_shrink.

    For nonzero columns the condition is w - m + eps*w/||w|| = 0; zero
    columns require ||m|| <= eps.  Returns the largest violation.
    """
    worst = 0.0
    for i in range(M.shape[1]):
        w, m = W[:, i], M[:, i]
        nw = np.linalg.norm(w)
        if nw > 0:
            worst = max(worst, float(np.linalg.norm(w - m + eps * w / nw)))
        else:
            worst = max(worst, max(0.0, float(np.linalg.norm(m)) - eps))
    return worst


def nuclear_subgradient_residual(Z: SkinnySvd, D: Array) -> float:
    """Defect of D being a nuclear-norm subgradient at Z.

    Membership requires D = U V^T + W with U^T W = 0, W V = 0 and
    ||W||_2 <= 1, where Z = U diag(sigma) V^T with positive sigma.
    Densifies D's residual part, so intended for diagnostics at desk scale.
    """
    D = check_matrix(D, "D")
    if Z.rank == 0:
        # Subgradients at zero are exactly the unit spectral-norm ball.
        return max(0.0, float(np.linalg.norm(D, 2)) - 1.0)
    W = D - Z.U @ Z.V.T
    a = float(np.max(np.abs(Z.U.T @ W)))
    b = float(np.max(np.abs(W @ Z.V)))
    c = max(0.0, float(np.linalg.norm(W, 2)) - 1.0)
    return max(a, b, c)
