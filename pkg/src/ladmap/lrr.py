"""Low-rank representation solver: min ||Z||_* + mu*||E||_{2,1} s.t. X = XZ + E.

Two variants share the exact same iteration:

* ``standard``    forms the shrinkage target N_k densely each iteration and
  thresholds its spectrum through a dense SVD, which costs O(n^3).
* ``accelerated`` keeps Z in skinny-SVD form, represents N_k only through
  matrix-vector products against its component factors, and thresholds via
  the matrix-free Lanczos partial SVD with rank prediction, for O(r n^2)
  per iteration.

The error block E is updated by exact column shrinkage (its linear map is
the identity, so no linearization is needed); the Z block is the linearized
prox step with weight beta * eta_X.  The modes differ only in how the
partial SVD is evaluated, so they produce the same iterate sequence up to
SVD rounding.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .linalg import (Array, ImplicitOperator, SkinnySvd, check_matrix,
                     skinny_diff_norm, skinny_matmul_left, spectral_norm_sq)
from .prox import l21_shrink, svt
from .solver import (CONVERGED, MAX_ITER, ConvergenceTrace, LadmapConfig,
                     TraceRecord, kkt2_residual)

STANDARD = "standard"
ACCELERATED = "accelerated"

# The error block enters the constraint through the identity map.
ETA_E = 1.0


@dataclass(frozen=True)
class LrrProblem:
    """Data matrix, sparsity weight, and the linearization weight eta_X.

    ``eta_X`` must strictly exceed sigma_max(X)^2; use :meth:`from_data` to
    have it estimated and checked.
    """

    X: Array
    mu: float
    eta_X: float

    def __post_init__(self):
        X = check_matrix(self.X, "X")
        object.__setattr__(self, "X", X)
        if np.linalg.norm(X) == 0.0:
            raise ValueError("X must be nonzero: relative stopping residuals are undefined")
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if not (np.isfinite(self.eta_X) and self.eta_X > 0):
            raise ValueError("eta_X must be positive and finite")

    @classmethod
    def from_data(cls, X: Array, mu: float, eta_X: float | None = None,
                  eta_margin: float = 1.02, seed: int = 0) -> "LrrProblem":
        """Build a problem, estimating sigma_max(X)^2 by power iteration.

        Defaults to ``eta_X = 1.02 * sigma_max(X)^2``; an explicit ``eta_X``
        is checked against the estimate.
        """
        X = check_matrix(X, "X")
        s2 = spectral_norm_sq(X, tol=1e-8, rng=np.random.default_rng(seed))
        if eta_X is None:
            eta_X = eta_margin * s2
        elif not eta_X > s2:
            raise ValueError(f"eta_X={eta_X} does not exceed sigma_max(X)^2 ~ {s2}")
        return cls(X=X, mu=mu, eta_X=eta_X)

    @property
    def shape(self) -> tuple[int, int]:
        return self.X.shape


@dataclass
class LrrState:
    """Iterates: column-sparse error E, low-rank Z in factored form, multiplier."""

    E: Array
    Z: SkinnySvd
    Lambda: Array
    beta: float
    k: int = 0
    predicted_rank: int = 1


class LrrResult(NamedTuple):
    E: Array
    Z: SkinnySvd
    Lambda: Array
    state: LrrState
    trace: ConvergenceTrace
    status: str

    @property
    def iterations(self) -> int:
        return self.state.k


def initial_rank_prediction(n: int) -> int:
    return min(10, n)


def initial_lrr_state(problem: LrrProblem, config: LadmapConfig) -> LrrState:
    """All-zero iterates; beta0 defaults to min(m, n) * eps2."""
    m, n = problem.shape
    beta0 = config.beta0 if config.beta0 is not None else min(m, n) * config.eps2
    return LrrState(E=np.zeros((m, n)), Z=SkinnySvd.zero(n, n),
                    Lambda=np.zeros((m, n)), beta=beta0, k=0,
                    predicted_rank=initial_rank_prediction(n))


def compute_M(problem: LrrProblem, state: LrrState) -> Array:
    """Shrinkage target for the E step: M_k = X - X Z_k - Lambda_k / beta_k."""
    xz = skinny_matmul_left(problem.X, state.Z)
    return problem.X - xz - state.Lambda / state.beta


def update_E(problem: LrrProblem, state: LrrState, M_k: Array | None = None) -> Array:
    """Exact minimizer of mu*||E||_{2,1} + (beta/2)||E - M_k||^2."""
    if M_k is None:
        M_k = compute_M(problem, state)
    return l21_shrink(M_k, problem.mu / state.beta)


def nk_operator(problem: LrrProblem, state: LrrState, E_new: Array) -> ImplicitOperator:
    """Implicit N_k = Z_k - eta_X^{-1} X^T (X Z_k + E_new - X + Lambda_k/beta_k).

    Applications multiply against the component factors only; neither N_k
    nor X^T(...) is ever formed densely.  Each product costs O(r n + m n).
    """
    X = problem.X
    inv_eta = 1.0 / problem.eta_X
    U, sigma, V = state.Z.U, state.Z.sigma, state.Z.V
    XU = X @ U  # (m, r); reused by every product
    G = E_new - X + state.Lambda / state.beta  # m x n, same footprint as E

    if state.Z.rank == 0:
        def apply(v: Array) -> Array:
            return -inv_eta * (X.T @ (G @ v))

        def apply_adjoint(u: Array) -> Array:
            return -inv_eta * (G.T @ (X @ u))
    else:
        def apply(v: Array) -> Array:
            w = sigma * (V.T @ v)
            return U @ w - inv_eta * (X.T @ (XU @ w + G @ v))

        def apply_adjoint(u: Array) -> Array:
            t = X @ u
            return V @ (sigma * (U.T @ u)) - inv_eta * (V @ (sigma * (XU.T @ t)) + G.T @ t)

    n = X.shape[1]
    return ImplicitOperator(rows=n, cols=n, apply=apply, apply_adjoint=apply_adjoint)


def dense_nk(problem: LrrProblem, state: LrrState, E_new: Array) -> Array:
    """Explicitly formed N_k for the standard (O(n^3)) path."""
    X = problem.X
    xz = skinny_matmul_left(X, state.Z)
    Zd = state.Z.to_dense()
    return Zd - (X.T @ (xz + E_new - X + state.Lambda / state.beta)) / problem.eta_X


class ZUpdate(NamedTuple):
    Z: SkinnySvd
    r_prime: int
    rank_used: int


def update_Z(problem: LrrProblem, state: LrrState, E_new: Array,
             mode: str = ACCELERATED, rng: np.random.Generator | None = None,
             svd_tol: float = 1e-10) -> ZUpdate:
    """Threshold the spectrum of N_k at (beta*eta_X)^{-1}.

    If every computed singular value exceeds the threshold the requested
    rank was too small; the rank doubles and the SVD is retried until the
    spectrum crosses the threshold or the full dimension is reached.
    """
    n = problem.shape[1]
    tau = 1.0 / (state.beta * problem.eta_X)
    if mode == ACCELERATED:
        target = nk_operator(problem, state, E_new)
    elif mode == STANDARD:
        target = dense_nk(problem, state, E_new)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    hint = max(1, min(state.predicted_rank, n))
    while True:
        res = svt(target, tau, hint, svd_tol=svd_tol, rng=rng)
        if not res.rank_hint_too_small or hint >= n:
            return ZUpdate(Z=res.Z, r_prime=res.kept, rank_used=hint)
        hint = min(n, 2 * hint)


def update_Lambda(problem: LrrProblem, state: LrrState, E_new: Array,
                  Z_new: SkinnySvd) -> Array:
    """Multiplier ascent Lambda + beta*(X Z_new + E_new - X), X Z in factored order."""
    resid = skinny_matmul_left(problem.X, Z_new) + E_new - problem.X
    return state.Lambda + state.beta * resid


def predict_rank(previous_r_prime: int, n: int, current_predicted: int) -> int:
    """Next partial-SVD rank request.

    When the threshold truncated strictly inside the computed spectrum the
    rank is well resolved: ask for one more.  Otherwise the spectrum may be
    under-computed: grow by 5% of the dimension.
    """
    if previous_r_prime < current_predicted:
        return min(previous_r_prime + 1, n)
    return min(previous_r_prime + math.ceil(0.05 * n), n)


def solve_lrr(problem: LrrProblem, config: LadmapConfig | None = None,
              mode: str = ACCELERATED, state: LrrState | None = None,
              callback: Callable[[LrrState], None] | None = None,
              ignore_stopping: bool = False) -> LrrResult:
    """Alternate E-shrinkage, spectral thresholding of N_k, and multiplier ascent.

    Stopping requires both  ||X Z + E - X|| / ||X|| < eps1  and
    beta * max(||dE||, sqrt(eta_X)*||dZ||) / ||X|| <= eps2.  With
    ``ignore_stopping`` the loop always runs ``max_iter`` iterations (used
    for reference solutions).
    """
    if config is None:
        config = LadmapConfig()
    config.validate()
    if mode not in (STANDARD, ACCELERATED):
        raise ValueError(f"unknown mode {mode!r}")
    if state is None:
        state = initial_lrr_state(problem, config)
    X = problem.X
    x_norm = float(np.linalg.norm(X))
    rng = np.random.default_rng(config.seed)

    trace = ConvergenceTrace()
    status = MAX_ITER
    for _ in range(config.max_iter):
        t0 = time.perf_counter()
        beta = state.beta
        M_k = compute_M(problem, state)
        E_new = l21_shrink(M_k, problem.mu / beta)
        z_up = update_Z(problem, state, E_new, mode=mode, rng=rng)
        Z_new = z_up.Z

        resid = skinny_matmul_left(X, Z_new) + E_new - X
        Lambda_new = state.Lambda + beta * resid

        feas_res = float(np.linalg.norm(resid)) / x_norm
        dE = float(np.linalg.norm(E_new - state.E))
        dZ = skinny_diff_norm(Z_new, state.Z)
        kkt2 = kkt2_residual(beta, ETA_E, problem.eta_X, dE, dZ, x_norm)

        rho = config.rho0 if kkt2 < config.eps2 else 1.0
        beta_new = min(config.beta_max, rho * beta)

        state = LrrState(E=E_new, Z=Z_new, Lambda=Lambda_new, beta=beta_new,
                         k=state.k + 1,
                         predicted_rank=predict_rank(z_up.r_prime, X.shape[1], z_up.rank_used))
        objective = Z_new.norm_nuclear() + problem.mu * float(np.sum(np.linalg.norm(E_new, axis=0)))
        trace.append(TraceRecord(k=state.k, feas_res=feas_res, kkt2_res=kkt2,
                                 beta=beta, time_ms=(time.perf_counter() - t0) * 1e3,
                                 objective=objective, rank=Z_new.rank))
        if callback is not None:
            callback(state)
        if not ignore_stopping and feas_res < config.eps1 and kkt2 <= config.eps2:
            status = CONVERGED
            break
    return LrrResult(E=state.E, Z=state.Z, Lambda=state.Lambda, state=state,
                     trace=trace, status=status)


def as_separable_problem(problem: LrrProblem, eta_E: float = 1.02):
    """Adapter exposing the low-rank model to the generic engine.

    The first block is E (identity map, column shrinkage), the second is Z
    as a dense array (map Z -> X Z, spectral thresholding).  Intended for
    small instances; Z is handled densely here.

    Returns the problem together with the matching (eta_A, eta_B) pair;
    eta_E must be strictly above 1 for the generic engine's step-size check.
    """
    from .solver import SeparableProblem

    X = problem.X
    m, n = X.shape

    def prox_f(point: Array, weight: float) -> Array:
        return l21_shrink(point, problem.mu / weight)

    def prox_g(point: Array, weight: float) -> Array:
        return svt(point, 1.0 / weight, min(point.shape)).Z.to_dense()

    norm_B_sq = spectral_norm_sq(X, tol=1e-8)
    sep = SeparableProblem(
        apply_A=lambda E: E,
        adjoint_A=lambda L: L,
        apply_B=lambda Z: X @ Z,
        adjoint_B=lambda L: X.T @ L,
        c=X.copy(),
        prox_f=prox_f,
        prox_g=prox_g,
        norm_A_sq_bound=1.0,
        norm_B_sq_bound=norm_B_sq,
        x_shape=(m, n),
        y_shape=(n, n),
        f_value=lambda E: problem.mu * float(np.sum(np.linalg.norm(E, axis=0))),
        g_value=lambda Z: float(np.sum(np.linalg.svd(Z, compute_uv=False))),
    )
    return sep, eta_E, problem.eta_X
