"""Reference solvers the adaptive linearized method is compared against.

* ``solve_adm_lrr``   classic alternating directions on the auxiliary-variable
  split  min ||J||_* + mu*||E||_{2,1}  s.t.  X = XZ + E, Z = J.  Needs an
  n x n linear solve per iteration; the factorization of I + X^T X is
  computed once and reused.
* ``solve_ladm_lrr``  the linearized iteration with the penalty frozen at
  2.5 / min(m, n) (no adaptive growth).
* ``solve_apg_lrr``   accelerated proximal gradient on the unconstrained
  relaxation  min beta*(||Z||_* + mu*||E||_{2,1}) + 1/2 ||X - XZ - E||^2
  with geometric continuation on beta.

ADM and APG keep Z as a dense array; they gain nothing from factored form.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg

from .linalg import Array, spectral_norm_sq
from .lrr import STANDARD, LrrProblem, LrrResult, solve_lrr
from .prox import l21_shrink, svt
from .solver import CONVERGED, MAX_ITER, ConvergenceTrace, LadmapConfig, TraceRecord


@dataclass
class AdmConfig:
    """Penalty schedule and tolerances for the auxiliary-variable solver.

    The growth schedule is a reconstruction (the classic solver's exact
    settings are not pinned down anywhere authoritative), so it is fully
    configurable.
    """

    eps1: float = 1e-4
    eps2: float = 1e-5
    beta0: float = 1e-6
    beta_max: float = 1e10
    rho: float = 1.1
    max_iter: int = 5000


class BaselineResult(NamedTuple):
    E: Array
    Z: Array
    trace: ConvergenceTrace
    status: str

    @property
    def iterations(self) -> int:
        return len(self.trace)


def solve_adm_lrr(problem: LrrProblem, config: AdmConfig | None = None) -> BaselineResult:
    """Classic ADM for the low-rank representation model.

    Update order per iteration: J (spectral shrinkage), Z (cached SPD
    solve), E (column shrinkage), then both multipliers and the penalty.
    Stops when ||XZ + E - X||/||X|| <= eps1 and
    max(||dE||, ||dZ||)/||X|| <= eps2.
    """
    if config is None:
        config = AdmConfig()
    X = problem.X
    m, n = X.shape
    mu = problem.mu
    x_norm = float(np.linalg.norm(X))

    # I + X^T X is symmetric positive definite; factor once, reuse every step.
    factor = scipy.linalg.cho_factor(np.eye(n) + X.T @ X)
    XtX = X.T @ X

    E = np.zeros((m, n))
    Z = np.zeros((n, n))
    J = np.zeros((n, n))
    L1 = np.zeros((m, n))  # multiplier for X - XZ - E = 0
    L2 = np.zeros((n, n))  # multiplier for Z - J = 0
    beta = config.beta0

    trace = ConvergenceTrace()
    status = MAX_ITER
    for k in range(config.max_iter):
        t0 = time.perf_counter()
        E_old, Z_old = E, Z

        J = svt(Z + L2 / beta, 1.0 / beta, n).Z.to_dense()
        rhs = X.T @ (X - E) + J + (X.T @ L1 - L2) / beta
        Z = scipy.linalg.cho_solve(factor, rhs)
        E = l21_shrink(X - X @ Z + L1 / beta, mu / beta)

        resid = X - X @ Z - E
        L1 = L1 + beta * resid
        L2 = L2 + beta * (Z - J)
        beta = min(config.beta_max, config.rho * beta)

        feas = float(np.linalg.norm(resid)) / x_norm
        change = max(float(np.linalg.norm(E - E_old)), float(np.linalg.norm(Z - Z_old))) / x_norm
        obj = float(np.sum(np.linalg.svd(Z, compute_uv=False))) \
            + mu * float(np.sum(np.linalg.norm(E, axis=0)))
        trace.append(TraceRecord(k=k + 1, feas_res=feas, kkt2_res=change, beta=beta,
                                 time_ms=(time.perf_counter() - t0) * 1e3, objective=obj))
        if feas <= config.eps1 and change <= config.eps2:
            status = CONVERGED
            break
    return BaselineResult(E=E, Z=Z, trace=trace, status=status)


def solve_ladm_lrr(problem: LrrProblem, config: LadmapConfig | None = None) -> LrrResult:
    """Linearized iteration with the penalty frozen at 2.5 / min(m, n).

    Identical body to the standard adaptive solver; freezing is achieved by
    clamping beta0 = beta_max and rho0 = 1.
    """
    if config is None:
        config = LadmapConfig()
    beta = 2.5 / min(problem.shape)
    frozen = replace(config, beta0=beta, beta_max=beta, rho0=1.0)
    return solve_lrr(problem, frozen, mode=STANDARD)


@dataclass
class ApgConfig:
    """Continuation schedule and step size for the proximal-gradient solver.

    ``tau`` is the Lipschitz constant of the smooth term; it defaults to
    sigma_max(X)^2 when built through :meth:`for_problem`.
    """

    tau: float
    beta0: float = 0.01
    beta_min: float = 1e-10
    theta: float = 0.9
    eps1: float = 1e-4
    eps2: float = 1e-5
    max_iter: int = 2000

    def __post_init__(self):
        if not self.beta0 > self.beta_min > 0:
            raise ValueError("need beta0 > beta_min > 0")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    @classmethod
    def for_problem(cls, problem: LrrProblem, **kwargs) -> "ApgConfig":
        tau = kwargs.pop("tau", None)
        if tau is None:
            tau = spectral_norm_sq(problem.X, tol=1e-8)
        return cls(tau=tau, **kwargs)


def solve_apg_lrr(problem: LrrProblem, config: ApgConfig | None = None) -> BaselineResult:
    """Accelerated proximal gradient on the relaxed model with continuation.

    Gradient of the smooth term at the extrapolated point, a joint prox
    step of size 1/tau (spectral shrinkage at beta/tau on the Z block,
    column shrinkage at beta*mu/tau on the E block), standard momentum,
    and beta shrinking geometrically toward beta_min.
    """
    if config is None:
        config = ApgConfig.for_problem(problem)
    X = problem.X
    m, n = X.shape
    mu, tau = problem.mu, config.tau
    x_norm = float(np.linalg.norm(X))

    Z = np.zeros((n, n))
    E = np.zeros((m, n))
    Z_prev, E_prev = Z, E
    Zt, Et = Z, E  # extrapolated points
    t_mom = 1.0
    beta = config.beta0

    trace = ConvergenceTrace()
    status = MAX_ITER
    for k in range(config.max_iter):
        t0 = time.perf_counter()
        R = X - X @ Zt - Et
        Z_new = svt(Zt + (X.T @ R) / tau, beta / tau, n).Z.to_dense()
        E_new = l21_shrink(Et + R / tau, beta * mu / tau)

        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_mom * t_mom))
        w = (t_mom - 1.0) / t_next
        Zt = Z_new + w * (Z_new - Z)
        Et = E_new + w * (E_new - E)
        Z_prev, E_prev = Z, E
        Z, E = Z_new, E_new
        t_mom = t_next
        beta_used = beta
        beta = max(config.beta_min, config.theta * beta)

        feas = float(np.linalg.norm(X - X @ Z - E)) / x_norm
        change = max(float(np.linalg.norm(E - E_prev)), float(np.linalg.norm(Z - Z_prev))) / x_norm
        obj = float(np.sum(np.linalg.svd(Z, compute_uv=False))) \
            + mu * float(np.sum(np.linalg.norm(E, axis=0)))
        trace.append(TraceRecord(k=k + 1, feas_res=feas, kkt2_res=change, beta=beta_used,
                                 time_ms=(time.perf_counter() - t0) * 1e3, objective=obj))
        if feas <= config.eps1 and change <= config.eps2:
            status = CONVERGED
            break
    return BaselineResult(E=E, Z=Z, trace=trace, status=status)
