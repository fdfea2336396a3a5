"""Generic linearized alternating direction engine with adaptive penalty.

Solves  min f(x) + g(y)  s.t.  A(x) + B(y) = c  for any separable problem
with proximable f, g and linear maps given by callables.  Each iteration
performs a linearized prox step on x, then on y, a multiplier ascent step,
and the adaptive penalty update; it stops when both the feasibility
residual and the iterate-change (KKT-2) residual fall below their
tolerances.

A solver run owns its state and is single threaded; independent runs may
execute concurrently.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .linalg import Array

CONVERGED = "converged"
MAX_ITER = "max_iter"


@dataclass
class SeparableProblem:
    """Two-block problem data: linear maps with adjoints, target, prox oracles.

    ``prox_f(point, weight)`` must return argmin_x f(x) + (weight/2)||x - point||^2,
    and likewise ``prox_g``.  ``norm_A_sq_bound`` / ``norm_B_sq_bound`` are
    upper bounds on the squared operator norms of A and B.
    """

    apply_A: Callable[[Array], Array]
    adjoint_A: Callable[[Array], Array]
    apply_B: Callable[[Array], Array]
    adjoint_B: Callable[[Array], Array]
    c: Array
    prox_f: Callable[[Array, float], Array]
    prox_g: Callable[[Array, float], Array]
    norm_A_sq_bound: float
    norm_B_sq_bound: float
    x_shape: tuple
    y_shape: tuple
    f_value: Optional[Callable[[Array], float]] = None
    g_value: Optional[Callable[[Array], float]] = None

    def c_norm(self) -> float:
        return float(np.linalg.norm(self.c))

    def objective(self, x: Array, y: Array) -> Optional[float]:
        if self.f_value is None or self.g_value is None:
            return None
        return float(self.f_value(x) + self.g_value(y))


def default_beta0(c: Array, eps2: float) -> float:
    """Initial penalty proportional to eps2, scaled by the smaller dimension of c."""
    shape = np.atleast_2d(c).shape
    return min(shape) * eps2


@dataclass
class LadmapConfig:
    """Tolerances, penalty schedule and linearization weights.

    ``beta0 = None`` resolves to ``min(rows, cols) of c * eps2`` at solve
    time.  ``eta_A`` / ``eta_B`` must strictly exceed the squared operator
    norms of the corresponding maps (checked against the problem's declared
    bounds when the solver starts).
    """

    eta_A: float | None = None
    eta_B: float | None = None
    eps1: float = 1e-4
    eps2: float = 1e-5
    beta0: float | None = None
    beta_max: float = 1e10
    rho0: float = 1.9
    max_iter: int = 2000
    seed: int = 0

    def validate(self) -> None:
        if not self.eps1 > 0 or not self.eps2 > 0:
            raise ValueError("eps1 and eps2 must be positive")
        if self.beta0 is not None and not self.beta0 > 0:
            raise ValueError("beta0 must be positive")
        if self.beta0 is not None and self.beta_max < self.beta0:
            raise ValueError("beta_max must be at least beta0")
        if self.rho0 < 1:
            raise ValueError("rho0 must be at least 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


@dataclass
class LadmapState:
    x: Array
    y: Array
    lam: Array
    beta: float
    k: int = 0


@dataclass
class TraceRecord:
    k: int
    feas_res: float
    kkt2_res: float
    beta: float
    time_ms: float
    objective: Optional[float] = None
    rank: Optional[int] = None


@dataclass
class ConvergenceTrace:
    """Append-only per-iteration diagnostics."""

    records: list = field(default_factory=list)

    def append(self, rec: TraceRecord) -> None:
        self.records.append(rec)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "feas_res", "kkt2_res", "beta", "time_ms", "objective"])
            for r in self.records:
                obj = "" if r.objective is None else f"{r.objective:.17g}"
                w.writerow([r.k, f"{r.feas_res:.17g}", f"{r.kkt2_res:.17g}",
                            f"{r.beta:.17g}", f"{r.time_ms:.6f}", obj])


class StopCheck(NamedTuple):
    feasibility_ok: bool
    kkt2_ok: bool
    feas_res: float
    kkt2_res: float


class SolveResult(NamedTuple):
    state: LadmapState
    trace: ConvergenceTrace
    status: str


def update_x(problem: SeparableProblem, config: LadmapConfig, state: LadmapState) -> Array:
    """Linearized prox step on the first block."""
    beta, eta = state.beta, config.eta_A
    resid = problem.apply_A(state.x) + problem.apply_B(state.y) - problem.c
    point = state.x - problem.adjoint_A(state.lam + beta * resid) / (beta * eta)
    return problem.prox_f(point, beta * eta)


def update_y(problem: SeparableProblem, config: LadmapConfig, state: LadmapState,
             x_new: Array) -> Array:
    """Linearized prox step on the second block, using the fresh x."""
    beta, eta = state.beta, config.eta_B
    resid = problem.apply_A(x_new) + problem.apply_B(state.y) - problem.c
    point = state.y - problem.adjoint_B(state.lam + beta * resid) / (beta * eta)
    return problem.prox_g(point, beta * eta)


def update_lambda(problem: SeparableProblem, state: LadmapState,
                  x_new: Array, y_new: Array) -> Array:
    """Multiplier ascent on the constraint residual."""
    resid = problem.apply_A(x_new) + problem.apply_B(y_new) - problem.c
    return state.lam + state.beta * resid


def kkt2_residual(beta: float, eta_A: float, eta_B: float,
                  dx_norm: float, dy_norm: float, c_norm: float) -> float:
    return beta * max(math.sqrt(eta_A) * dx_norm, math.sqrt(eta_B) * dy_norm) / c_norm


def update_beta(config: LadmapConfig, beta: float, dx_norm: float, dy_norm: float,
                c_norm: float) -> float:
    """Adaptive penalty: grow by rho0 only while the iterates barely move.

    The growth condition is strict (<), whereas the stopping rule on the
    same quantity is non-strict (<=).
    """
    q = kkt2_residual(beta, config.eta_A, config.eta_B, dx_norm, dy_norm, c_norm)
    rho = config.rho0 if q < config.eps2 else 1.0
    return min(config.beta_max, rho * beta)


def check_stop(problem: SeparableProblem, config: LadmapConfig, state: LadmapState,
               x_new: Array, y_new: Array) -> StopCheck:
    """Evaluate both stopping residuals for the freshly updated iterates."""
    c_norm = problem.c_norm()
    feas = float(np.linalg.norm(problem.apply_A(x_new) + problem.apply_B(y_new) - problem.c))
    feas_res = feas / c_norm
    dx = float(np.linalg.norm(x_new - state.x))
    dy = float(np.linalg.norm(y_new - state.y))
    q = kkt2_residual(state.beta, config.eta_A, config.eta_B, dx, dy, c_norm)
    return StopCheck(feas_res < config.eps1, q <= config.eps2, feas_res, q)


def initial_state(problem: SeparableProblem, config: LadmapConfig) -> LadmapState:
    beta0 = config.beta0 if config.beta0 is not None else default_beta0(problem.c, config.eps2)
    return LadmapState(x=np.zeros(problem.x_shape), y=np.zeros(problem.y_shape),
                       lam=np.zeros(problem.c.shape), beta=beta0, k=0)


def solve(problem: SeparableProblem, config: LadmapConfig,
          state: LadmapState | None = None,
          callback: Callable[[LadmapState], None] | None = None) -> SolveResult:
    """Run the alternating updates until both stopping criteria hold.

    Returns the final state, the per-iteration trace and a status that is
    ``"converged"`` or ``"max_iter"``; hitting the iteration cap is a
    status, not an exception.
    """
    config.validate()
    if config.eta_A is None or config.eta_B is None:
        raise ValueError("eta_A and eta_B are required for the generic engine")
    if not config.eta_A > problem.norm_A_sq_bound:
        raise ValueError(f"eta_A={config.eta_A} must exceed ||A||^2 bound {problem.norm_A_sq_bound}")
    if not config.eta_B > problem.norm_B_sq_bound:
        raise ValueError(f"eta_B={config.eta_B} must exceed ||B||^2 bound {problem.norm_B_sq_bound}")
    c_norm = problem.c_norm()
    if c_norm == 0.0:
        raise ValueError("the target c is zero: relative stopping residuals are undefined")
    if state is None:
        state = initial_state(problem, config)
    if not (state.beta > 0 and state.beta <= config.beta_max):
        raise ValueError("initial beta out of range")

    trace = ConvergenceTrace()
    status = MAX_ITER
    for _ in range(config.max_iter):
        t0 = time.perf_counter()
        x_new = update_x(problem, config, state)
        y_new = update_y(problem, config, state, x_new)
        lam_new = update_lambda(problem, state, x_new, y_new)
        stop = check_stop(problem, config, state, x_new, y_new)
        dx = float(np.linalg.norm(x_new - state.x))
        dy = float(np.linalg.norm(y_new - state.y))
        beta_used = state.beta
        beta_new = update_beta(config, state.beta, dx, dy, c_norm)
        state = LadmapState(x=x_new, y=y_new, lam=lam_new, beta=beta_new, k=state.k + 1)
        trace.append(TraceRecord(
            k=state.k, feas_res=stop.feas_res, kkt2_res=stop.kkt2_res,
            beta=beta_used, time_ms=(time.perf_counter() - t0) * 1e3,
            objective=problem.objective(x_new, y_new)))
        if callback is not None:
            callback(state)
        if stop.feasibility_ok and stop.kkt2_ok:
            status = CONVERGED
            break
    return SolveResult(state=state, trace=trace, status=status)
