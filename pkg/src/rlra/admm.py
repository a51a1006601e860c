"""ADMM for restricted low-rank approximation.

Solves

    min ||X - target||_F^2   s.t.  rank(X) <= K,  X in C

by splitting ``X = Y`` and alternating a convex projection with a truncated
SVD. Two update orders are provided: ``"convex_first"`` (X carries the
convex set, Y the rank bound) and ``"rank_first"`` (roles swapped). U is the
scaled dual variable.
"""
import enum
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constraints import ConstraintSpec, Unconstrained, membership, project
from .errors import ValidationError
from .linalg import as_matrix, check_same_shape, numerical_rank, truncated_svd

logger = logging.getLogger(__name__)

CONVEX_FIRST = "convex_first"
RANK_FIRST = "rank_first"
ORDERS = (CONVEX_FIRST, RANK_FIRST)

RANK_TOL = 1e-6


class Termination(str, enum.Enum):
    CONVERGED = "converged"
    ITER_CAP = "iter_cap"
    STALLED = "stalled"


@dataclass(frozen=True, eq=False)
class RlraProblem:
    target: np.ndarray
    rank_bound: int
    constraint: ConstraintSpec = field(default_factory=Unconstrained)

    def __post_init__(self):
        target = as_matrix(self.target, "target")
        target.setflags(write=False)
        object.__setattr__(self, "target", target)
        K = self.rank_bound
        if int(K) != K or not 1 <= K <= min(target.shape):
            raise ValidationError(
                f"rank_bound must be an integer in [1, {min(target.shape)}], got {K}")
        object.__setattr__(self, "rank_bound", int(K))
        self.constraint.check_shape(target.shape)

    def is_feasible(self, X, tol=1e-6):
        """Both constraint classes hold: convex membership and rank <= K."""
        return (membership(self.constraint, X, tol)
                and numerical_rank(X, RANK_TOL) <= self.rank_bound)


@dataclass(frozen=True)
class AdmmConfig:
    """Solver settings.

    ``init`` is ``"tsvd"`` (Y0 = truncated SVD of the target), ``"zeros"``,
    ``"target"`` (Y0 = target), or an integer seed for a random Gaussian Y0.
    U0 is always zero and X0 = Y0.
    """

    rho: float = 5.0
    order: str = CONVEX_FIRST
    max_iters: int = 2000
    primal_tol: float = 1e-6
    dual_change_tol: float = 1e-6
    init: object = "tsvd"
    feasibility_tol: float = 1e-6

    def __post_init__(self):
        if not self.rho > 0:
            raise ValidationError("rho must be positive")
        if self.order not in ORDERS:
            raise ValidationError(f"order must be one of {ORDERS}, got {self.order!r}")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if not (self.primal_tol > 0 and self.dual_change_tol > 0 and self.feasibility_tol > 0):
            raise ValidationError("tolerances must be positive")
        if not (self.init in ("tsvd", "zeros", "target")
                or (isinstance(self.init, (int, np.integer)) and not isinstance(self.init, bool))):
            raise ValidationError(f"unknown init {self.init!r}")

    @property
    def alpha(self):
        return self.rho / (2.0 + self.rho)


@dataclass(frozen=True)
class AdmmState:
    X: np.ndarray
    Y: np.ndarray
    U: np.ndarray
    projection_converged: bool = True


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    objective: float
    primal_residual: float
    dual_change: float
    x_step: float
    x_feasible: bool
    y_feasible: bool
    projection_converged: bool = True


@dataclass
class SolveReport:
    """Outcome of :func:`admm_solve`.

    ``x_final``, ``y_final`` and ``u_final`` are the raw terminal iterates.
    ``solution`` is the extracted answer: the iterate that is convex-feasible
    by construction (X for convex-first, Y for rank-first); ``feasible`` says
    whether it also passed the rank check.
    """

    x_final: np.ndarray
    y_final: np.ndarray
    u_final: np.ndarray
    solution: np.ndarray
    feasible: bool
    trace: list
    termination: Termination
    config: AdmmConfig

    @property
    def iterations(self):
        return len(self.trace)

    @property
    def objective(self):
        return self.trace[-1].objective if self.trace else float("nan")

    @property
    def primal_residual(self):
        return self.trace[-1].primal_residual if self.trace else float("nan")


def x_update_target(target, Y, U, rho):
    """Blend ``(target + (rho/2)(Y - U)) / (1 + rho/2)``.

    Minimizing ``||X - target||^2 + (rho/2)||X - Y + U||^2`` over a set is
    the same as projecting this blend onto the set.
    """
    target = as_matrix(target, "target")
    Y = as_matrix(Y, "Y")
    U = as_matrix(U, "U")
    check_same_shape(target, Y, ("target", "Y"))
    check_same_shape(target, U, ("target", "U"))
    if not rho > 0:
        raise ValidationError("rho must be positive")
    h = 0.5 * rho
    return (target + h * (Y - U)) / (1.0 + h)


def augmented_objective(X, target, Y, U, rho):
    """``||X - target||_F^2 + (rho/2)||X - Y + U||_F^2``."""
    return float(np.sum((X - target) ** 2) + 0.5 * rho * np.sum((X - Y + U) ** 2))


def admm_step_convex_first(problem, state, config):
    blend = x_update_target(problem.target, state.Y, state.U, config.rho)
    proj = project(problem.constraint, blend)
    X = proj.point
    Y = truncated_svd(X + state.U, problem.rank_bound)
    U = state.U + X - Y
    return AdmmState(X, Y, U, proj.converged)


def admm_step_rank_first(problem, state, config):
    blend = x_update_target(problem.target, state.Y, state.U, config.rho)
    X = truncated_svd(blend, problem.rank_bound)
    proj = project(problem.constraint, X + state.U)
    Y = proj.point
    U = state.U + X - Y
    return AdmmState(X, Y, U, proj.converged)


_STEPS = {CONVEX_FIRST: admm_step_convex_first, RANK_FIRST: admm_step_rank_first}


def initial_state(problem, config):
    target = problem.target
    if config.init == "tsvd":
        Y = truncated_svd(target, problem.rank_bound)
    elif config.init == "zeros":
        Y = np.zeros_like(target)
    elif config.init == "target":
        Y = target.copy()
    else:
        rng = np.random.default_rng(int(config.init))
        scale = np.linalg.norm(target) / np.sqrt(target.size)
        Y = scale * rng.standard_normal(target.shape)
    return AdmmState(Y.copy(), Y, np.zeros_like(target))


def _feasibility(problem, X, Y, order, tol):
    # the rank variable is rank-feasible by construction; the convex variable
    # is convex-feasible unless an intersection projection hit its cap
    rank_var, convex_var = (Y, X) if order == CONVEX_FIRST else (X, Y)
    K = problem.rank_bound
    rank_var_ok = problem.constraint.contains(rank_var, tol)
    convex_var_ok = (problem.constraint.contains(convex_var, tol)
                     and numerical_rank(convex_var, RANK_TOL) <= K)
    if order == CONVEX_FIRST:
        return convex_var_ok, rank_var_ok
    return rank_var_ok, convex_var_ok


def admm_solve(problem, config=None, state=None):
    """Run ADMM until both residual tests pass or ``max_iters`` is reached.

    Stops when ``||X - Y||_F <= primal_tol`` and
    ``rho * ||Y_new - Y_old||_F <= dual_change_tol``. Never raises on
    non-convergence; the outcome is in ``SolveReport.termination``.
    """
    config = config or AdmmConfig()
    step = _STEPS[config.order]
    state = state or initial_state(problem, config)
    target = problem.target
    trace = []
    termination = Termination.ITER_CAP
    for k in range(1, config.max_iters + 1):
        new = step(problem, state, config)
        primal = float(np.linalg.norm(new.X - new.Y))
        dual_change = float(config.rho * np.linalg.norm(new.Y - state.Y))
        x_ok, y_ok = _feasibility(problem, new.X, new.Y, config.order, config.feasibility_tol)
        trace.append(IterationRecord(
            iter=k,
            objective=float(np.linalg.norm(new.X - target)),
            primal_residual=primal,
            dual_change=dual_change,
            x_step=float(np.linalg.norm(new.X - state.X)),
            x_feasible=x_ok,
            y_feasible=y_ok,
            projection_converged=new.projection_converged,
        ))
        if not new.projection_converged:
            logger.warning("iteration %d: constraint projection hit its sweep cap", k)
        state = new
        if k % 100 == 0:
            logger.debug("iter %d primal %.3e dual %.3e", k, primal, dual_change)
        if primal <= config.primal_tol and dual_change <= config.dual_change_tol:
            termination = Termination.CONVERGED
            break

    solution = state.X if config.order == CONVEX_FIRST else state.Y
    feasible = numerical_rank(solution, RANK_TOL) <= problem.rank_bound
    if not feasible and termination is Termination.CONVERGED:
        termination = Termination.STALLED
    feasible = feasible and problem.constraint.contains(solution, config.feasibility_tol)
    return SolveReport(
        x_final=state.X, y_final=state.Y, u_final=state.U,
        solution=solution.copy(), feasible=bool(feasible),
        trace=trace, termination=termination, config=config)


def recover_rank1_vector(X, psd_tol=1e-6):
    """Return ``x`` with ``outer(x, x)`` the best rank-1 PSD fit of ``X``.

    ``x = sqrt(lambda_1) * u_1`` from the top eigenpair, signed so that its
    first nonzero component is positive. Emits a RuntimeWarning when ``X`` is
    noticeably indefinite (min eigenvalue below ``-psd_tol * sigma_1``).
    """
    X = as_matrix(X, "X")
    if X.shape[0] != X.shape[1]:
        raise ValidationError(f"X must be square, got {X.shape}")
    scale = max(1.0, float(np.max(np.abs(X))))
    if np.max(np.abs(X - X.T)) > 1e-6 * scale:
        raise ValidationError("X must be symmetric")
    w, Q = np.linalg.eigh(0.5 * (X + X.T))
    sigma1 = float(np.max(np.abs(w)))
    if w[0] < -psd_tol * sigma1:
        warnings.warn(f"matrix is not PSD (min eigenvalue {w[0]:.3e})", RuntimeWarning,
                      stacklevel=2)
    u = Q[:, -1]
    nz = np.flatnonzero(np.abs(u) > 1e-12)
    if nz.size and u[nz[0]] < 0:
        u = -u
    return np.sqrt(max(w[-1], 0.0)) * u
