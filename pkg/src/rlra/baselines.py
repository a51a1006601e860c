"""Comparison methods: alternating projections, plain truncated SVD, and NMF."""
from dataclasses import dataclass

import numpy as np

from .admm import RANK_TOL, Termination
from .constraints import membership, project
from .errors import ValidationError
from .linalg import as_matrix, numerical_rank, svd, truncated_svd


@dataclass
class BaselineReport:
    x_final: np.ndarray
    trace: list
    termination: Termination
    feasible: bool

    @property
    def objective(self):
        return self.trace[-1]


def _rlra_feasible(problem, X, tol=1e-6):
    return bool(membership(problem.constraint, X, tol)
                and numerical_rank(X, RANK_TOL) <= problem.rank_bound)


def adp_solve(problem, max_iters=2000, tol=1e-8):
    """Alternating direction projection.

    Starting from the target, repeat ``X <- P_C(truncated_svd(X, K))`` until
    successive iterates differ by at most ``tol``. The reported iterate is
    the convex-feasible one.
    """
    X = problem.target.copy()
    trace = []
    termination = Termination.ITER_CAP
    for _ in range(max_iters):
        X_new = project(problem.constraint, truncated_svd(X, problem.rank_bound)).point
        step = np.linalg.norm(X_new - X)
        X = X_new
        trace.append(float(np.linalg.norm(X - problem.target)))
        if step <= tol:
            termination = Termination.CONVERGED
            break
    return BaselineReport(X, trace, termination, _rlra_feasible(problem, X))


def tsvd_baseline(problem):
    """Unconstrained rank-K truncation; ``feasible`` reports the convex constraint."""
    X = truncated_svd(problem.target, problem.rank_bound)
    return BaselineReport(
        x_final=X,
        trace=[float(np.linalg.norm(X - problem.target))],
        termination=Termination.CONVERGED,
        feasible=bool(membership(problem.constraint, X, 1e-6)),
    )


def nmf_factors(target, K, seed=0, jitter=1e-2):
    """Non-negative starting factors from the absolute truncated SVD factors.

    A small seeded positive jitter keeps every entry strictly positive, since
    multiplicative updates can never move an exact zero.
    """
    T = svd(target)
    root = np.sqrt(T.sigma[:K])
    A = np.abs(T.U[:, :K]) * root
    B = (np.abs(T.V[:, :K]) * root).T
    rng = np.random.default_rng(seed)
    scale = jitter * max(float(np.mean(target)), np.finfo(float).eps)
    A = A + scale * rng.random(A.shape)
    B = B + scale * rng.random(B.shape)
    return A, B


def nmf_solve(target, K, max_iters=500, tol=1e-10, seed=0):
    """NMF ``target ~ A @ B`` with Lee-Seung multiplicative updates.

    Stops when the relative objective decrease over one iteration drops to
    ``tol`` or below. ``trace[k]`` is the unsquared Frobenius error after
    ``k + 1`` sweeps of updates; it is non-increasing.
    """
    V = as_matrix(target, "target")
    if np.any(V < 0):
        raise ValidationError("NMF target must be entrywise non-negative")
    if int(K) != K or not 1 <= K <= min(V.shape):
        raise ValidationError(f"K must be an integer in [1, {min(V.shape)}]")
    K = int(K)
    if max_iters < 1:
        raise ValidationError("max_iters must be >= 1")
    A, B = nmf_factors(V, K, seed)
    tiny = np.finfo(float).tiny
    prev = float(np.linalg.norm(V - A @ B))
    trace = []
    termination = Termination.ITER_CAP
    for _ in range(max_iters):
        B *= (A.T @ V) / np.maximum(A.T @ A @ B, tiny)
        A *= (V @ B.T) / np.maximum(A @ (B @ B.T), tiny)
        obj = float(np.linalg.norm(V - A @ B))
        trace.append(obj)
        if prev - obj <= tol * max(prev, tiny):
            termination = Termination.CONVERGED
            break
        prev = obj
    X = A @ B
    return BaselineReport(X, trace, termination, bool(np.all(X >= 0)))
