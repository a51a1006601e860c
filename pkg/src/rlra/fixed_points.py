"""Fixed points of the rank-constrained primal map.

Once the scaled dual settles at some ``U_bar``, the rank-first primal update
reduces to

    H(X) = truncated_svd(alpha * X + (1 - alpha) * D, K)

with ``D = target - (rho/2) * U_bar`` and ``alpha = rho / (2 + rho)``. A
K-subset ``I`` of D's singular indices gives a fixed point
``sum_{i in I} sigma_i u_i v_i^T`` exactly when
``min_{i in I} sigma_i >= (1 - alpha) * max_{j not in I} sigma_j``, and every
fixed point arises this way. Fixed points are reported in the basis returned
by :func:`rlra.linalg.svd`; with repeated singular values other bases give
other, equally valid, fixed points.
"""
import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constraints import membership
from .errors import EnumerationError, ValidationError
from .linalg import as_matrix, check_same_shape, svd

ENUMERATION_CAP = 10**6
TIE_TOL = 1e-10


class IllDefinedWarning(RuntimeWarning):
    """The truncation inside H has a tie at sigma_K == sigma_{K+1}."""


@dataclass(frozen=True, eq=False)
class HMapContext:
    D: np.ndarray
    alpha: float
    K: int

    def __post_init__(self):
        D = as_matrix(self.D, "D")
        D.setflags(write=False)
        object.__setattr__(self, "D", D)
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.K) != self.K or not 1 <= self.K <= min(D.shape):
            raise ValidationError(f"K must be an integer in [1, {min(D.shape)}]")
        object.__setattr__(self, "K", int(self.K))

    @classmethod
    def from_solve(cls, target, u_final, rho, K):
        """Context built from a finished solve, using the terminal dual as U_bar."""
        target = as_matrix(target, "target")
        u_final = as_matrix(u_final, "u_final")
        check_same_shape(target, u_final, ("target", "u_final"))
        return cls(target - 0.5 * rho * u_final, rho / (2.0 + rho), K)


@dataclass(frozen=True)
class FixedPointSet:
    points: list
    index_subsets: list
    count_bound: int
    sigma: np.ndarray

    def __len__(self):
        return len(self.points)


def _h_step(X, ctx):
    blend = ctx.alpha * X + (1.0 - ctx.alpha) * ctx.D
    K = ctx.K
    if K >= min(blend.shape):
        return blend, False
    U, s, Vt = np.linalg.svd(blend, full_matrices=False)
    tie = s[K - 1] - s[K] <= TIE_TOL * max(1.0, s[0])
    return (U[:, :K] * s[:K]) @ Vt[:K], tie


def map_H(X, ctx):
    """Apply H once; warns with IllDefinedWarning on a truncation tie."""
    X = as_matrix(X, "X")
    check_same_shape(X, ctx.D, ("X", "D"))
    Y, tie = _h_step(X, ctx)
    if tie:
        warnings.warn("sigma_K == sigma_K+1; H is ill-defined here, "
                      "using the deterministic tie-break", IllDefinedWarning, stacklevel=2)
    return Y


def qualifying_subsets(sigma, K, alpha):
    """Lexicographic K-subsets (0-based) passing the fixed-point inequality."""
    n = len(sigma)
    out = []
    for subset in itertools.combinations(range(n), K):
        chosen = set(subset)
        rest = [sigma[j] for j in range(n) if j not in chosen]
        if not rest or min(sigma[i] for i in subset) >= (1.0 - alpha) * max(rest):
            out.append(subset)
    return out


def enumerate_fixed_points(ctx, cap=ENUMERATION_CAP):
    """All fixed points of H, one per qualifying subset of D's singular triples."""
    T = svd(ctx.D)
    n = len(T.sigma)
    bound = math.comb(n, ctx.K)
    if bound > cap:
        raise EnumerationError(
            f"{n} choose {ctx.K} = {bound} subsets exceeds the cap of {cap}; "
            "spot-check candidates with is_fixed_point instead")
    subsets = qualifying_subsets(T.sigma, ctx.K, ctx.alpha)
    points = []
    for subset in subsets:
        idx = list(subset)
        points.append((T.U[:, idx] * T.sigma[idx]) @ T.V[:, idx].T)
    return FixedPointSet(points, subsets, bound, T.sigma)


def is_fixed_point(X, ctx, tol=1e-9):
    X = as_matrix(X, "X")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllDefinedWarning)
        return bool(np.linalg.norm(map_H(X, ctx) - X) <= tol)


def candidate_limit_set(ctx, constraint, tol=1e-6):
    """Fixed points of H that also satisfy ``constraint``.

    An empty list means the primal iterates cannot converge for this D.
    """
    fps = enumerate_fixed_points(ctx)
    return [X for X in fps.points if membership(constraint, X, tol)]


def iterate_H(X0, ctx, max_iters=5000, tol=1e-13):
    """Iterate H from ``X0`` until a step of at most ``tol * (1 + ||D||)``.

    Returns ``(X, iterations, converged)``.
    """
    X = as_matrix(X0, "X0")
    check_same_shape(X, ctx.D, ("X0", "D"))
    thresh = tol * (1.0 + np.linalg.norm(ctx.D))
    for k in range(1, max_iters + 1):
        X_new, _ = _h_step(X, ctx)
        step = np.linalg.norm(X_new - X)
        X = X_new
        if step <= thresh:
            return X, k, True
    return X, max_iters, False
