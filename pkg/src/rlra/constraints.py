"""Convex constraint sets with exact Frobenius-norm projectors.

Each set is an immutable object exposing ``project_point`` (the Euclidean
projection) and ``contains`` (tolerance-based membership). The module-level
:func:`project` and :func:`membership` functions are the public entry points
and add shape validation; :class:`Intersection` composes sets using
Dykstra's cyclic projection scheme.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import as_matrix

DYKSTRA_TOL = 1e-10
DYKSTRA_MAX_SWEEPS = 1000


@dataclass(frozen=True)
class ProjectionResult:
    point: np.ndarray
    converged: bool = True
    inner_iterations: int = 0


class ConstraintSpec:
    """Base class for a convex set ``{X | g(X) <= 0}``."""

    #: Shape the set is tied to, or None if it applies to any shape.
    shape = None

    def check_shape(self, shape):
        if self.shape is not None and tuple(shape) != tuple(self.shape):
            raise ValidationError(
                f"{type(self).__name__} expects shape {self.shape}, got {tuple(shape)}")

    def project_point(self, M):
        raise NotImplementedError

    def contains(self, M, tol):
        raise NotImplementedError

    def project_full(self, M):
        return ProjectionResult(self.project_point(M))


@dataclass(frozen=True, eq=False)
class Unconstrained(ConstraintSpec):

    def project_point(self, M):
        return M.copy()

    def contains(self, M, tol):
        return True


@dataclass(frozen=True, eq=False)
class NonNegative(ConstraintSpec):

    def project_point(self, M):
        return np.maximum(M, 0.0)

    def contains(self, M, tol):
        return bool(np.min(M) >= -tol)


@dataclass(frozen=True, eq=False)
class Box(ConstraintSpec):
    """Entrywise bounds ``lo <= X <= hi``; bounds are scalars or full arrays."""

    lo: object = 0.0
    hi: object = 1.0

    def __post_init__(self):
        lo = np.array(self.lo, dtype=float)
        hi = np.array(self.hi, dtype=float)
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValidationError("Box bounds must not be NaN")
        if np.any(lo > hi):
            raise ValidationError("Box requires lo <= hi entrywise")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        shapes = {a.shape for a in (lo, hi) if a.ndim == 2}
        if len(shapes) > 1:
            raise ValidationError("Box lo and hi arrays disagree in shape")
        if shapes:
            object.__setattr__(self, "shape", shapes.pop())

    def project_point(self, M):
        return np.clip(M, self.lo, self.hi)

    def contains(self, M, tol):
        return bool(np.all(M >= self.lo - tol) and np.all(M <= self.hi + tol))


@dataclass(frozen=True, eq=False)
class FixedEntries(ConstraintSpec):
    """Pins ``X[mask] = values[mask]``.

    ``values`` may be a full array of the mask's shape or a 1-D array holding
    the pinned values in row-major mask order.
    """

    mask: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool)
        if mask.ndim != 2:
            raise ValidationError("FixedEntries mask must be 2-D")
        values = np.array(self.values, dtype=float)
        if values.shape != mask.shape:
            if values.ndim == 1 and values.size == mask.sum():
                full = np.zeros(mask.shape)
                full[mask] = values
                values = full
            else:
                raise ValidationError(
                    "FixedEntries values must match the mask shape or the number of pins")
        if not np.all(np.isfinite(values[mask])):
            raise ValidationError("FixedEntries values must be finite")
        values = np.where(mask, values, 0.0)
        mask.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "shape", mask.shape)

    @classmethod
    def from_entries(cls, shape, entries):
        """Build from an iterable of ``(row, col, value)`` triples."""
        mask = np.zeros(shape, dtype=bool)
        values = np.zeros(shape)
        for i, j, v in entries:
            mask[int(i), int(j)] = True
            values[int(i), int(j)] = v
        return cls(mask, values)

    def project_point(self, M):
        return np.where(self.mask, self.values, M)

    def contains(self, M, tol):
        if not self.mask.any():
            return True
        return bool(np.max(np.abs(M[self.mask] - self.values[self.mask])) <= tol)


def _average_diagonals(M, anti):
    m, n = M.shape
    A = M[:, ::-1] if anti else M
    out = np.empty_like(A)
    rows = np.arange(m)[:, None]
    cols = np.arange(n)[None, :]
    key = cols - rows + (m - 1)
    sums = np.bincount(key.ravel(), weights=A.ravel(), minlength=m + n - 1)
    counts = np.bincount(key.ravel(), minlength=m + n - 1)
    out[:] = (sums / counts)[key]
    return out[:, ::-1] if anti else out


@dataclass(frozen=True, eq=False)
class HankelStructure(ConstraintSpec):
    """Matrices constant along anti-diagonals; projection averages each one."""

    def project_point(self, M):
        return _average_diagonals(M, anti=True)

    def contains(self, M, tol):
        return bool(np.linalg.norm(M - self.project_point(M)) <= tol)


@dataclass(frozen=True, eq=False)
class ToeplitzStructure(ConstraintSpec):
    """Matrices constant along diagonals; projection averages each one."""

    def project_point(self, M):
        return _average_diagonals(M, anti=False)

    def contains(self, M, tol):
        return bool(np.linalg.norm(M - self.project_point(M)) <= tol)


@dataclass(frozen=True, eq=False)
class PsdCone(ConstraintSpec):
    """Symmetric positive semidefinite matrices.

    The input is symmetrized before the eigenvalue clip, so the projection is
    the exact one onto the PSD cone within the space of all square matrices.
    """

    def check_shape(self, shape):
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValidationError(f"PsdCone needs a square matrix, got shape {tuple(shape)}")

    def project_point(self, M):
        S = 0.5 * (M + M.T)
        w, Q = np.linalg.eigh(S)
        P = (Q * np.maximum(w, 0.0)) @ Q.T
        return 0.5 * (P + P.T)

    def contains(self, M, tol):
        if np.linalg.norm(M - M.T) > tol:
            return False
        return bool(np.linalg.eigvalsh(0.5 * (M + M.T))[0] >= -tol)


def _trace_fields(obj):
    A = np.array(obj.A, dtype=float)
    if A.ndim != 2 or not np.all(np.isfinite(A)):
        raise ValidationError("trace constraint matrix A must be a finite 2-D array")
    if not np.any(A):
        raise ValidationError("trace constraint matrix A must be nonzero")
    b = float(obj.b)
    if not np.isfinite(b):
        raise ValidationError("trace constraint offset b must be finite")
    A.setflags(write=False)
    object.__setattr__(obj, "A", A)
    object.__setattr__(obj, "b", b)
    object.__setattr__(obj, "shape", A.shape)


@dataclass(frozen=True, eq=False)
class TraceHyperplane(ConstraintSpec):
    """``<A, X> = b`` where ``<A, X> = trace(A.T X)``."""

    A: np.ndarray
    b: float

    def __post_init__(self):
        _trace_fields(self)

    def project_point(self, M):
        gap = np.vdot(self.A, M) - self.b
        return M - (gap / np.vdot(self.A, self.A)) * self.A

    def contains(self, M, tol):
        return bool(abs(np.vdot(self.A, M) - self.b) <= tol)


@dataclass(frozen=True, eq=False)
class TraceHalfSpace(ConstraintSpec):
    """``<A, X> >= b``."""

    A: np.ndarray
    b: float

    def __post_init__(self):
        _trace_fields(self)

    def project_point(self, M):
        gap = np.vdot(self.A, M) - self.b
        if gap >= 0:
            return M.copy()
        return M - (gap / np.vdot(self.A, self.A)) * self.A

    def contains(self, M, tol):
        return bool(np.vdot(self.A, M) >= self.b - tol)


@dataclass(frozen=True, eq=False)
class Intersection(ConstraintSpec):
    """Intersection of convex sets, projected with Dykstra's algorithm.

    Iteration stops once one full sweep changes the iterate and all
    correction terms by at most ``tol`` (joint Frobenius norm), or after
    ``max_sweeps`` sweeps.
    """

    sets: tuple
    tol: float = DYKSTRA_TOL
    max_sweeps: int = DYKSTRA_MAX_SWEEPS

    def __post_init__(self):
        sets = tuple(self.sets)
        if not sets:
            raise ValidationError("Intersection needs at least one set")
        if self.tol <= 0 or self.max_sweeps < 1:
            raise ValidationError("Intersection tol and max_sweeps must be positive")
        object.__setattr__(self, "sets", sets)
        shapes = {tuple(s.shape) for s in sets if s.shape is not None}
        if len(shapes) > 1:
            raise ValidationError(f"Intersection members disagree in shape: {shapes}")
        if shapes:
            object.__setattr__(self, "shape", shapes.pop())

    def check_shape(self, shape):
        for s in self.sets:
            s.check_shape(shape)

    def project_full(self, M):
        x = M.copy()
        corrections = [np.zeros_like(M) for _ in self.sets]
        for sweep in range(1, self.max_sweeps + 1):
            change = 0.0
            for i, s in enumerate(self.sets):
                shifted = x + corrections[i]
                y = s.project_point(shifted)
                new_corr = shifted - y
                change += np.sum((y - x) ** 2) + np.sum((new_corr - corrections[i]) ** 2)
                corrections[i] = new_corr
                x = y
            if np.sqrt(change) <= self.tol:
                return ProjectionResult(x, True, sweep)
        return ProjectionResult(x, False, self.max_sweeps)

    def project_point(self, M):
        return self.project_full(M).point

    def contains(self, M, tol):
        return all(s.contains(M, tol) for s in self.sets)


def project(spec, M):
    """Euclidean projection of ``M`` onto ``spec``; returns a ProjectionResult."""
    A = as_matrix(M)
    spec.check_shape(A.shape)
    return spec.project_full(A)


def membership(spec, M, tol=1e-6):
    """True iff ``M`` violates no defining relation of ``spec`` by more than ``tol``."""
    A = as_matrix(M)
    spec.check_shape(A.shape)
    if tol <= 0:
        raise ValidationError("tol must be positive")
    return spec.contains(A, tol)
