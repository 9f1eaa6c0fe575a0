"""Input validation helpers shared by measures, solvers and estimators."""

from __future__ import annotations

import math

import numpy as np

from .exceptions import BadMeasure, DomainError, NotPD

PD_RATIO = 1e-12


def check_positive(value, name: str, allow_zero: bool = False) -> float:
    value = float(value)
    ok = value >= 0 if allow_zero else value > 0
    if not (ok and math.isfinite(value)):
        bound = ">= 0" if allow_zero else "> 0"
        raise DomainError(f"{name} must be finite and {bound}, got {value}")
    return value


def check_square_matrix(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"{name} must be a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} has non-finite entries")
    return a


def check_pd(a, name: str = "matrix") -> np.ndarray:
    """Return a symmetrized copy of ``a`` after a positive-definiteness check.

    The check runs a Cholesky factorization and requires the smallest
    diagonal entry of the factor to exceed ``1e-12`` times the largest.
    Asymmetry beyond ``1e-12`` relative is rejected outright.
    """
    a = check_square_matrix(a, name)
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a - a.T)) > 1e-12 * max(scale, 1e-300):
        raise NotPD(f"{name} is not symmetric")
    a = 0.5 * (a + a.T)
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise NotPD(f"{name} is not positive definite") from None
    diag = np.diag(chol)
    if not diag.min() > PD_RATIO * diag.max():
        raise NotPD(f"{name} is numerically singular (Cholesky ratio {diag.min() / diag.max():.3g})")
    return a


def is_pd(a) -> bool:
    try:
        check_pd(a)
    except (NotPD, DomainError):
        return False
    return True


def check_pd_stack(stack, name: str = "atoms") -> np.ndarray:
    """Vectorized :func:`check_pd` over an array of shape (m, n, n)."""
    stack = np.asarray(stack, dtype=float)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise DomainError(f"{name} must have shape (m, n, n), got {stack.shape}")
    if not np.all(np.isfinite(stack)):
        raise DomainError(f"{name} has non-finite entries")
    asym = np.abs(stack - np.swapaxes(stack, 1, 2)).max(axis=(1, 2))
    scale = np.abs(stack).max(axis=(1, 2))
    if np.any(asym > 1e-12 * np.maximum(scale, 1e-300)):
        raise NotPD(f"{name} contains a non-symmetric matrix")
    stack = 0.5 * (stack + np.swapaxes(stack, 1, 2))
    try:
        chol = np.linalg.cholesky(stack)
    except np.linalg.LinAlgError:
        raise NotPD(f"{name} contains a matrix that is not positive definite") from None
    diag = np.diagonal(chol, axis1=1, axis2=2)
    if np.any(diag.min(axis=1) <= PD_RATIO * diag.max(axis=1)):
        raise NotPD(f"{name} contains a numerically singular matrix")
    return stack


def check_orthogonal(u, tol: float = 1e-12) -> np.ndarray:
    u = check_square_matrix(u, "u")
    if np.max(np.abs(u @ u.T - np.eye(u.shape[0]))) > tol:
        raise DomainError("u is not orthogonal")
    return u


def check_weights(weights, size: int) -> np.ndarray:
    """Probability weights: positive, summing to one within 1e-12."""
    w = np.asarray(weights, dtype=float).ravel()
    if w.size != size:
        raise BadMeasure(f"expected {size} weights, got {w.size}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise BadMeasure("weights must be finite and positive")
    if abs(w.sum() - 1.0) > 1e-12:
        raise BadMeasure(f"weights must sum to 1, got {float(w.sum())!r}")
    return w


def check_grid(grid, positive: bool = False, name: str = "grid") -> np.ndarray:
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0 or not np.all(np.isfinite(g)):
        raise DomainError(f"{name} must be a non-empty finite sequence")
    if np.any(np.diff(g) <= 0):
        raise DomainError(f"{name} must be strictly increasing")
    if positive and g[0] <= 0:
        raise DomainError(f"{name} must be positive")
    return g
