"""Input validation helpers shared by the estimators and free functions."""

import numpy as np

from .exceptions import NonHermitian, ShapeMismatch

DEFAULT_TOL = 1e-9


def as_matrix(M, name="matrix"):
    """Return ``M`` as a 2-D complex ndarray, rejecting NaN/Inf."""
    A = np.asarray(M)
    if A.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got shape {A.shape}")
    A = A.astype(complex, copy=False)
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf")
    return A


def check_square(M, name="matrix"):
    A = as_matrix(M, name)
    if A.shape[0] != A.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got shape {A.shape}")
    return A


def hermitian_residual(A):
    """Spectral norm of ``A - A*``."""
    return float(np.linalg.norm(A - A.conj().T, 2)) if A.size else 0.0


def check_hermitian(M, tol=DEFAULT_TOL, name="matrix"):
    """Validate Hermiticity relative to ``||M||`` and return the symmetrised matrix."""
    A = check_square(M, name)
    scale = max(float(np.linalg.norm(A, 2)) if A.size else 0.0, 1.0)
    res = hermitian_residual(A)
    if res > tol * scale:
        raise NonHermitian(f"{name} is not Hermitian: ||M - M*|| = {res:.3e}")
    return (A + A.conj().T) / 2


def check_same_shape(A, B):
    if A.shape != B.shape:
        raise ShapeMismatch(f"shape mismatch: {A.shape} vs {B.shape}")


def check_unit_vector(v, tol=1e-10, name="vector"):
    v = np.asarray(v, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"{name} must have unit norm, got {nrm:.12g}")
    return v


def check_tol(tol):
    tol = float(tol)
    if not tol > 0:
        raise ValueError("tol must be positive")
    return tol
