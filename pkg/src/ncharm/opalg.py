"""Finite-dimensional operator algebra on M_d(C) with the standard trace.

Matrices are plain ``numpy`` complex arrays of shape ``(d, d)``; most
functions also accept a stack ``(..., d, d)``.
"""

from __future__ import annotations

import numpy as np

PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-12


class NumericError(ArithmeticError):
    """Raised when an eigendecomposition or SVD fails to converge."""


class NotPSDError(ValueError):
    """Raised when a matrix has an eigenvalue below the PSD tolerance."""


def as_matrix(x) -> np.ndarray:
    a = np.asarray(x, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrix, got shape {a.shape}")
    return a


def adjoint(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def hermitian_part(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + adjoint(x))


def op_norm(x: np.ndarray) -> float | np.ndarray:
    """Operator (spectral) norm; vectorised over leading axes."""
    x = as_matrix(x)
    return np.linalg.norm(x, ord=2, axis=(-2, -1))


def is_hermitian(x: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    x = as_matrix(x)
    scale = float(np.max(op_norm(x)))
    return bool(np.max(op_norm(x - adjoint(x))) <= tol * max(scale, 1e-300))


def _eigh(x: np.ndarray):
    try:
        return np.linalg.eigh(hermitian_part(x))
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(x)
        raise NumericError(f"eigendecomposition failed (condition number {cond:.3e})") from exc


def min_eig(x: np.ndarray) -> float | np.ndarray:
    """Smallest eigenvalue of the Hermitian part."""
    return _eigh(as_matrix(x))[0][..., 0]


def max_eig(x: np.ndarray) -> float | np.ndarray:
    return _eigh(as_matrix(x))[0][..., -1]


def is_psd(x: np.ndarray, tol: float = PSD_TOL) -> bool:
    x = as_matrix(x)
    w = _eigh(x)[0]
    bound = -tol * (1.0 + np.abs(w).max(axis=-1))
    return bool(np.all(w[..., 0] >= bound))


def psd_sqrt(x: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Unique PSD square root.

    Eigenvalues in ``[-tol * (1 + ||x||), 0)`` are clamped to zero; anything
    more negative raises :class:`NotPSDError`.
    """
    x = as_matrix(x)
    w, u = _eigh(x)
    bound = -tol * (1.0 + np.abs(w).max(axis=-1, keepdims=True))
    if np.any(w < bound):
        raise NotPSDError(f"matrix is not PSD: minimum eigenvalue {w.min():.3e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    return (u * root[..., None, :]) @ adjoint(u)


def modulus(x: np.ndarray) -> np.ndarray:
    """|x| = (x* x)^{1/2}."""
    x = as_matrix(x)
    return psd_sqrt(adjoint(x) @ x)


def singular_values(x: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.svd(as_matrix(x), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError("SVD failed to converge") from exc


def schatten_norm(x: np.ndarray, p: float = 1.0) -> float | np.ndarray:
    """Schatten p-norm (tr |x|^p)^{1/p}; ``p = inf`` gives the operator norm.

    For ``0 < p < 1`` this is the usual p-quasi-norm.
    """
    if not p > 0:
        raise ValueError(f"Schatten exponent must be positive, got {p}")
    s = singular_values(x)
    if np.isinf(p):
        return s.max(axis=-1)
    if p == 1:
        return s.sum(axis=-1)
    # scale by the largest singular value so tiny spectra do not underflow
    smax = s.max(axis=-1, keepdims=True)
    safe = np.where(smax > 0, smax, 1.0)
    return safe[..., 0] * ((s / safe) ** p).sum(axis=-1) ** (1.0 / p)


def trace(x: np.ndarray) -> complex | np.ndarray:
    return np.trace(as_matrix(x), axis1=-2, axis2=-1)


def polar_unitary(x: np.ndarray) -> np.ndarray:
    """Unitary ``u`` with ``x = u |x|`` (from the SVD)."""
    w, _, vh = np.linalg.svd(as_matrix(x))
    return w @ vh


def random_matrix(rng: np.random.Generator, d: int, scale: float = 1.0) -> np.ndarray:
    """Complex Ginibre matrix with i.i.d. N(0, scale^2/2) real and imaginary parts."""
    return scale * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
