"""Dense real matrix kernels used by the rest of the toolkit.

Everything operates on square float64 arrays and is a pure function.
Eigenvalue, singular value and exponential work is delegated to LAPACK via
numpy/scipy; the operator 2-norm is the norm convention throughout.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm as _scipy_expm

from .errors import InputError

SYMMETRY_RTOL = 1e-12

__all__ = [
    "as_square_matrix",
    "as_vector",
    "check_spd",
    "expm",
    "is_hurwitz",
    "is_schur",
    "min_eigenvalue_sym",
    "spectral_norm",
    "spectral_radius",
]


def as_square_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a float64 n-by-n array, rejecting non-finite entries."""
    out = np.asarray(M, dtype=float)
    if out.ndim != 2 or out.shape[0] != out.shape[1] or out.shape[0] < 1:
        raise InputError(f"{name} must be square with n >= 1, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise InputError(f"{name} has non-finite entries")
    return out


def as_vector(x, n: int, name: str = "x0") -> np.ndarray:
    """Coerce to a finite float64 vector of length n."""
    out = np.asarray(x, dtype=float).reshape(-1)
    if out.shape != (n,):
        raise InputError(f"{name} must have length {n}, got shape {np.shape(x)}")
    if not np.all(np.isfinite(out)):
        raise InputError(f"{name} has non-finite entries")
    return out


def expm(M, t: float = 1.0) -> np.ndarray:
    """Matrix exponential e^(tM)."""
    M = as_square_matrix(M)
    if not np.isfinite(t):
        raise InputError("t must be finite")
    return _scipy_expm(t * M)


def spectral_radius(M) -> float:
    """Largest eigenvalue modulus."""
    M = as_square_matrix(M)
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def spectral_norm(M) -> float:
    """Largest singular value (operator 2-norm)."""
    M = as_square_matrix(M)
    return float(np.linalg.norm(M, 2))


def min_eigenvalue_sym(S) -> float:
    """Smallest eigenvalue of the symmetrized (S + S^T)/2.

    S must be symmetric up to SYMMETRY_RTOL relative to its largest entry.
    """
    S = as_square_matrix(S, "S")
    scale = float(np.max(np.abs(S)))
    if float(np.max(np.abs(S - S.T))) > SYMMETRY_RTOL * scale:
        raise InputError("matrix is not symmetric within tolerance")
    return float(np.linalg.eigvalsh(0.5 * (S + S.T))[0])


def is_hurwitz(M) -> bool:
    """True iff every eigenvalue has negative real part."""
    M = as_square_matrix(M)
    return bool(np.max(np.real(np.linalg.eigvals(M))) < 0.0)


def is_schur(M) -> bool:
    """True iff the spectral radius is below one."""
    return spectral_radius(M) < 1.0


def check_spd(P, name: str = "P0") -> np.ndarray:
    """Validate a symmetric positive definite matrix and return it."""
    P = as_square_matrix(P, name)
    scale = float(np.max(np.abs(P)))
    if float(np.max(np.abs(P - P.T))) > SYMMETRY_RTOL * scale:
        raise InputError(f"{name} is not symmetric within tolerance")
    if float(np.linalg.eigvalsh(0.5 * (P + P.T))[0]) <= 0.0:
        raise InputError(f"{name} is not positive definite")
    return P
