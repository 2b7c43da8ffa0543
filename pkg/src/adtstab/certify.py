"""Jump Lyapunov certificates for impulsive flows on jittered schedules.

The one-period map of the nominal grid dynamics is Phi = B e^(theta A).
Stability on every admissible schedule follows when a symmetric positive
definite P0 satisfies the discounted jump inequality

    d * Phi^T P0 Phi + d * (2 w max(|B P0|, |B^T P0|) + w^2 |P0|) e^(theta A^T) e^(theta A)  <  P0,

with discount d = exp(-2 pi^2 mu^2 theta / ell^2) and w the uniform
correction bound from the commutator series.  The max over the two mixed
norms is deliberately conservative; reports carry a norm_convention field
saying so.  A companion spectral condition requires the radius of Phi to
stay below exp(pi^2 mu^2 theta / ell^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .commutators import convergence_margin, correction_bound, lift_bound
from .errors import InputError
from .linalg import (
    as_square_matrix,
    check_spd,
    expm,
    is_hurwitz,
    is_schur,
    min_eigenvalue_sym,
    spectral_norm,
    spectral_radius,
)

NORM_CONVENTION = "max(|B P0|, |B^T P0|)"
SUP_GRID_POINTS = 1000

__all__ = [
    "CertificateReport",
    "monodromy",
    "inequality_lhs",
    "evaluate_certificate",
    "search_p0",
]


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of one certificate evaluation plus its diagnostics."""

    certified: bool
    spectral_radius: float
    threshold: float
    omega: float
    margin: float
    phi: np.ndarray
    p0: np.ndarray
    shifted_a_hurwitz: bool
    b_schur: bool
    semigroup_sup: float
    lift_amplification: float
    convergence_proxy: float
    inputs: dict

    def to_doc(self) -> dict:
        """JSON-compatible document; matrices flattened row-major."""
        return {
            "certified": bool(self.certified),
            "spectral_radius": float(self.spectral_radius),
            "threshold": float(self.threshold),
            "omega": float(self.omega),
            "margin": float(self.margin),
            "n": int(self.phi.shape[0]),
            "phi": [float(v) for v in self.phi.ravel()],
            "p0": [float(v) for v in self.p0.ravel()],
            "diagnostics": {
                "shifted_a_hurwitz": bool(self.shifted_a_hurwitz),
                "b_schur": bool(self.b_schur),
                "semigroup_sup": float(self.semigroup_sup),
                "lift_amplification": float(self.lift_amplification),
                "convergence_proxy": float(self.convergence_proxy),
            },
            "norm_convention": NORM_CONVENTION,
            "inputs": dict(self.inputs),
        }


def _check_pde_params(theta, mu, ell) -> None:
    for name, v in (("theta", theta), ("mu", mu), ("ell", ell)):
        if not (np.isfinite(v) and v > 0.0):
            raise InputError(f"{name} must be finite and > 0")


def monodromy(A, B, theta: float) -> np.ndarray:
    """One-period transition of the nominal grid dynamics: B e^(theta A)."""
    A = as_square_matrix(A, "A")
    B = as_square_matrix(B, "B")
    if A.shape != B.shape:
        raise InputError(f"A and B must share a dimension, got {A.shape} and {B.shape}")
    if not (np.isfinite(theta) and theta > 0.0):
        raise InputError("theta must be finite and > 0")
    return B @ expm(A, theta)


def inequality_lhs(
    P0, A, B, theta: float, mu: float, ell: float, omega: float
) -> np.ndarray:
    """Left side of the discounted jump inequality for a given omega."""
    P0 = check_spd(P0)
    A = as_square_matrix(A, "A")
    B = as_square_matrix(B, "B")
    _check_pde_params(theta, mu, ell)
    if not (np.isfinite(omega) and omega >= 0.0):
        raise InputError("omega must be finite and >= 0")
    E = expm(A, theta)
    phi = B @ E
    rate = (math.pi * mu / ell) ** 2
    discount = math.exp(-2.0 * rate * theta)
    mixed = max(spectral_norm(B @ P0), spectral_norm(B.T @ P0))
    scale = 2.0 * omega * mixed + omega**2 * spectral_norm(P0)
    return discount * (phi.T @ P0 @ phi) + discount * scale * (E.T @ E)


def evaluate_certificate(
    A,
    B,
    theta: float,
    chi_max: float,
    mu: float,
    ell: float,
    p0=None,
    rel_tol: float = 1e-12,
    m_probe: int = 40,
) -> CertificateReport:
    """Evaluate the certificate at one parameter point.

    certified is true iff the spectral radius of the monodromy stays below
    exp(pi^2 mu^2 theta / ell^2) and the jump inequality holds with positive
    margin (smallest eigenvalue of P0 minus the left side).
    """
    A = as_square_matrix(A, "A")
    B = as_square_matrix(B, "B")
    _check_pde_params(theta, mu, ell)
    if not 0.0 <= chi_max < theta:
        raise InputError("need 0 <= chi_max < theta")
    p0 = np.eye(A.shape[0]) if p0 is None else check_spd(p0)

    omega = correction_bound(A, B, chi_max, rel_tol)
    phi = monodromy(A, B, theta)
    rate = (math.pi * mu / ell) ** 2
    threshold = math.exp(rate * theta)
    radius = spectral_radius(phi)
    margin = min_eigenvalue_sym(p0 - inequality_lhs(p0, A, B, theta, mu, ell, omega))
    certified = bool(radius < threshold and margin > 0.0)

    shifted = A - rate * np.eye(A.shape[0])
    grid = np.linspace(0.0, theta + 2.0 * chi_max, SUP_GRID_POINTS)
    semigroup_sup = max(spectral_norm(expm(shifted, t)) for t in grid)

    return CertificateReport(
        certified=certified,
        spectral_radius=radius,
        threshold=threshold,
        omega=omega,
        margin=margin,
        phi=phi,
        p0=p0,
        shifted_a_hurwitz=is_hurwitz(shifted),
        b_schur=is_schur(B),
        semigroup_sup=float(semigroup_sup),
        lift_amplification=lift_bound(A, B, theta, chi_max, rel_tol),
        convergence_proxy=convergence_margin(A, B, theta, chi_max, m_probe),
        inputs={
            "n": int(A.shape[0]),
            "a": [float(v) for v in A.ravel()],
            "b": [float(v) for v in B.ravel()],
            "theta": float(theta),
            "chi_max": float(chi_max),
            "mu": float(mu),
            "ell": float(ell),
            "rel_tol": float(rel_tol),
            "m_probe": int(m_probe),
        },
    )


def search_p0(
    A,
    B,
    theta: float,
    chi_max: float,
    mu: float,
    ell: float,
    budget: int = 32,
    seed: int = 0,
    rel_tol: float = 1e-12,
) -> np.ndarray | None:
    """Seeded random search for a P0 with positive inequality margin.

    Trial zero is the identity; the rest are L^T L + 1e-6 id with L drawn
    entrywise uniform on [-1, 1], each normalized to unit spectral norm.
    Returns the first feasible candidate by index, or None.
    """
    A = as_square_matrix(A, "A")
    B = as_square_matrix(B, "B")
    _check_pde_params(theta, mu, ell)
    if not 0.0 <= chi_max < theta:
        raise InputError("need 0 <= chi_max < theta")
    if budget < 1:
        raise InputError("budget must be >= 1")
    n = A.shape[0]
    omega = correction_bound(A, B, chi_max, rel_tol)
    rng = np.random.default_rng(seed)
    for trial in range(int(budget)):
        if trial == 0:
            cand = np.eye(n)
        else:
            L = rng.uniform(-1.0, 1.0, size=(n, n))
            cand = L.T @ L + 1e-6 * np.eye(n)
            cand = cand / spectral_norm(cand)
        margin = min_eigenvalue_sym(
            cand - inequality_lhs(cand, A, B, theta, mu, ell, omega)
        )
        if margin > 0.0:
            return cand
    return None
