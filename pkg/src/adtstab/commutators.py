"""Nested commutators of a jump operator with a flow generator.

A bounded operator B can be moved across the flow e^(tA) at the cost of a
factorially convergent operator series,

    B e^(tA) = e^(tA) * sum_{m>=0} t^m/m! {B, A^m},

where {B, A^0} = B and {B, A^(m+1)} = {B, A^m} A - A {B, A^m}.  This module
computes the commutator sequence, the truncated series, and the scalar
bounds built from it.  All series share one stopping rule (three consecutive
terms below rel_tol times the running sum, hard cap at TERM_CAP terms) so
that quantities derived from the same data truncate consistently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError
from .linalg import as_square_matrix, expm

TERM_CAP = 200
_QUIET_NEEDED = 3

__all__ = [
    "TERM_CAP",
    "CommutatorSequence",
    "SeriesTerm",
    "nested_commutators",
    "commutator_series",
    "hadamard_series",
    "correction_terms",
    "correction_bound",
    "lift_bound",
    "convergence_margin",
]


def _pair(A, B) -> tuple[np.ndarray, np.ndarray]:
    A = as_square_matrix(A, "A")
    B = as_square_matrix(B, "B")
    if A.shape != B.shape:
        raise InputError(f"A and B must share a dimension, got {A.shape} and {B.shape}")
    return A, B


def _check_rel_tol(rel_tol: float) -> None:
    if not 0.0 < rel_tol <= 1e-3:
        raise InputError("rel_tol must lie in (0, 1e-3]")


def _norm2(M: np.ndarray) -> float:
    if not np.all(np.isfinite(M)):
        return float("inf")
    return float(np.linalg.norm(M, 2))


@dataclass(frozen=True)
class CommutatorSequence:
    """Terms {B, A^m} for m = 0..m_max with their operator 2-norms."""

    A: np.ndarray
    B: np.ndarray
    terms: tuple[np.ndarray, ...]
    norms: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class SeriesTerm:
    """One order of a scalar bound series."""

    m: int
    commutator_norm: float
    contribution: float


def nested_commutators(A, B, m_max: int) -> CommutatorSequence:
    """Compute {B, A^m} for m = 0..m_max by the defining recurrence."""
    A, B = _pair(A, B)
    if m_max < 0:
        raise InputError("m_max must be >= 0")
    terms = [B]
    for _ in range(int(m_max)):
        prev = terms[-1]
        terms.append(prev @ A - A @ prev)
    return CommutatorSequence(
        A=A, B=B, terms=tuple(terms), norms=tuple(_norm2(T) for T in terms)
    )


def _weighted_commutators(A, B, s: float, start: int):
    """Yield (m, s^m/m! * {B, A^m}) for m = start..TERM_CAP."""
    term = B
    coeff = 1.0
    for m in range(TERM_CAP + 1):
        if m >= start:
            yield m, coeff * term
        term = term @ A - A @ term
        coeff *= s / (m + 1)


def _truncated_sum(stream, rel_tol: float, label: str) -> np.ndarray:
    """Sum matrix terms until _QUIET_NEEDED consecutive ones are negligible
    relative to the running partial sum."""
    total = None
    quiet = 0
    last_mag = float("inf")
    for _m, value in stream:
        mag = _norm2(value)
        if not np.isfinite(mag):
            raise ConvergenceError(f"{label}: series term overflowed")
        total = value.copy() if total is None else total + value
        last_mag = mag
        if mag <= rel_tol * _norm2(total):
            quiet += 1
            if quiet >= _QUIET_NEEDED:
                return total
        else:
            quiet = 0
    raise ConvergenceError(
        f"{label}: no convergence within {TERM_CAP} terms "
        f"(last term magnitude {last_mag:.3e})"
    )


def commutator_series(
    A, B, s: float, rel_tol: float = 1e-12, start: int = 0
) -> np.ndarray:
    """Truncated sum of s^m/m! * {B, A^m} over m >= start."""
    A, B = _pair(A, B)
    if not np.isfinite(s):
        raise InputError("series argument must be finite")
    if start not in (0, 1):
        raise InputError("start must be 0 or 1")
    _check_rel_tol(rel_tol)
    return _truncated_sum(
        _weighted_commutators(A, B, float(s), start), rel_tol, "commutator series"
    )


def hadamard_series(A, B, t: float, rel_tol: float = 1e-12) -> np.ndarray:
    """Truncated operator S(t) satisfying B e^(tA) = e^(tA) S(t)."""
    if not np.isfinite(t) or t < 0.0:
        raise InputError("t must be finite and >= 0")
    return commutator_series(A, B, t, rel_tol, start=0)


def correction_terms(A, B, chi_max: float, rel_tol: float = 1e-12) -> list[SeriesTerm]:
    """Per-order pieces of the uniform jump-correction bound.

    Order m contributes (2 chi_max)^m/m! * ||{B, A^m}||.  Two consecutive
    dwell deviations differ by at most 2 chi_max, so the total bounds the
    norm of every admissible comparison-jump correction.
    """
    A, B = _pair(A, B)
    if not np.isfinite(chi_max) or chi_max < 0.0:
        raise InputError("chi_max must be finite and >= 0")
    _check_rel_tol(rel_tol)
    s = 2.0 * float(chi_max)
    rows: list[SeriesTerm] = []
    term = B
    coeff = 1.0
    total = 0.0
    quiet = 0
    for m in range(TERM_CAP + 1):
        if m >= 1:
            nrm = _norm2(term)
            if not np.isfinite(nrm):
                raise ConvergenceError("correction bound: commutator norm overflowed")
            contribution = coeff * nrm
            rows.append(SeriesTerm(m=m, commutator_norm=nrm, contribution=contribution))
            total += contribution
            if contribution <= rel_tol * total:
                quiet += 1
                if quiet >= _QUIET_NEEDED:
                    return rows
            else:
                quiet = 0
        term = term @ A - A @ term
        coeff *= s / (m + 1)
    raise ConvergenceError(
        f"correction bound: no convergence within {TERM_CAP} terms"
    )


def correction_bound(A, B, chi_max: float, rel_tol: float = 1e-12) -> float:
    """Uniform norm bound omega for the comparison-jump correction."""
    return float(sum(t.contribution for t in correction_terms(A, B, chi_max, rel_tol)))


def lift_bound(A, B, theta: float, chi_max: float, rel_tol: float = 1e-12) -> float:
    """Amplification bound mapping an initial state to its comparison lift.

    Sums (2 chi_max)^m/m! * ||{B, A^m} e^((theta - chi_max) A)|| from m = 0.
    """
    A, B = _pair(A, B)
    if not (0.0 <= chi_max < theta):
        raise InputError("need 0 <= chi_max < theta")
    _check_rel_tol(rel_tol)
    E = expm(A, theta - chi_max)
    s = 2.0 * float(chi_max)
    term = B
    coeff = 1.0
    total = 0.0
    quiet = 0
    for m in range(TERM_CAP + 1):
        w = _norm2(term @ E)
        if not np.isfinite(w):
            raise ConvergenceError("lift bound: series term overflowed")
        contribution = coeff * w
        total += contribution
        if contribution <= rel_tol * total:
            quiet += 1
            if quiet >= _QUIET_NEEDED:
                return float(total)
        else:
            quiet = 0
        term = term @ A - A @ term
        coeff *= s / (m + 1)
    raise ConvergenceError(f"lift bound: no convergence within {TERM_CAP} terms")


def convergence_margin(
    A, B, theta: float, chi_max: float, m_probe: int = 40
) -> float:
    """Finite-depth proxy for the series convergence condition.

    Evaluates 2 e chi_max * max over m in [m_probe/2, m_probe] of
    ||{B, A^m} e^((theta - chi_max) A)||^(1/m) / m.  Values below one
    indicate the lifted construction converges; for matrices the probe
    tends to zero as it deepens.
    """
    A, B = _pair(A, B)
    if not (0.0 <= chi_max < theta):
        raise InputError("need 0 <= chi_max < theta")
    if m_probe < 2:
        raise InputError("m_probe must be >= 2")
    if chi_max == 0.0:
        return 0.0
    E = expm(A, theta - chi_max)
    lo = max(1, m_probe // 2)
    best = 0.0
    term = B
    for m in range(1, int(m_probe) + 1):
        term = term @ A - A @ term
        w = _norm2(term @ E)
        if not np.isfinite(w):
            raise ConvergenceError(
                f"norm overflow at commutator order {m}; use a smaller m_probe"
            )
        if m >= lo:
            best = max(best, w ** (1.0 / m) / m)
    return 2.0 * math.e * float(chi_max) * best
