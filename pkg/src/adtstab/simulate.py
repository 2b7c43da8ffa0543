"""Exact piecewise simulation of impulsive flows.

Between impulse instants every state is obtained from the segment's
post-jump state by a single matrix exponential, so there is no
time-stepping error beyond the accuracy of expm itself.  Three drivers
share the event loop: the original system on its jittered schedule, the
dwell-normalized comparison system on the uniform grid, and a parabolic
model whose sine modes evolve independently under shifted generators.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import as_square_matrix, as_vector, expm
from .schedules import ADT, ImpulseSchedule, schedule_to_doc, validate
from .serialize import fmt
from .systems import ImpulsiveSystem, comparison_jump, lifted_initial

__all__ = [
    "Trajectory",
    "ParabolicModel",
    "mode_generator",
    "l2_norm",
    "simulate_ode",
    "simulate_comparison",
    "simulate_parabolic",
    "matching_residual",
    "trajectory_to_csv",
    "mode_csv",
]


@dataclass(frozen=True)
class Trajectory:
    """Sampled impulsive trajectory.

    states has shape (S, n) for vector flows and (S, n_modes, n) for
    parabolic runs.  Impulse instants contribute two consecutive samples,
    pre-jump then post-jump; jump_indices points at the post-jump rows.
    """

    times: np.ndarray
    states: np.ndarray
    norms: np.ndarray
    jump_indices: np.ndarray
    meta: dict

    @property
    def post_jump_states(self) -> np.ndarray:
        return self.states[self.jump_indices]

    @property
    def post_jump_times(self) -> np.ndarray:
        return self.times[self.jump_indices]

    @property
    def post_jump_norms(self) -> np.ndarray:
        return self.norms[self.jump_indices]


@dataclass(frozen=True)
class ParabolicModel:
    """Diffusion-coupled linear dynamics on (0, ell) with Dirichlet ends.

    Sine mode j evolves with generator A - mu^2 (j pi / ell)^2 id and all
    modes share the jump operator B, so the modal picture decouples.
    """

    A: np.ndarray
    B: np.ndarray
    mu: float
    ell: float
    n_modes: int

    def __post_init__(self):
        A = as_square_matrix(self.A, "A")
        B = as_square_matrix(self.B, "B")
        if A.shape != B.shape:
            raise InputError(
                f"A and B must share a dimension, got {A.shape} and {B.shape}"
            )
        if not (np.isfinite(self.mu) and self.mu > 0.0):
            raise InputError("mu must be finite and > 0")
        if not (np.isfinite(self.ell) and self.ell > 0.0):
            raise InputError("ell must be finite and > 0")
        if int(self.n_modes) < 1:
            raise InputError("n_modes must be >= 1")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "n_modes", int(self.n_modes))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def decay_rate(self, j: int) -> float:
        """Diffusive shift mu^2 (j pi / ell)^2 of mode j."""
        if not 1 <= j <= self.n_modes:
            raise InputError(f"mode index {j} outside 1..{self.n_modes}")
        return float((self.mu * j * math.pi / self.ell) ** 2)


def mode_generator(model: ParabolicModel, j: int) -> np.ndarray:
    """Generator of mode j: A - mu^2 (j pi / ell)^2 id."""
    return model.A - model.decay_rate(j) * np.eye(model.n)


def l2_norm(model: ParabolicModel, modes) -> float:
    """L2 norm sqrt(ell/2 * sum_j |c_j|^2) of a sine-mode coefficient block."""
    C = np.asarray(modes, dtype=float)
    if C.ndim != 2 or C.shape[1] != model.n:
        raise InputError(
            f"modes must have shape (n_modes, {model.n}), got {C.shape}"
        )
    if not np.all(np.isfinite(C)):
        raise InputError("modes have non-finite entries")
    return float(np.sqrt(model.ell / 2.0 * np.sum(C * C)))


def _digest(*arrays, **scalars) -> str:
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(a, dtype=float)
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    for k in sorted(scalars):
        h.update(f"{k}={scalars[k]!r};".encode())
    return h.hexdigest()[:16]


def _sample_grid(tau0: float, t_end: float, sample_dt: float) -> np.ndarray:
    span = t_end - tau0
    n = int(math.floor(span / sample_dt + 1e-9))
    ts = tau0 + sample_dt * np.arange(1, n + 1)
    return ts[ts <= t_end + 1e-12 * max(1.0, abs(t_end))]


def _run_events(x0, tau0, jump_times, t_end, sample_dt, evolve, jump, norm_of):
    """Shared event loop; evolve(state, dt) must be exact for the flow."""
    jump_set = set(float(t) for t in jump_times)
    events = [(float(t), True) for t in jump_times]
    events += [
        (float(t), False) for t in _sample_grid(tau0, t_end, sample_dt)
        if float(t) not in jump_set
    ]
    if t_end not in jump_set and not any(t == t_end for t, _ in events):
        events.append((float(t_end), False))
    events.sort()

    times = [float(tau0)]
    states = [x0]
    norms = [norm_of(x0)]
    jump_rows = []
    seg_t, seg_x = float(tau0), x0
    for t, is_jump in events:
        pre = evolve(seg_x, t - seg_t)
        times.append(t)
        states.append(pre)
        norms.append(norm_of(pre))
        if is_jump:
            post = jump(pre)
            times.append(t)
            states.append(post)
            norms.append(norm_of(post))
            jump_rows.append(len(times) - 1)
            seg_t, seg_x = t, post
    return (
        np.asarray(times),
        np.asarray(states),
        np.asarray(norms),
        np.asarray(jump_rows, dtype=int),
    )


def _require_valid(schedule: ImpulseSchedule) -> None:
    report = validate(schedule)
    if not report.passed:
        worst = report.failures()[0]
        raise InputError(f"invalid schedule ({worst.name}): {worst.detail}")


def simulate_ode(
    system: ImpulsiveSystem,
    schedule: ImpulseSchedule,
    x0,
    t_end: float,
    sample_dt: float,
) -> Trajectory:
    """Simulate the impulsive flow from tau_0 with exact segment propagation."""
    _require_valid(schedule)
    if not (np.isfinite(t_end) and t_end > schedule.tau0):
        raise InputError("t_end must exceed tau0")
    if not (np.isfinite(sample_dt) and sample_dt > 0.0):
        raise InputError("sample_dt must be > 0")
    x0 = as_vector(x0, system.n)
    taus = schedule.taus
    jump_times = [float(t) for t in taus[1:] if t <= t_end]
    A, B = system.A, system.B
    times, states, norms, jump_rows = _run_events(
        x0,
        schedule.tau0,
        jump_times,
        float(t_end),
        float(sample_dt),
        evolve=lambda x, dt: expm(A, dt) @ x,
        jump=lambda x: B @ x,
        norm_of=lambda x: float(np.linalg.norm(x)),
    )
    meta = {
        "kind": "ode",
        "system": _digest(A, B),
        "schedule": schedule_to_doc(schedule),
        "t_end": float(t_end),
        "sample_dt": float(sample_dt),
    }
    return Trajectory(times, states, norms, jump_rows, meta)


def simulate_comparison(
    system: ImpulsiveSystem,
    schedule: ImpulseSchedule,
    z0,
    K: int,
    rel_tol: float = 1e-12,
) -> Trajectory:
    """Evolve the comparison system on the uniform grid for K periods.

    The jump at k*theta uses the upcoming deviation chi_{k+1}, so the
    schedule must carry deviations up to index K + 1.
    """
    _require_valid(schedule)
    if K < 1:
        raise InputError("K must be >= 1")
    if len(schedule) < K + 2:
        raise InputError(
            f"schedule provides {len(schedule)} deviations; "
            f"K = {K} needs at least {K + 2} (jump at K*theta uses chi_(K+1))"
        )
    z0 = as_vector(z0, system.n)
    theta = schedule.theta
    E = expm(system.A, theta)

    times = [0.0]
    states = [z0]
    jump_rows = []
    z = z0
    for k in range(1, int(K) + 1):
        pre = E @ z
        times.append(k * theta)
        states.append(pre)
        cj = comparison_jump(
            system,
            schedule.chis[k + 1],
            schedule.chi_max,
            schedule.variant,
            rel_tol,
            index=k,
        )
        z = cj.J @ pre
        times.append(k * theta)
        states.append(z)
        jump_rows.append(len(times) - 1)
    states = np.asarray(states)
    meta = {
        "kind": "comparison",
        "system": _digest(system.A, system.B),
        "schedule": schedule_to_doc(schedule),
        "K": int(K),
        "rel_tol": float(rel_tol),
    }
    return Trajectory(
        np.asarray(times),
        states,
        np.linalg.norm(states, axis=1),
        np.asarray(jump_rows, dtype=int),
        meta,
    )


def matching_residual(
    system: ImpulsiveSystem,
    schedule: ImpulseSchedule,
    x0,
    K: int,
    rel_tol: float = 1e-12,
) -> float:
    """Worst normalized mismatch between the original post-jump states and
    their comparison-system predictions.

    The lifted construction predicts x(tau_k+) = e^(s_k A) zhat((k-1) theta+)
    with s_k = chi_k + chi_max ("adt") or s_k = chi_k ("adt_plus"); for
    matrices the identity is exact, so the residual is numerical noise.
    """
    if K < 2:
        raise InputError("K must be >= 2")
    if len(schedule) < K + 1:
        raise InputError(
            f"schedule provides {len(schedule)} deviations; horizon K = {K} "
            f"needs at least {K + 1}"
        )
    x0 = as_vector(x0, system.n)
    taus = schedule.taus
    span = float(taus[K] - schedule.tau0)
    traj_x = simulate_ode(system, schedule, x0, t_end=float(taus[K]), sample_dt=span)
    x_posts = traj_x.post_jump_states  # x(tau_k+), k = 1..K

    z0 = lifted_initial(
        system,
        x0,
        schedule.chis[1],
        schedule.chi_max,
        schedule.theta,
        rel_tol,
        schedule.variant,
    )
    traj_z = simulate_comparison(system, schedule, z0, K - 1, rel_tol)
    z_posts = [z0] + list(traj_z.post_jump_states)  # zhat(k theta+), k = 0..K-1

    offset = schedule.chi_max if schedule.variant == ADT else 0.0
    worst = 0.0
    for k in range(2, int(K) + 1):
        shift = schedule.chis[k] + offset
        predicted = expm(system.A, shift) @ z_posts[k - 1]
        actual = x_posts[k - 1]
        r = float(
            np.linalg.norm(actual - predicted) / (1.0 + np.linalg.norm(actual))
        )
        worst = max(worst, r)
    return worst


def simulate_parabolic(
    model: ParabolicModel,
    schedule: ImpulseSchedule,
    init_modes,
    t_end: float,
    sample_dt: float,
) -> Trajectory:
    """Simulate the parabolic model's sine-mode coefficients.

    Mode generators differ from A by multiples of the identity, so a segment
    of length dt maps mode j through exp(-rate_j dt) * e^(A dt); the modes
    never couple and the jump applies B to every coefficient vector.
    """
    _require_valid(schedule)
    if not (np.isfinite(t_end) and t_end > schedule.tau0):
        raise InputError("t_end must exceed tau0")
    if not (np.isfinite(sample_dt) and sample_dt > 0.0):
        raise InputError("sample_dt must be > 0")
    C0 = np.asarray(init_modes, dtype=float)
    if C0.ndim != 2 or C0.shape != (model.n_modes, model.n):
        raise InputError(
            f"init_modes must have shape ({model.n_modes}, {model.n}), got {C0.shape}"
        )
    if not np.all(np.isfinite(C0)):
        raise InputError("init_modes have non-finite entries")

    rates = np.array([model.decay_rate(j) for j in range(1, model.n_modes + 1)])
    A, B = model.A, model.B
    taus = schedule.taus
    jump_times = [float(t) for t in taus[1:] if t <= t_end]

    def evolve(C, dt):
        return np.exp(-rates * dt)[:, None] * (C @ expm(A, dt).T)

    times, states, norms, jump_rows = _run_events(
        C0,
        schedule.tau0,
        jump_times,
        float(t_end),
        float(sample_dt),
        evolve=evolve,
        jump=lambda C: C @ B.T,
        norm_of=lambda C: l2_norm(model, C),
    )
    meta = {
        "kind": "parabolic",
        "system": _digest(A, B, mu=model.mu, ell=model.ell, n_modes=model.n_modes),
        "schedule": schedule_to_doc(schedule),
        "t_end": float(t_end),
        "sample_dt": float(sample_dt),
    }
    return Trajectory(times, states, norms, jump_rows, meta)


def trajectory_to_csv(traj: Trajectory) -> str:
    """Render a trajectory as CSV with 17-significant-digit floats.

    Vector runs emit t,norm,is_post_jump,state_0..state_{n-1}; parabolic
    runs emit t,l2_norm,is_post_jump (per-mode data goes through mode_csv).
    """
    post = np.zeros(len(traj.times), dtype=int)
    post[traj.jump_indices] = 1
    lines = []
    if traj.states.ndim == 2:
        n = traj.states.shape[1]
        lines.append("t,norm,is_post_jump," + ",".join(f"state_{i}" for i in range(n)))
        for i, t in enumerate(traj.times):
            row = [fmt(t), fmt(traj.norms[i]), str(post[i])]
            row += [fmt(v) for v in traj.states[i]]
            lines.append(",".join(row))
    else:
        lines.append("t,l2_norm,is_post_jump")
        for i, t in enumerate(traj.times):
            lines.append(f"{fmt(t)},{fmt(traj.norms[i])},{post[i]}")
    return "\n".join(lines) + "\n"


def mode_csv(traj: Trajectory, j: int) -> str:
    """Per-mode CSV t,norm,is_post_jump,c_0..c_{n-1} for sine mode j."""
    if traj.states.ndim != 3:
        raise InputError("mode_csv needs a parabolic trajectory")
    n_modes = traj.states.shape[1]
    if not 1 <= j <= n_modes:
        raise InputError(f"mode index {j} outside 1..{n_modes}")
    post = np.zeros(len(traj.times), dtype=int)
    post[traj.jump_indices] = 1
    n = traj.states.shape[2]
    lines = ["t,norm,is_post_jump," + ",".join(f"c_{i}" for i in range(n))]
    for i, t in enumerate(traj.times):
        c = traj.states[i, j - 1]
        row = [fmt(t), fmt(float(np.linalg.norm(c))), str(post[i])]
        row += [fmt(v) for v in c]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
