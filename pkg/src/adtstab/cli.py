"""Command line front end.

Subcommands: certify, simulate, omega, mr-check, gen-times, commutators.
Every subcommand reads one JSON config (--config), writes at most the file
named by --output, and exits 0 on success/certified, 1 on an honest
negative, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .certify import evaluate_certificate, search_p0
from .commutators import correction_terms, nested_commutators
from .errors import ConvergenceError, GenerationError, InputError
from .schedules import ImpulseSchedule, generate, schedule_from_doc, schedule_to_doc, validate
from .serialize import dumps, fmt
from .simulate import (
    ParabolicModel,
    l2_norm,
    matching_residual,
    mode_csv,
    simulate_ode,
    simulate_parabolic,
    trajectory_to_csv,
)
from .systems import ImpulsiveSystem

MR_TOL = 1e-8

__all__ = ["main"]


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise InputError(f"config {path} must be a JSON object")
    return cfg


def _section(cfg: dict, name: str) -> dict:
    sec = cfg.get(name)
    if not isinstance(sec, dict):
        raise InputError(f"config needs a {name!r} section")
    return sec


def _matrix(sec: dict, key: str, n: int) -> np.ndarray:
    if key not in sec:
        raise InputError(f"system section missing matrix {key!r}")
    arr = np.asarray(sec[key], dtype=float)
    if arr.ndim == 1:
        if arr.size != n * n:
            raise InputError(f"matrix {key!r} must have {n * n} entries, got {arr.size}")
        arr = arr.reshape(n, n)
    if arr.shape != (n, n):
        raise InputError(f"matrix {key!r} must be {n}x{n}, got {arr.shape}")
    return arr


def _config_system(cfg: dict) -> ImpulsiveSystem:
    sec = _section(cfg, "system")
    try:
        n = int(sec["n"])
    except KeyError:
        raise InputError("system section missing 'n'") from None
    return ImpulsiveSystem(A=_matrix(sec, "A", n), B=_matrix(sec, "B", n))


def _config_schedule(cfg: dict, seed_override: int | None) -> ImpulseSchedule:
    sec = _section(cfg, "schedule")
    if "chis" in sec or "taus" in sec:
        return schedule_from_doc(sec)
    try:
        count = int(sec["count"])
    except KeyError:
        raise InputError(
            "schedule section needs 'chis'/'taus' or generator parameters with 'count'"
        ) from None
    seed = int(sec.get("seed", 0)) if seed_override is None else seed_override
    return generate(
        tau0=float(sec.get("tau0", 0.0)),
        theta=float(sec.get("theta", 0.0)),
        chi_max=float(sec.get("chi_max", 0.0)),
        count=count,
        variant=sec.get("variant", "adt"),
        seed=seed,
    )


def _config_model(cfg: dict, system: ImpulsiveSystem) -> ParabolicModel:
    sec = _section(cfg, "pde")
    try:
        mu = float(sec["mu"])
        ell = float(sec["ell"])
    except KeyError as exc:
        raise InputError(f"pde section missing {exc.args[0]!r}") from None
    return ParabolicModel(
        A=system.A,
        B=system.B,
        mu=mu,
        ell=ell,
        n_modes=int(sec.get("n_modes", 1)),
    )


def _run(cfg: dict) -> dict:
    sec = cfg.get("run", {})
    if not isinstance(sec, dict):
        raise InputError("'run' section must be a JSON object")
    return sec


def _run_seed(run: dict, seed_override: int | None) -> int:
    return int(run.get("seed", 0)) if seed_override is None else seed_override


def _emit(text: str, args) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _say(args, message: str) -> None:
    if not args.quiet and args.output:
        print(message)


def cmd_certify(args) -> int:
    cfg = _load_config(args.config)
    system = _config_system(cfg)
    model = _config_model(cfg, system)
    schedule_sec = _section(cfg, "schedule")
    try:
        theta = float(schedule_sec["theta"])
        chi_max = float(schedule_sec["chi_max"])
    except KeyError as exc:
        raise InputError(f"schedule section missing {exc.args[0]!r}") from None
    run = _run(cfg)
    rel_tol = float(run.get("rel_tol", 1e-12))
    seed = _run_seed(run, args.seed)

    search_meta = {"attempted": False, "found": False, "budget": 0}
    if "p0" in run:
        p0 = _matrix({"p0": run["p0"]}, "p0", system.n)
    else:
        budget = int(run.get("budget", 32))
        p0 = search_p0(
            system.A, system.B, theta, chi_max, model.mu, model.ell,
            budget=budget, seed=seed, rel_tol=rel_tol,
        )
        search_meta = {"attempted": True, "found": p0 is not None, "budget": budget}
        if p0 is None:
            p0 = np.eye(system.n)  # inconclusive: report the identity's margin

    report = evaluate_certificate(
        system.A, system.B, theta, chi_max, model.mu, model.ell,
        p0=p0, rel_tol=rel_tol,
    )
    doc = report.to_doc()
    doc["p0_search"] = search_meta
    _emit(dumps(doc), args)
    verdict = "certified" if report.certified else "not certified"
    _say(
        args,
        f"{verdict}: spectral radius {report.spectral_radius:.6g} vs threshold "
        f"{report.threshold:.6g}, margin {report.margin:.6g}, omega {report.omega:.6g}",
    )
    return 0 if report.certified else 1


def _seeded_unit_vector(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _seeded_unit_modes(model: ParabolicModel, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    C = rng.standard_normal((model.n_modes, model.n))
    return C / l2_norm(model, C)


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    system = _config_system(cfg)
    schedule = _config_schedule(cfg, args.seed)
    run = _run(cfg)
    try:
        t_end = float(run["t_end"])
        sample_dt = float(run["sample_dt"])
    except KeyError as exc:
        raise InputError(f"run section missing {exc.args[0]!r}") from None
    seed = _run_seed(run, args.seed)

    if "pde" in cfg:
        model = _config_model(cfg, system)
        if "init_modes" in run:
            init = np.asarray(run["init_modes"], dtype=float)
        else:
            init = _seeded_unit_modes(model, seed)
        traj = simulate_parabolic(model, schedule, init, t_end, sample_dt)
        if "per_mode_dir" in run:
            out_dir = Path(run["per_mode_dir"])
            out_dir.mkdir(parents=True, exist_ok=True)
            for j in range(1, model.n_modes + 1):
                (out_dir / f"mode_{j:03d}.csv").write_text(
                    mode_csv(traj, j), encoding="utf-8"
                )
    else:
        x0 = (
            np.asarray(run["x0"], dtype=float)
            if "x0" in run
            else _seeded_unit_vector(system.n, seed)
        )
        traj = simulate_ode(system, schedule, x0, t_end, sample_dt)

    _emit(trajectory_to_csv(traj), args)
    _say(
        args,
        f"{len(traj.times)} samples, {len(traj.jump_indices)} impulses, "
        f"final norm {traj.norms[-1]:.6g}",
    )
    return 0


def cmd_omega(args) -> int:
    cfg = _load_config(args.config)
    system = _config_system(cfg)
    schedule_sec = _section(cfg, "schedule")
    try:
        chi_max = float(schedule_sec["chi_max"])
    except KeyError:
        raise InputError("schedule section missing 'chi_max'") from None
    rel_tol = float(_run(cfg).get("rel_tol", 1e-12))
    rows = correction_terms(system.A, system.B, chi_max, rel_tol)
    omega = sum(r.contribution for r in rows)
    lines = [f"omega = {fmt(omega)}", "m,commutator_norm,contribution"]
    lines += [f"{r.m},{fmt(r.commutator_norm)},{fmt(r.contribution)}" for r in rows]
    _emit("\n".join(lines) + "\n", args)
    _say(args, f"omega = {omega:.6g} from {len(rows)} series terms")
    return 0


def cmd_mr_check(args) -> int:
    cfg = _load_config(args.config)
    system = _config_system(cfg)
    schedule = _config_schedule(cfg, args.seed)
    run = _run(cfg)
    K = int(run.get("k", 20))
    rel_tol = float(run.get("rel_tol", 1e-12))
    seed = _run_seed(run, args.seed)
    x0 = (
        np.asarray(run["x0"], dtype=float)
        if "x0" in run
        else _seeded_unit_vector(system.n, seed)
    )
    residual = matching_residual(system, schedule, x0, K, rel_tol)
    ok = residual <= MR_TOL
    _emit(
        f"matching residual over k = 2..{K}: {fmt(residual)} "
        f"({'within' if ok else 'exceeds'} tolerance {MR_TOL:g})\n",
        args,
    )
    _say(args, f"residual {residual:.3e} ({'ok' if ok else 'FAILED'})")
    return 0 if ok else 1


def cmd_gen_times(args) -> int:
    cfg = _load_config(args.config)
    schedule = _config_schedule(cfg, args.seed)
    report = validate(schedule)
    if not report.passed:
        worst = report.failures()[0]
        raise InputError(f"generated schedule invalid ({worst.name}): {worst.detail}")
    _emit(dumps(schedule_to_doc(schedule)), args)
    _say(args, f"{len(schedule)} instants on [{schedule.taus[0]:.6g}, {schedule.taus[-1]:.6g}]")
    return 0


def cmd_commutators(args) -> int:
    cfg = _load_config(args.config)
    system = _config_system(cfg)
    m_max = int(_run(cfg).get("m_max", 10))
    seq = nested_commutators(system.A, system.B, m_max)
    lines = ["m,norm"] + [f"{m},{fmt(v)}" for m, v in enumerate(seq.norms)]
    _emit("\n".join(lines) + "\n", args)
    _say(args, f"computed nested commutators up to order {m_max}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON run configuration")
    common.add_argument("--output", default=None, help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, default=None, help="override config seeds")
    common.add_argument("--quiet", action="store_true", help="suppress progress chatter")

    parser = argparse.ArgumentParser(
        prog="adtstab",
        description="Certify and simulate impulsive linear systems on averaged dwell-time schedules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("certify", parents=[common], help="evaluate the jump Lyapunov certificate").set_defaults(func=cmd_certify)
    sub.add_parser("simulate", parents=[common], help="sample a trajectory to CSV").set_defaults(func=cmd_simulate)
    sub.add_parser("omega", parents=[common], help="correction bound and its series table").set_defaults(func=cmd_omega)
    sub.add_parser("mr-check", parents=[common], help="matching residual of the comparison construction").set_defaults(func=cmd_mr_check)
    sub.add_parser("gen-times", parents=[common], help="generate an impulse schedule document").set_defaults(func=cmd_gen_times)
    sub.add_parser("commutators", parents=[common], help="nested commutator norm table").set_defaults(func=cmd_commutators)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, GenerationError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
