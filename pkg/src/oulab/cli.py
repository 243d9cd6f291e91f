"""Command-line driver: one experiment per invocation, artifacts on disk.

Every run writes a ``manifest.json`` (inputs, package version, wall
time, headline numbers, and the error when one occurred) next to the
command-specific CSV/JSON artifacts.  CSV bodies are deterministic for
a fixed config and seed: RFC-4180 layout, header row, 17-significant-
digit decimals, UTF-8, LF line endings, no timestamps.

Exit status: 0 on success, 2 for validated negative findings
(nonexistence verdicts, a failed energy condition, a flow that did not
reach tolerance), 1 for errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from . import __version__
from . import energy as energy_mod
from . import field2d as field_mod
from . import geometry as geometry_mod
from . import heteroclinic as het_mod
from . import potential as pot_mod
from . import stability as stab_mod
from .config import ExperimentConfig, load_config
from .errors import InvalidArgumentError, OULabError


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def build_potential(cfg: ExperimentConfig) -> pot_mod.Potential:
    if cfg.potential_name == "double_well":
        return pot_mod.double_well(cfg.amplitude)
    return pot_mod.polynomial(cfg.f_coeffs)


def _profile_rows(p: pot_mod.Potential, profile: het_mod.Profile1D):
    residual = het_mod.scheme_residual(p, profile.grid, profile.values)
    for t, u, du, r in zip(profile.grid, profile.values, profile.derivative, residual):
        yield (t, u, du, r)


def _cmd_check_existence(cfg: ExperimentConfig, out: Path, manifest: dict) -> int:
    p = build_potential(cfg)
    c = p.require_well()
    report = pot_mod.existence_screen(p, -c, c)
    manifest["headline"] = {
        "remark_lhs": report.lhs_remark,
        "remark_rhs": report.rhs_remark,
        "remark_satisfied": report.remark_satisfied,
        "verdict": report.verdict,
        "blocking_interval": report.prop_blocking_interval,
        "remark_threshold_A_star": pot_mod.remark_threshold(),
    }
    write_json(out / "existence.json", manifest["headline"])
    manifest["outputs"].append("existence.json")
    return 2 if report.verdict == "nonexistence-proved" else 0


def _cmd_solve_ode(cfg: ExperimentConfig, out: Path, manifest: dict) -> int:
    p = build_potential(cfg)
    tol = cfg.tol if cfg.tol is not None else het_mod.DEFAULT_TAIL_TOL
    result = het_mod.shoot(p, T=cfg.T, tol=tol, n=cfg.n)
    manifest["headline"] = {
        "status": result.status,
        "shooting_slope": result.shooting_slope,
        "bracket": list(result.bracket),
        "trials": len(result.classifier_trace),
    }
    if result.status != "converged":
        outcomes = sorted({o for _, o in result.classifier_trace})
        manifest["headline"]["classifier_outcomes"] = outcomes
        return 2
    profile = result.profile
    write_csv(out / "profile.csv", ["t", "U", "Uprime", "residual"], _profile_rows(p, profile))
    manifest["outputs"].append("profile.csv")
    gap, fgap = het_mod.limits_check(profile, p)
    manifest["headline"].update(
        residual_sup=profile.residual_sup,
        tail_gap=gap,
        f_at_tail=fgap,
        monotone=profile.monotone,
    )
    if cfg.stability_check:
        refined = het_mod.collocate_refined(p, profile, T=cfg.T, n=cfg.n)
        eig = stab_mod.linearized_spectrum(p, refined, k=cfg.k, basis_size=cfg.basis_size)
        manifest["headline"]["lambda_min"] = float(eig.eigenvalues[0])
        manifest["headline"]["stable_in_paper_sense"] = eig.stable_in_paper_sense
    return 0


def _cmd_minimize(cfg: ExperimentConfig, out: Path, manifest: dict) -> int:
    p = build_potential(cfg)
    report = energy_mod.minimize(p, n=cfg.n, max_iter=cfg.max_iter,
                                 grad_tol=cfg.grad_tol)
    prof = report.minimizer
    write_csv(
        out / "minimizer.csv",
        ["t", "U", "Uprime", "residual"],
        zip(prof.grid, prof.values, prof.derivative,
            het_mod.scheme_residual(p, prof.grid, prof.values)),
    )
    manifest["outputs"].append("minimizer.csv")
    manifest["headline"] = {
        "G_min": report.value,
        "G0": report.g0,
        "dirichlet_part": report.dirichlet_part,
        "potential_part": report.potential_part,
        "assen_satisfied": report.assen_satisfied,
        "status": report.status,
        "interior_minimizer": report.interior_minimizer,
        "critical_residual": report.critical_residual,
    }
    return 0 if report.assen_satisfied else 2


def _sweep_row(args):
    amplitude, n, max_iter, grad_tol = args
    p = pot_mod.double_well(amplitude)
    rep = energy_mod.minimize(p, n=n, max_iter=max_iter, grad_tol=grad_tol)
    screen = pot_mod.existence_screen(p, -1.0, 1.0)
    return (
        amplitude,
        rep.value,
        rep.g0,
        rep.assen_satisfied,
        screen.lhs_remark,
        screen.rhs_remark,
    )


def _cmd_sweep(cfg: ExperimentConfig, out: Path, manifest: dict, jobs: int) -> int:
    if cfg.potential_name != "double_well":
        raise InvalidArgumentError("amplitude-sweep is defined for the double-well family")
    tasks = [(a, cfg.n, cfg.max_iter, cfg.grad_tol) for a in cfg.amplitudes]
    if jobs > 1:
        with Pool(jobs) as pool:
            rows = pool.map(_sweep_row, tasks)
    else:
        rows = [_sweep_row(t) for t in tasks]
    write_csv(
        out / "sweep.csv",
        ["A", "G_min", "G0", "assen_satisfied", "remark_lhs", "remark_rhs"],
        rows,
    )
    manifest["outputs"].append("sweep.csv")
    flags = [bool(r[3]) for r in rows]
    manifest["headline"] = {
        "amplitudes": list(cfg.amplitudes),
        "assen_flags": flags,
        "remark_threshold_A_star": pot_mod.remark_threshold(),
        "assen_monotone": all(b or not a for a, b in zip(flags, flags[1:])),
    }
    return 0


def _cmd_stability(cfg: ExperimentConfig, out: Path, manifest: dict) -> int:
    p = build_potential(cfg)
    if cfg.state == "heteroclinic":
        result = het_mod.shoot(p, T=cfg.T, n=cfg.n)
        if result.status != "converged":
            manifest["headline"] = {"status": result.status}
            return 2
        base = het_mod.collocate_refined(p, result.profile, T=cfg.T, n=cfg.n)
        base_tag = "heteroclinic"
    else:
        base = float(cfg.state)
        base_tag = f"constant({base:g})"
    report = stab_mod.linearized_spectrum(p, base, k=cfg.k, basis_size=cfg.basis_size)
    write_csv(
        out / "eigenvalues.csv",
        ["index", "eigenvalue"],
        list(enumerate(report.eigenvalues)),
    )
    manifest["outputs"].append("eigenvalues.csv")
    for i in range(len(report.eigenvalues)):
        name = f"eigenfunction_{i}.csv"
        write_csv(out / name, ["node", "value"],
                  zip(report.nodes, report.eigenfunctions[i]))
        manifest["outputs"].append(name)
    rng = np.random.default_rng(cfg.seed)
    trials = []
    for _ in range(20):
        a, b, w0 = rng.uniform(-1.0, 1.0, 3)
        trials.append(
            (
                lambda t, a=a, b=b, w0=w0: a * np.tanh(t) + b * np.cos(w0 * t),
                lambda t, a=a, b=b, w0=w0: a / np.cosh(t) ** 2 - b * w0 * np.sin(w0 * t),
            )
        )
    inequality_ok = stab_mod.stability_inequality_check(report, trials)
    manifest["headline"] = {
        "state": base_tag,
        "lambda_min": float(report.eigenvalues[0]),
        "eigenvalues": [float(v) for v in report.eigenvalues],
        "stable_in_paper_sense": report.stable_in_paper_sense,
        "stability_inequality_on_trials": inequality_ok,
    }
    if isinstance(base, het_mod.Profile1D):
        manifest["headline"]["ground_vs_derivative"] = stab_mod.ground_state_vs_derivative(
            report, base
        )
    return 0


def _run_flow(cfg: ExperimentConfig):
    p = build_potential(cfg)
    u0 = field_mod.field_from_function(
        lambda X, Y: np.tanh(X + 0.3 * np.sin(Y)), L=cfg.L, h=cfg.h
    )
    tol = cfg.tol if cfg.tol is not None else 1e-5
    return p, field_mod.relax(p, u0, dt=cfg.dt, max_steps=cfg.max_steps, tol=tol)


def _write_field_artifacts(out: Path, field: field_mod.Field2D, manifest: dict) -> None:
    ax = field.axis
    rows = (
        (ax[i], ax[j], field.values[i, j])
        for i in range(len(ax))
        for j in range(len(ax))
    )
    write_csv(out / "field.csv", ["x", "y", "u"], rows)
    field_mod.write_field_binary(out / "field.bin", field)
    manifest["outputs"] += ["field.csv", "field.bin"]


def _cmd_flow(cfg: ExperimentConfig, out: Path, manifest: dict) -> int:
    p, field = _run_flow(cfg)
    _write_field_artifacts(out, field, manifest)
    report = field_mod.flatness(field)
    write_json(out / "flatness.json", asdict(report))
    manifest["outputs"].append("flatness.json")
    manifest["headline"] = {
        "converged": field.converged,
        "steps": field.steps_taken,
        "steady_residual": field.steady_residual,
        "direction": list(report.direction),
        "angular_spread": report.angular_spread,
        "one_dimensional": report.one_dimensional,
        "sup_abs_u": float(np.max(np.abs(field.values))),
    }
    return 0 if field.converged else 2


def _cmd_poincare(cfg: ExperimentConfig, out: Path, manifest: dict) -> int:
    if cfg.field_path:
        _, values = field_mod.read_field_binary(cfg.field_path)
        n = values.shape[0]
        h = 2 * cfg.L / (n - 1)
        field = field_mod.Field2D(L=cfg.L, h=h, values=values)
        p = build_potential(cfg)
        field.steady_residual = field_mod.weighted_residual(p, field)
    else:
        p, field = _run_flow(cfg)
        if not field.converged:
            manifest["headline"] = {"converged": False}
            return 2
    report = geometry_mod.poincare_inequality_check(p, field, R=cfg.R)
    payload = asdict(report)
    write_json(out / "poincare.json", payload)
    manifest["outputs"].append("poincare.json")
    manifest["headline"] = {
        "R": cfg.R,
        "lhs_integral": report.lhs_integral,
        "rhs_integral": report.rhs_integral,
        "rhs_integral_next": report.rhs_integral_next,
        "inequality_satisfied": report.inequality_satisfied,
        "rhs_decays": report.rhs_decays,
    }
    return 0 if report.inequality_satisfied else 2


_DISPATCH = {
    "check-existence": _cmd_check_existence,
    "solve-ode": _cmd_solve_ode,
    "minimize-energy": _cmd_minimize,
    "stability": _cmd_stability,
    "flow-2d": _cmd_flow,
    "poincare-check": _cmd_poincare,
}


def run(cfg: ExperimentConfig, jobs: int = 1, verbose: bool = False) -> int:
    """Execute one configured experiment; returns the process exit code."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": cfg.command,
        "config": {k: v for k, v in asdict(cfg).items() if k != "extras"},
        "version": __version__,
        "outputs": [],
        "headline": {},
        "error": None,
    }
    start = time.time()
    try:
        if cfg.command == "amplitude-sweep":
            code = _cmd_sweep(cfg, out, manifest, jobs)
        else:
            code = _DISPATCH[cfg.command](cfg, out, manifest)
    except Exception as exc:
        manifest["error"] = f"{type(exc).__name__}: {exc}"
        code = 1
        if verbose:
            raise
    finally:
        manifest["wall_time_s"] = time.time() - start
        manifest["timestamp_unix"] = time.time()
        write_json(out / "manifest.json", manifest)
    if verbose:
        print(json.dumps(manifest["headline"], indent=2, sort_keys=True, default=_json_default))
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="oulab",
        description="Numerical experiments for the semilinear Ornstein-Uhlenbeck equation",
    )
    parser.add_argument("--config", required=True, help="experiment config file")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers for sweeps")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except OULabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out is not None:
        cfg.out_dir = args.out
    if args.seed is not None:
        cfg.seed = args.seed
    code = run(cfg, jobs=max(1, args.jobs), verbose=args.verbose)
    if code == 1:
        print("error: see manifest.json for details", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
