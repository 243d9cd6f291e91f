"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the
per-criterion lines as they complete.  The expensive shared states (the
amplitude-4 connection and the full-resolution 2D relaxation) are
session fixtures; their build time is charged to the criterion that
requires them via the ``timings`` fixture.
"""

import math
import time

import numpy as np
import pytest

from oulab.cli import run as cli_run
from oulab.config import ExperimentConfig
from oulab.energy import discrete_energy, ehrhard_rearrange, minimize, quantile_grid
from oulab.field2d import flatness, lift_1d
from oulab.geometry import poincare_inequality_check
from oulab.heteroclinic import collocate, shoot
from oulab.potential import double_well, existence_screen, remark_threshold
from oulab.quadrature import build_rule, integrate
from oulab.stability import (
    ground_state_vs_derivative,
    linearized_spectrum,
)

from conftest import random_halfline_profile
from test_geometry import radial_field, radial_oracle_error

S2 = 1.0 / math.sqrt(2.0)


def report(number, detail):
    print(f"\nACCEPTANCE {number:2d} [PASS]: {detail}")


class Budget:
    def __init__(self, seconds, charged=0.0):
        self.limit = seconds
        self.charged = charged

    def __enter__(self):
        self.start = time.time()
        return self

    def __exit__(self, *exc):
        if exc[0] is None:
            self.elapsed = time.time() - self.start + self.charged
            assert self.elapsed < self.limit, (
                f"runtime {self.elapsed:.1f}s exceeds the {self.limit:.0f}s budget"
            )
        return False


def test_criterion_01_quadrature():
    with Budget(1.0) as b:
        r = build_rule("full-line-normalized", 20)
        m0 = integrate(r, lambda t: np.ones_like(t))
        m2 = integrate(r, lambda t: t**2)
        m4 = integrate(r, lambda t: t**4)
        assert abs(m0 - 1.0) <= 1e-12
        assert abs(m2 - 1.0) <= 1e-12
        assert abs(m4 - 3.0) <= 1e-12
        half = build_rule("half-line-unnormalized", 400)
        mass = half.total_mass
        assert abs(mass - math.sqrt(math.pi / 2.0)) <= 1e-10
    report(1, f"moments ({m0:.15f}, {m2:.15f}, {m4:.15f}), half mass {mass:.12f}, "
              f"{b.elapsed:.2f}s")


def test_criterion_02_remark_closed_forms():
    with Budget(1.0) as b:
        r1 = existence_screen(double_well(1.0), -1.0, 1.0)
        r4 = existence_screen(double_well(4.0), -1.0, 1.0)
        assert abs(r1.lhs_remark - math.sqrt(2.0) / 3.0) <= 1e-8
        assert abs(r1.rhs_remark - math.sqrt(math.pi / 2.0) / 4.0) <= 1e-10
        assert r1.remark_satisfied is False
        assert r4.remark_satisfied is True
        a_star = remark_threshold()
        assert abs(a_star - 64.0 / (9.0 * math.pi)) <= 1e-10
        hi = existence_screen(double_well(a_star * 1.01), -1.0, 1.0)
        lo = existence_screen(double_well(a_star * 0.99), -1.0, 1.0)
        assert hi.remark_satisfied and not lo.remark_satisfied
    report(2, f"lhs(1)={r1.lhs_remark:.8f} rhs(1)={r1.rhs_remark:.8f}, "
              f"A*={a_star:.10f} bracketed at +-1%, {b.elapsed:.2f}s")


def test_criterion_03_nonexistence(sign_flipped):
    with Budget(10.0) as b:
        screen = existence_screen(sign_flipped, -1.0, 1.0)
        assert screen.verdict == "nonexistence-proved"
        result = shoot(sign_flipped, T=8.0)
        assert result.status == "nonexistence"
        checked = 0
        for log in result.trial_logs:
            inside = (log.u >= 0.0) & (log.u <= 1.0) & (log.uprime > 0.0)
            if inside.sum() < 3:
                continue
            t = log.t[inside]
            up = log.uprime[inside]
            bound = up[0] * np.exp((t**2 - t[0] ** 2) / 2.0) * (1.0 - 1e-6)
            assert np.all(up >= bound)
            checked += 1
        assert checked >= 10
    report(3, f"verdict={screen.verdict}, shoot status={result.status}, "
              f"growth bound held on {checked} logged trajectories, {b.elapsed:.2f}s")


def test_criterion_04_heteroclinic(dw4, shoot4, timings):
    with Budget(30.0, charged=timings.get("shoot4", 0.0)) as b:
        prof = shoot4.profile
        assert shoot4.status == "converged"
        assert prof.monotone
        assert prof.residual_sup <= 1e-8
        tail = abs(prof.values[-1] - 1.0)
        assert tail <= 1e-5
        grid = np.linspace(0.0, 8.0, 160)
        independent = collocate(dw4, (grid, np.tanh(1.3 * grid)), T=8.0)
        diff = float(np.max(np.abs(independent.values - prof.values)))
        assert diff <= 1e-5
    report(4, f"residual {prof.residual_sup:.2e}, |U(8)-1| = {tail:.2e}, "
              f"shooting/collocation sup-difference {diff:.2e}, {b.elapsed:.1f}s")


def test_criterion_05_eigenvalue_structure(dw4, profile4, timings):
    with Budget(60.0, charged=timings.get("profile4", 0.0)) as b:
        rep = linearized_spectrum(dw4, profile4, k=6, basis_size=256)
        lmin = float(rep.eigenvalues[0])
        assert abs(lmin + 1.0) <= 1e-6
        gap = ground_state_vs_derivative(rep, profile4)
        assert gap <= 1e-5
        rep0 = linearized_spectrum(dw4, 0.0, k=3, basis_size=256)
        repc = linearized_spectrum(dw4, 1.0, k=3, basis_size=256)
        assert abs(rep0.eigenvalues[0] + 4.0) <= 1e-8
        assert abs(repc.eigenvalues[0] - 8.0) <= 1e-8
        stable = [rep.stable_in_paper_sense]
        for A, T, tol in ((2.0, 14.0, 1e-3), (8.0, 8.0, 1e-5)):
            p = double_well(A)
            res = shoot(p, T=T, tol=tol)
            assert res.status == "converged" and res.profile.monotone
            stable.append(
                linearized_spectrum(p, res.profile, k=1, basis_size=256).stable_in_paper_sense
            )
        assert all(stable)
    report(5, f"lambda_min = {lmin:.9f}, |psi0 - U'/||U'|||_gamma = {gap:.2e}, "
              f"constant spectra exact, {len(stable)} monotone states stable, {b.elapsed:.1f}s")


def test_criterion_06_rearrangement(dw4):
    with Budget(30.0) as b:
        nodes, masses = quantile_grid(2048)
        w = masses[0]
        rng = np.random.default_rng(2024)
        worst_equi = 0.0
        worst_dirichlet = -np.inf
        for _ in range(100):
            prof = random_halfline_profile(rng, nodes)
            star = ehrhard_rearrange(prof)
            u, us = prof.values[1:], star.values[1:]
            equi = abs(w * (dw4.F(us).sum() - dw4.F(u).sum()))
            worst_equi = max(worst_equi, equi)
            _, d0, _ = discrete_energy(dw4, prof.grid, prof.values)
            _, d1, _ = discrete_energy(dw4, star.grid, star.values)
            worst_dirichlet = max(worst_dirichlet, d1 - d0)
        assert worst_equi <= 1e-6
        assert worst_dirichlet <= 1e-6
        mono = np.sort(np.clip(rng.uniform(0.0, 1.0, len(nodes)), 0.0, 1.0))
        from test_energy import quantile_profile

        fixed = ehrhard_rearrange(quantile_profile(mono))
        assert np.array_equal(fixed.values[1:], mono)
    report(6, f"equimeasurability worst error {worst_equi:.2e}, Dirichlet excess "
              f"worst {worst_dirichlet:.2e}, idempotence exact, {b.elapsed:.1f}s")


def test_criterion_07_energy_condition(dw4, shoot4, timings):
    with Budget(300.0, charged=timings.get("shoot4", 0.0)) as b:
        rep4 = minimize(dw4)
        assert rep4.assen_satisfied
        assert rep4.value < rep4.g0
        grid = rep4.minimizer.grid
        ref = np.interp(grid, shoot4.profile.grid, shoot4.profile.values)
        mask = grid <= 8.0
        diff = float(np.max(np.abs((rep4.minimizer.values - ref)[mask])))
        assert diff <= 1e-3
        rep01 = minimize(double_well(0.1), max_iter=150_000)
        assert not rep01.assen_satisfied
        assert np.max(np.abs(rep01.minimizer.values)) <= 1e-6
        ladder = [0.1, 0.5, 1.0, 2.0, remark_threshold(), 4.0, 8.0]
        flags = []
        for A in ladder:
            flags.append(minimize(double_well(A), max_iter=120_000).assen_satisfied)
        assert all(b_ or not a_ for a_, b_ in zip(flags, flags[1:]))
    report(7, f"G_min(4) = {rep4.value:.6f} < G0 = {rep4.g0:.6f}, minimizer-vs-shooting "
              f"{diff:.2e}, ladder flags {flags} monotone, {b.elapsed:.1f}s")


def test_criterion_08_one_dimensionality(dw4, profile4, relaxed_field_full, timings):
    with Budget(900.0, charged=timings.get("relax_full", 0.0)) as b:
        field = relaxed_field_full
        assert field.converged
        assert field.steady_residual <= 1e-5
        rep = flatness(field)
        assert rep.angular_spread < 1e-2
        assert rep.one_dimensional
        lifted = lift_1d(profile4, (S2, S2), L=5.0, h=0.025, p=dw4)
        assert lifted.reduction_residual <= 1e-6
    report(8, f"relaxation converged in {field.steps_taken} steps, residual "
              f"{field.steady_residual:.2e}, spread {rep.angular_spread:.2e} rad about "
              f"omega = ({rep.direction[0]:.4f}, {rep.direction[1]:.4f}); diagonal lift "
              f"reduction residual {lifted.reduction_residual:.2e}, {b.elapsed:.0f}s")


def test_criterion_09_geometric_poincare(dw4, relaxed_field_full, timings):
    with Budget(300.0) as b:
        e_coarse = radial_oracle_error(radial_field(h=0.05))
        e_fine = radial_oracle_error(radial_field(h=0.025))
        order = math.log2(e_coarse / e_fine)
        assert order >= 1.8
        r2 = poincare_inequality_check(dw4, relaxed_field_full, R=2.0)
        r3 = poincare_inequality_check(dw4, relaxed_field_full, R=3.0)
        assert r2.inequality_satisfied and r3.inequality_satisfied
        assert r3.rhs_integral < r2.rhs_integral
    report(9, f"radial-oracle order {order:.2f}, inequality holds at R = 2, 3 "
              f"(lhs {r2.lhs_integral:.2e} <= rhs {r2.rhs_integral:.2e}), "
              f"rhs(3) = {r3.rhs_integral:.2e} < rhs(2), {b.elapsed:.1f}s")


def test_criterion_10_determinism(tmp_path):
    with Budget(120.0) as b:
        bodies = []
        for tag in ("first", "second"):
            cfg = ExperimentConfig(
                command="solve-ode",
                amplitude=4.0,
                n=512,
                stability_check=False,
                seed=123,
                out_dir=str(tmp_path / tag),
            )
            assert cli_run(cfg) == 0
            bodies.append((tmp_path / tag / "profile.csv").read_bytes())
        assert bodies[0] == bodies[1]
        sweeps = []
        for tag in ("s1", "s2"):
            cfg = ExperimentConfig(
                command="amplitude-sweep",
                amplitudes=(0.5, 4.0),
                n=512,
                max_iter=20_000,
                seed=123,
                out_dir=str(tmp_path / tag),
            )
            cli_run(cfg)
            sweeps.append((tmp_path / tag / "sweep.csv").read_bytes())
        assert sweeps[0] == sweeps[1]
    report(10, f"profile.csv and sweep.csv byte-identical across seeded reruns, "
               f"{b.elapsed:.1f}s")
