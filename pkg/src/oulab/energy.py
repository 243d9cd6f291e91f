"""Gaussian energy G(U) = ∫₀^∞ (U'²/2 + F(U)) e^{-t²/2} dt and its minimization.

The constrained minimization (U(0) = 0, values in the box [0, c]) is a
projected gradient descent in the weighted L² metric on a uniform grid;
every tenth iteration attempts a monotone rearrangement step, accepted
only when it does not increase the discrete energy.

The rearrangement itself lives on an equal-mass quantile grid of the
half-line Gaussian measure: with every cell carrying identical mass,
the measure-preserving monotone rearrangement of the cell values is
*exactly* a sort, so equimeasurability of the discrete data holds to
roundoff rather than to some level-ladder resolution, and rearranging an
already monotone profile is a bitwise no-op.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import erfinv

from . import heteroclinic
from .errors import InvalidArgumentError
from .heteroclinic import Profile1D, fd_derivative
from .potential import Potential
from .quadrature import HALF_LINE_MASS, QuadratureRule, build_rule, gaussian_mass

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

DEFAULT_GRID_T = 12.0
DEFAULT_GRID_N = 2048
DEFAULT_LEVELS = 4096
DEFAULT_HALF_RULE_PANELS = 400


@dataclass(frozen=True)
class EnergyReport:
    """Energy value split into parts, with the minimizer when applicable."""

    value: float
    dirichlet_part: float
    potential_part: float
    g0: float
    assen_satisfied: bool
    minimizer: Optional[Profile1D] = None
    status: str = "evaluated"  # evaluated | converged | max-iter
    interior_minimizer: bool = False
    critical_residual: Optional[float] = None
    degenerate_tie: bool = False
    energy_trace: tuple[float, ...] = ()


def quantile_grid(n: int, T: float = DEFAULT_GRID_T) -> tuple[np.ndarray, np.ndarray]:
    """n equal-mass cell representatives of e^{-t²/2} dt on (0, T).

    Returns (nodes, masses); nodes sit at the mass midpoints of their
    cells and every mass equals gaussian_mass(0, T)/n exactly.
    """
    if n < 2:
        raise InvalidArgumentError("quantile grid needs n >= 2")
    total = float(gaussian_mass(0.0, T))
    target = (np.arange(n) + 0.5) / n * total
    nodes = np.sqrt(2.0) * erfinv(target / HALF_LINE_MASS)
    masses = np.full(n, total / n)
    return nodes, masses


def _profile_on(grid: np.ndarray, values: np.ndarray, c: float,
                monotone: bool | None = None) -> Profile1D:
    deriv = np.gradient(values, grid, edge_order=2)
    if monotone is None:
        monotone = bool(np.all(np.diff(values) > 0.0))
    return Profile1D(
        grid=grid.copy(),
        values=values.copy(),
        derivative=deriv,
        c=c,
        residual_sup=float("nan"),
        monotone=monotone,
    )


def ehrhard_rearrange(profile: Profile1D, n: int | None = None) -> Profile1D:
    """Monotone rearrangement with the same Gaussian distribution function.

    Input values must lie in [0, c] (a 1e-12 slack absorbs roundoff;
    anything beyond raises, and callers that need the truncation step
    should clip via min(|U|, c) first).  The profile is represented on
    the equal-mass quantile grid, where sorting the cell values realizes
    sup{r : γ(U > r) > γ((t, ∞))} exactly; when the input already lives
    on that grid the representation step is the identity.
    """
    c = profile.c
    vals = np.asarray(profile.values, dtype=float)
    if float(np.min(vals)) < -1e-12 or float(np.max(vals)) > c + 1e-12:
        raise InvalidArgumentError(
            f"profile values must lie in [0, c] = [0, {c}]; got range "
            f"[{vals.min():.6g}, {vals.max():.6g}]"
        )
    vals = np.clip(vals, 0.0, c)
    if n is None:
        n = len(profile.grid) - 1 if len(profile.grid) > 2 else DEFAULT_GRID_N
    tq, _ = quantile_grid(n, T=max(profile.T, DEFAULT_GRID_T))
    if _is_quantile_layout(profile.grid, tq):
        uq = vals[-n:]
    else:
        interp = PchipInterpolator(profile.grid, vals)
        uq = np.clip(interp(np.clip(tq, profile.grid[0], profile.grid[-1])), 0.0, c)
    us = np.sort(uq)
    grid_out = np.concatenate([[0.0], tq])
    vals_out = np.concatenate([[0.0], us])
    return _profile_on(grid_out, vals_out, c, monotone=bool(np.all(np.diff(vals_out) > 0)))


def _is_quantile_layout(grid: np.ndarray, tq: np.ndarray) -> bool:
    if len(grid) == len(tq) + 1 and grid[0] == 0.0:
        return bool(np.array_equal(grid[1:], tq))
    return bool(np.array_equal(grid, tq))


def distribution(profile: Profile1D, levels: int = DEFAULT_LEVELS):
    """Ladder diagnostic μ(r) = γ-mass of {U > r} on (0, c)."""
    r = np.linspace(0.0, profile.c, levels + 2)[1:-1]
    grid = profile.grid
    edges = np.concatenate([[grid[0]], 0.5 * (grid[1:] + grid[:-1]), [grid[-1]]])
    w = gaussian_mass(edges[:-1], edges[1:])
    vals = profile.values
    order = np.argsort(vals)[::-1]
    cum = np.cumsum(w[order])
    sorted_desc = vals[order]
    idx = np.searchsorted(-sorted_desc, -r, side="left")  # count of values > r
    mu = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)
    return r, mu


def discrete_energy(p: Potential, grid: np.ndarray, values: np.ndarray):
    """(G, dirichlet, potential) of the piecewise-linear profile on its grid.

    The Dirichlet term is exact for the interpolant (constant slope per
    segment times the exact segment mass); the potential term uses exact
    node-cell masses.
    """
    grid = np.asarray(grid, dtype=float)
    u = np.asarray(values, dtype=float)
    seg_mass = gaussian_mass(grid[:-1], grid[1:])
    slopes = np.diff(u) / np.diff(grid)
    dirichlet = float(np.sum(slopes**2 / 2.0 * seg_mass))
    w = _node_masses(grid)
    potential = float(np.sum(w * np.asarray(p.F(u), dtype=float)))
    return dirichlet + potential, dirichlet, potential


def _node_masses(grid: np.ndarray) -> np.ndarray:
    edges = np.concatenate([[grid[0]], 0.5 * (grid[1:] + grid[:-1]), [grid[-1]]])
    return gaussian_mass(edges[:-1], edges[1:])


def energy(
    p: Potential,
    profile: Profile1D,
    rule: QuadratureRule | None = None,
) -> EnergyReport:
    """Evaluate G(U) with the half-line rule, parts reported separately.

    The profile is interpolated monotone-cubically onto the rule nodes;
    beyond its grid the values extend by the final sample (its limit)
    and the derivative by zero.  g0 = √(π/2)·F(0) is evaluated through
    the same weighted sum as the potential part so that the zero profile
    compares to it exactly.
    """
    if rule is None:
        rule = build_rule("half-line-unnormalized", DEFAULT_HALF_RULE_PANELS)
    if rule.kind != "half-line-unnormalized":
        raise InvalidArgumentError("energy needs a half-line rule")
    if profile.grid[0] != 0.0:
        raise InvalidArgumentError("energy needs a half-line profile (grid starting at 0)")
    c = profile.c
    Fc = abs(float(p.F(np.asarray(c))))
    if Fc > 1e-9:
        raise InvalidArgumentError(
            f"potential must be normalized with F(c) = 0 (got F({c}) = {Fc:.3e})"
        )
    t = rule.nodes
    w = rule.weights
    vi = PchipInterpolator(profile.grid, profile.values)
    u = np.where(t <= profile.T, vi(np.clip(t, 0.0, profile.T)), profile.values[-1])
    di = PchipInterpolator(profile.grid, profile.derivative)
    du = np.where(t <= profile.T, di(np.clip(t, 0.0, profile.T)), 0.0)
    dirichlet = float(np.sum(w * du**2 / 2.0))
    potential = float(np.sum(w * np.asarray(p.F(u), dtype=float)))
    F0 = float(p.F(np.asarray(0.0)))
    g0 = float(np.sum(w * np.full_like(w, F0)))
    value = dirichlet + potential
    return EnergyReport(
        value=value,
        dirichlet_part=dirichlet,
        potential_part=potential,
        g0=g0,
        assen_satisfied=value < g0,
    )


def _compile_scalar(fn):
    if numba is None:
        return None
    try:
        jitted = numba.njit(cache=False)(fn)
        out = jitted(0.5)
        float(out)
        return jitted
    except Exception:
        return None


_KERNEL_CACHE: dict = {}


def _make_pgd_kernel(fj, Fj):
    """Compile a descent-block kernel with f and F inlined via closure."""
    key = (fj, Fj)
    kern = _KERNEL_CACHE.get(key)
    if kern is not None:
        return kern

    @numba.njit(cache=False)
    def kernel(u, wn, seg_mass, h, c, eta, nsteps):
        n = u.shape[0]
        grad = np.empty(n)
        trial = np.empty(n)
        G = 0.0
        for i in range(n - 1):
            s = (u[i + 1] - u[i]) / h
            G += s * s / 2.0 * seg_mass[i]
        for i in range(n):
            G += wn[i] * Fj(u[i])
        gnorm2 = 0.0
        for _ in range(nsteps):
            # weighted-metric gradient of the discrete energy
            for i in range(n):
                grad[i] = -wn[i] * fj(u[i])
            for i in range(n - 1):
                flux = (u[i + 1] - u[i]) / h * seg_mass[i] / h
                grad[i] -= flux
                grad[i + 1] += flux
            gnorm2 = 0.0
            for i in range(1, n):
                grad[i] /= wn[i]
                gnorm2 += wn[i] * grad[i] * grad[i]
            grad[0] = 0.0
            # backtracking with Armijo constant 1e-4
            accepted = False
            Gt = G
            for _ in range(40):
                for i in range(n):
                    v = u[i] - eta * grad[i]
                    if v < 0.0:
                        v = 0.0
                    elif v > c:
                        v = c
                    trial[i] = v
                trial[0] = 0.0
                Gt = 0.0
                for i in range(n - 1):
                    s = (trial[i + 1] - trial[i]) / h
                    Gt += s * s / 2.0 * seg_mass[i]
                for i in range(n):
                    Gt += wn[i] * Fj(trial[i])
                if Gt <= G - 1e-4 * eta * gnorm2:
                    accepted = True
                    break
                if eta < 1e-12:
                    break
                eta *= 0.5
            if not accepted:
                break
            for i in range(n):
                u[i] = trial[i]
            G = Gt
            eta *= 1.05
        return G, eta, np.sqrt(gnorm2)

    if len(_KERNEL_CACHE) > 32:
        _KERNEL_CACHE.clear()
    _KERNEL_CACHE[key] = kernel
    return kernel


def _pgd_block_numpy(u, wn, seg_mass, h, c, eta, nsteps, f, F):
    def Gfun(v):
        s = np.diff(v) / h
        return float(np.sum(s * s / 2.0 * seg_mass) + np.sum(wn * F(v)))

    G = Gfun(u)
    gnorm = 0.0
    for _ in range(nsteps):
        grad = -wn * np.asarray(f(u), dtype=float)
        flux = np.diff(u) / h * seg_mass / h
        grad[:-1] -= flux
        grad[1:] += flux
        grad = grad / wn
        grad[0] = 0.0
        gnorm2 = float(np.sum(wn * grad * grad))
        accepted = False
        for _ in range(40):
            trial = np.clip(u - eta * grad, 0.0, c)
            trial[0] = 0.0
            Gt = Gfun(trial)
            if Gt <= G - 1e-4 * eta * gnorm2:
                accepted = True
                break
            if eta < 1e-12:
                break
            eta *= 0.5
        if not accepted:
            break
        u[:] = trial
        G = Gt
        eta *= 1.05
        gnorm = np.sqrt(gnorm2)
    return G, eta, gnorm


def minimize(
    p: Potential,
    n: int = DEFAULT_GRID_N,
    max_iter: int = 400_000,
    T: float = DEFAULT_GRID_T,
    grad_tol: float = 3e-6,
    rearrange_every: int = 10,
    block: int | None = None,
) -> EnergyReport:
    """Minimize the discrete G over {U(0) = 0, 0 ≤ U ≤ c} on a uniform grid.

    Projected gradient descent in the weighted L² metric with
    backtracking line search; every ``rearrange_every`` iterations a
    monotone rearrangement of the iterate is attempted and kept only if
    it does not increase the discrete energy, so the recorded energy
    trace never increases.  Two starts are raced (the zero profile,
    which is a critical point, and a monotone ramp) and the better final
    energy wins.  Stagnation at max_iter is reported as a status, not an
    error.
    """
    c = p.require_well()
    grid = np.linspace(0.0, T, n + 1)
    h = T / n
    seg_mass = gaussian_mass(grid[:-1], grid[1:])
    wn = _node_masses(grid)
    fj = _compile_scalar(p.f)
    Fj = _compile_scalar(p.F)
    kernel = None
    if numba is not None and fj is not None and Fj is not None:
        try:
            kernel = _make_pgd_kernel(fj, Fj)
        except Exception:
            kernel = None
    if block is None:
        block = rearrange_every

    def run(u0: np.ndarray):
        u = u0.copy()
        u[0] = 0.0
        eta = 0.45 * h * h
        trace = [discrete_energy(p, grid, u)[0]]
        iters = 0
        converged = False
        nq_nodes, _ = quantile_grid(n, T=T)
        skip_rearrange = 0
        stagnant = 0
        G_prev = trace[0]
        while iters < max_iter:
            steps = min(block, max_iter - iters)
            if kernel is not None:
                G, eta, gnorm = kernel(u, wn, seg_mass, h, c, eta, steps)
            else:
                G, eta, gnorm = _pgd_block_numpy(u, wn, seg_mass, h, c, eta, steps, p.f, p.F)
            iters += steps
            if skip_rearrange < 5:
                uq = np.sort(np.clip(np.interp(nq_nodes, grid, u), 0.0, c))
                ur = np.interp(grid, np.concatenate([[0.0], nq_nodes]),
                               np.concatenate([[0.0], uq]))
                Gr = discrete_energy(p, grid, ur)[0]
                if Gr < G:
                    u = ur
                    G = Gr
                    skip_rearrange = 0
                else:
                    skip_rearrange += 1
            if len(trace) < 4096:
                trace.append(G)
            if gnorm <= grad_tol:
                converged = True
                break
            # descent exhausted at float resolution; stop burning iterations
            if G_prev - G <= 1e-16 * (1.0 + abs(G)):
                stagnant += 1
                if stagnant >= 3:
                    break
            else:
                stagnant = 0
            G_prev = G
        return u, trace, converged, iters

    ramp = np.clip(c * np.tanh(1.2 * grid), 0.0, c)
    u_ramp, trace_r, conv_r, it_r = run(ramp)
    u_zero, trace_z, conv_z, it_z = run(np.zeros(n + 1))
    G_ramp = discrete_energy(p, grid, u_ramp)[0]
    G_zero = discrete_energy(p, grid, u_zero)[0]
    if G_ramp < G_zero:
        u, trace, converged = u_ramp, trace_r, conv_r
    else:
        u, trace, converged = u_zero, trace_z, conv_z

    G, dirichlet, potential = discrete_energy(p, grid, u)
    F0 = float(p.F(np.asarray(0.0)))
    g0 = float(np.sum(wn * np.full_like(wn, F0)))

    deriv = fd_derivative(u, h)
    prof = Profile1D(
        grid=grid.copy(),
        values=u.copy(),
        derivative=deriv,
        c=c,
        residual_sup=float(np.max(np.abs(heteroclinic.scheme_residual(p, grid, u)))),
        monotone=bool(np.all(np.diff(u) > 0.0)),
    )
    dist0 = float(np.max(np.abs(u)))
    distc = float(np.max(np.abs(u - c)))
    interior = dist0 > 1e-3 and distc > 1e-3
    critical_residual = None
    if interior:
        refined = heteroclinic.collocate(p, prof, T=T, n=n)
        critical_residual = refined.residual_sup
    degenerate = abs(F0) <= 1e-12 and not interior
    return EnergyReport(
        value=G,
        dirichlet_part=dirichlet,
        potential_part=potential,
        g0=g0,
        assen_satisfied=G < g0,
        minimizer=prof,
        status="converged" if converged else "max-iter",
        interior_minimizer=interior,
        critical_residual=critical_residual,
        degenerate_tie=degenerate,
        energy_trace=tuple(trace),
    )
