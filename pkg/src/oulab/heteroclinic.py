"""Monotone heteroclinic profiles of U'' - t U' + f(U) = 0 on the half-line.

The solver is a two-stage pipeline: a shooting stage bisects the initial
slope s = U'(0) of the initial value problem (odd profiles have U(0) = 0)
until the undershoot/overshoot bracket collapses, and a collocation stage
polishes the bracketed trajectory into the solution of a second-order
finite-difference boundary value problem.

The polish stage is not cosmetic.  Perturbations of the initial slope
grow like e^{t²/2}, so in double precision a raw trajectory tracks the
connecting orbit only up to t ≈ 5 before peeling off; past the peel-off
point the profile is continued with the algebraic tail
c - U ∝ t^{f'(c)} (the decaying branch of the linearization at U = c)
and Newton iteration on the discrete boundary value problem restores
full accuracy.  The far boundary uses the Robin closure
U'(T) = (f'(c)/T)(U(T) - c) from the same linearization.

Nonexistence is an expected outcome, reported as a status: when f keeps
an unhelpful sign, every trial slope meets the same fate because
U'' ≥ t U' integrates to U'(t) ≥ U'(t₀) e^{(t²-t₀²)/2}, which no bounded
monotone profile can sustain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.linalg import solve_banded

from .errors import InvalidArgumentError, NoConvergenceError, NumericalStiffnessError
from .potential import Potential

DEFAULT_T = 8.0
DEFAULT_TAIL_TOL = 1e-5
DEFAULT_RESIDUAL_TOL = 1e-8
DEFAULT_BRACKET = (1e-8, 1e3)
NODES_PER_UNIT = 256


@dataclass(frozen=True)
class Profile1D:
    """A candidate profile on a half-line (or full-line) grid.

    ``residual_sup`` is the sup norm of the second-order discrete
    residual of the profile on its own grid (interior centered stencils
    plus the Robin closure at the far end).
    """

    grid: np.ndarray
    values: np.ndarray
    derivative: np.ndarray
    c: float
    residual_sup: float
    monotone: bool

    def __post_init__(self):
        self.grid.setflags(write=False)
        self.values.setflags(write=False)
        self.derivative.setflags(write=False)

    @property
    def T(self) -> float:
        return float(self.grid[-1])

    @property
    def h(self) -> float:
        return float(self.grid[1] - self.grid[0])


@dataclass(frozen=True)
class TrialLog:
    """Sampled trajectory of one shooting trial."""

    slope: float
    outcome: str
    t: np.ndarray
    u: np.ndarray
    uprime: np.ndarray


@dataclass(frozen=True)
class ShootResult:
    status: str  # converged | nonexistence | max-iter
    profile: Optional[Profile1D]
    shooting_slope: float
    bracket: tuple[float, float]
    classifier_trace: tuple[tuple[float, str], ...]
    trial_logs: tuple[TrialLog, ...] = field(default=(), repr=False)


def uniform_grid(T: float, n: int) -> np.ndarray:
    return np.linspace(0.0, T, n + 1)


def fd_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order centered first derivative, one-sided at the ends."""
    u = np.asarray(values, dtype=float)
    d = np.empty_like(u)
    i = np.arange(2, len(u) - 2)
    d[i] = (u[i - 2] - 8 * u[i - 1] + 8 * u[i + 1] - u[i + 2]) / (12 * h)
    d[0] = (-25 * u[0] + 48 * u[1] - 36 * u[2] + 16 * u[3] - 3 * u[4]) / (12 * h)
    d[1] = (-3 * u[0] - 10 * u[1] + 18 * u[2] - 6 * u[3] + u[4]) / (12 * h)
    d[-2] = (3 * u[-1] + 10 * u[-2] - 18 * u[-3] + 6 * u[-4] - u[-5]) / (12 * h)
    d[-1] = (25 * u[-1] - 48 * u[-2] + 36 * u[-3] - 16 * u[-4] + 3 * u[-5]) / (12 * h)
    return d


def scheme_residual(p: Potential, grid: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Residual of the discrete boundary value problem on a uniform grid.

    Row 0 pins U(0) = 0; interior rows are the centered discretization of
    U'' - t U' + f(U); the last row is the Robin tail closure.
    """
    c = p.require_well()
    fpc = float(p.fprime(np.asarray(c)))
    h = grid[1] - grid[0]
    n = len(grid) - 1
    r = np.empty(n + 1)
    r[0] = u[0]
    i = np.arange(1, n)
    r[i] = (
        (u[i + 1] - 2 * u[i] + u[i - 1]) / h**2
        - grid[i] * (u[i + 1] - u[i - 1]) / (2 * h)
        + np.asarray(p.f(u[i]), dtype=float)
    )
    r[n] = (3 * u[n] - 4 * u[n - 1] + u[n - 2]) / (2 * h) - (fpc / grid[n]) * (u[n] - c)
    return r


def _newton_polish(
    p: Potential,
    grid: np.ndarray,
    u0: np.ndarray,
    residual_tol: float,
    max_newton: int = 40,
) -> tuple[np.ndarray, float, int]:
    c = p.require_well()
    fpc = float(p.fprime(np.asarray(c)))
    h = grid[1] - grid[0]
    n = len(grid) - 1
    u = u0.copy()
    u[0] = 0.0
    best_u, best_r = u.copy(), np.inf
    increases = 0
    prev = np.inf
    for it in range(max_newton):
        r = scheme_residual(p, grid, u)
        rn = float(np.max(np.abs(r)))
        if rn < best_r:
            best_u, best_r = u.copy(), rn
        if rn <= residual_tol:
            return u, rn, it
        if rn > prev:
            increases += 1
            if increases >= 5:
                raise NoConvergenceError(
                    f"Newton residual increased five times in a row (best {best_r:.3e})",
                    best=best_u,
                )
        else:
            increases = 0
        prev = rn
        ab = np.zeros((5, n + 1))
        ab[2, 0] = 1.0
        i = np.arange(1, n)
        ab[2, i] = -2.0 / h**2 + np.asarray(p.fprime(u[i]), dtype=float)
        ab[1, i + 1] = 1.0 / h**2 - grid[i] / (2 * h)
        ab[3, i - 1] = 1.0 / h**2 + grid[i] / (2 * h)
        ab[2, n] = 3.0 / (2 * h) - fpc / grid[n]
        ab[3, n - 1] = -2.0 / h
        ab[4, n - 2] = 1.0 / (2 * h)
        du = solve_banded((2, 2), ab, -r)
        # damp if a full step makes things worse
        step = 1.0
        for _ in range(5):
            trial = u + step * du
            trial[0] = 0.0
            tn = float(np.max(np.abs(scheme_residual(p, grid, trial))))
            if tn < rn or step < 0.1:
                break
            step *= 0.5
        u = u + step * du
        u[0] = 0.0
    r = scheme_residual(p, grid, u)
    rn = float(np.max(np.abs(r)))
    if rn < best_r:
        best_u, best_r = u, rn
    raise NoConvergenceError(
        f"Newton did not reach residual {residual_tol:.1e} in {max_newton} steps "
        f"(best {best_r:.3e})",
        best=best_u,
    )


def _make_profile(p: Potential, grid: np.ndarray, u: np.ndarray) -> Profile1D:
    h = grid[1] - grid[0]
    r = scheme_residual(p, grid, u)
    d = fd_derivative(u, h)
    monotone = bool(np.all(d[1:-1] > 0.0))
    return Profile1D(
        grid=grid.copy(),
        values=u.copy(),
        derivative=d,
        c=p.require_well(),
        residual_sup=float(np.max(np.abs(r))),
        monotone=monotone,
    )


def collocate(
    p: Potential,
    seed: "Profile1D | tuple[np.ndarray, np.ndarray]",
    T: float,
    n: int | None = None,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
    max_newton: int = 40,
) -> Profile1D:
    """Newton-refine a seed into the discrete boundary value solution.

    The seed may be a Profile1D or a (grid, values) pair; it is resampled
    monotone-cubically onto the uniform target grid.  Divergence (five
    consecutive residual increases, or iteration exhaustion) raises
    :class:`NoConvergenceError` carrying the best iterate.
    """
    if n is None:
        n = max(1024, int(round(NODES_PER_UNIT * T)))
    grid = uniform_grid(T, n)
    if isinstance(seed, Profile1D):
        st, sv = seed.grid, seed.values
    else:
        st, sv = seed
        st = np.asarray(st, dtype=float)
        sv = np.asarray(sv, dtype=float)
    if len(st) < 2:
        raise InvalidArgumentError("seed needs at least two samples")
    interp = PchipInterpolator(st, sv)
    u0 = interp(np.clip(grid, st[0], st[-1]))
    u, _, _ = _newton_polish(p, grid, u0, residual_tol, max_newton)
    return _make_profile(p, grid, u)


def collocate_refined(
    p: Potential,
    seed: "Profile1D | tuple[np.ndarray, np.ndarray]",
    T: float,
    n: int | None = None,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> Profile1D:
    """Richardson-extrapolated collocation (values accurate to O(h⁴)).

    Solves the discrete problem at n and 2n and combines the two
    solutions at the shared coarse nodes; the result lives on the n-grid.
    Mixing only coincident nodes keeps the combined values smooth at the
    level the extrapolation earns (interpolating between grids would
    plant curvature kinks that derivative reconstructions amplify).
    The returned profile is no longer an exact root of the n-grid
    scheme, so its recorded residual_sup reflects the O(h²) truncation
    of the stencil rather than Newton convergence.
    """
    if n is None:
        n = max(1024, int(round(NODES_PER_UNIT * T)))
    coarse = collocate(p, seed, T, n, residual_tol)
    fine = collocate(p, coarse, T, 2 * n, residual_tol)
    u = fine.values[::2] + (fine.values[::2] - coarse.values) / 3.0
    return _make_profile(p, coarse.grid, u)


def _classify_trial(p: Potential, c: float, s: float, T: float, tol: float,
                    n_log: int = 400) -> TrialLog:
    def rhs(t, y):
        return (y[1], t * y[1] - float(p.f(np.asarray(y[0]))))

    def ev_over(t, y):
        return y[0] - c

    ev_over.terminal = True
    ev_over.direction = 1.0

    def ev_under(t, y):
        return y[1]

    ev_under.terminal = True
    ev_under.direction = -1.0

    sol = solve_ivp(
        rhs,
        (0.0, T),
        (0.0, s),
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        events=[ev_over, ev_under],
        dense_output=True,
    )
    if sol.status == -1:
        raise NumericalStiffnessError(
            f"integrator failed at trial slope s = {s!r}: {sol.message}", slope=s
        )
    if sol.t_events[0].size:
        outcome = "overshoot"
    elif sol.t_events[1].size:
        # U' hit zero; a monotone connection is no longer possible
        outcome = "undershoot"
    else:
        # reached T inside the strip; order by the sign of U(T) - c
        outcome = "overshoot" if sol.y[0, -1] > c else "undershoot"
    ts = np.linspace(0.0, sol.t[-1], n_log)
    uu, up = sol.sol(ts)
    return TrialLog(slope=s, outcome=outcome, t=ts, u=uu, uprime=up)


def shoot(
    p: Potential,
    T: float = DEFAULT_T,
    tol: float = DEFAULT_TAIL_TOL,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
    slope_bracket: tuple[float, float] = DEFAULT_BRACKET,
    n: int | None = None,
    max_bisect: int = 200,
    n_sweep: int = 16,
) -> ShootResult:
    """Bisect the shooting slope and polish the bracketed connection.

    Returns status ``converged`` with a monotone profile satisfying
    |U(T) - c| ≤ tol and the discrete residual tolerance, or
    ``nonexistence`` when the whole initial slope bracket classifies the
    same way (no undershoot/overshoot sign change to bisect).
    """
    if T < 6:
        raise InvalidArgumentError(f"truncation T must be >= 6, got {T}")
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    c = p.require_well()
    if abs(float(p.f(np.asarray(c)))) > 1e-10:
        raise InvalidArgumentError(f"f must vanish at the declared well c = {c}")

    lo, hi = slope_bracket
    sweep = np.geomspace(lo, hi, n_sweep)
    logs: list[TrialLog] = []
    trace: list[tuple[float, str]] = []
    for s in sweep:
        log = _classify_trial(p, c, float(s), T, tol)
        logs.append(log)
        trace.append((float(s), log.outcome))

    outcomes = [o for _, o in trace]
    pair = None
    for i in range(len(outcomes) - 1):
        if outcomes[i] == "undershoot" and outcomes[i + 1] == "overshoot":
            pair = i
            break
    if pair is None:
        return ShootResult(
            status="nonexistence",
            profile=None,
            shooting_slope=float("nan"),
            bracket=(lo, hi),
            classifier_trace=tuple(trace),
            trial_logs=tuple(logs),
        )

    s_lo, s_hi = float(sweep[pair]), float(sweep[pair + 1])
    best_log = logs[pair]
    for _ in range(max_bisect):
        mid = 0.5 * (s_lo + s_hi)
        log = _classify_trial(p, c, mid, T, tol)
        trace.append((mid, log.outcome))
        if log.outcome == "undershoot":
            s_lo = mid
            best_log = log
        else:
            s_hi = mid
        if s_hi - s_lo <= 4 * np.finfo(float).eps * s_hi:
            break
    logs.append(best_log)

    # stitch: trusted piece of the best undershoot, then the algebraic tail
    if n is None:
        n = max(1024, int(round(NODES_PER_UNIT * T)))
    grid = uniform_grid(T, n)
    k_peak = int(np.argmax(best_log.u))
    t_stop = float(best_log.t[k_peak])
    delta = c - float(best_log.u[k_peak])
    fpc = float(p.fprime(np.asarray(c)))
    if t_stop <= 0 or delta <= 0:
        t_stop, delta = max(t_stop, float(grid[1])), max(delta, tol)
    seed = np.interp(grid, best_log.t, best_log.u)
    tail = grid > t_stop
    seed[tail] = c - delta * (grid[tail] / t_stop) ** fpc

    try:
        u, _, _ = _newton_polish(p, grid, seed, residual_tol)
    except NoConvergenceError:
        return ShootResult(
            status="max-iter",
            profile=None,
            shooting_slope=0.5 * (s_lo + s_hi),
            bracket=(s_lo, s_hi),
            classifier_trace=tuple(trace),
            trial_logs=tuple(logs),
        )
    profile = _make_profile(p, grid, u)
    ok = profile.monotone and abs(profile.values[-1] - c) <= tol
    ok = ok and profile.residual_sup <= residual_tol
    return ShootResult(
        status="converged" if ok else "max-iter",
        profile=profile,
        shooting_slope=0.5 * (s_lo + s_hi),
        bracket=(s_lo, s_hi),
        classifier_trace=tuple(trace),
        trial_logs=tuple(logs),
    )


def limits_check(profile: Profile1D, p: Potential) -> tuple[float, float]:
    """Diagnostics (|U(T) - c|, |f(U(T))|) for the far-end limit."""
    uT = float(profile.values[-1])
    return abs(uT - profile.c), abs(float(p.f(np.asarray(uT))))


def odd_extension(profile: Profile1D) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full-line grid, values and derivative via U(-t) = -U(t)."""
    t = profile.grid
    u = profile.values
    d = profile.derivative
    t_full = np.concatenate([-t[::-1][:-1], t])
    u_full = np.concatenate([-u[::-1][:-1], u])
    d_full = np.concatenate([d[::-1][:-1], d])
    return t_full, u_full, d_full


def profile_interpolant(profile: Profile1D):
    """Monotone-cubic interpolant of the odd extension, clamped to ±c outside.

    Returns a callable u(t) valid on all of ℝ.
    """
    t_full, u_full, _ = odd_extension(profile)
    P = PchipInterpolator(t_full, u_full)
    T, c = profile.T, profile.c

    def u(t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) <= T
        out = np.where(inside, P(np.clip(t, -T, T)), np.sign(t) * c)
        return out

    return u


def derivative_interpolant(profile: Profile1D):
    """Interpolant of U' (even extension), zero beyond the grid."""
    t = profile.grid
    d = profile.derivative
    t_full = np.concatenate([-t[::-1][:-1], t])
    d_full = np.concatenate([d[::-1][:-1], d])
    P = PchipInterpolator(t_full, d_full)
    T = profile.T

    def up(t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) <= T
        return np.where(inside, P(np.clip(t, -T, T)), 0.0)

    return up
