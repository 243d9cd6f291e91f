"""Nonlinearities f, their potentials F (with F' = -f), and existence screens.

A :class:`Potential` bundles the triple (F, f, f') together with the well
location c, the additive constant k that normalizes F(±c) = 0, and the
zeros of f.  The structural hypotheses behind the variational existence
argument (even double-well shape with wells exactly at ±c and zeros of f
exactly at {-c, 0, c}) are *checked and recorded* as flags, never
enforced: the nonexistence screens are meaningful precisely for
potentials that violate them.

Two closed-form screens are provided:

* a sign screen: if f keeps one sign on a whole subinterval [U⁻, U₀] or
  [U₀, U⁺], no bounded increasing connection between U⁻ and U⁺ can exist
  (the drift term forces U' to grow like e^{t²/2} once f stops pushing);

* a sufficient-energy screen: the transition is energetically favorable
  whenever ∫₀ᶜ √(2F(r)) dr ≤ √(π/2)·F(0), compared here by quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidArgumentError, ModelInconsistencyError
from .quadrature import HALF_LINE_MASS, integrate_interval

ScalarFn = Callable[[np.ndarray], np.ndarray]

_PROBE_POINTS = 257
_PROBE_STEPS = (1e-3, 5e-4)
_SIGN_GRID = 4096
_SIGN_MARGIN = 1e-12


@dataclass(frozen=True)
class ShapeFlags:
    """Which structural double-well hypotheses the potential satisfies."""

    wells_at_pm_c: bool
    positive_off_wells: bool
    even: bool
    zeros_exactly_pmc0: bool

    @property
    def all_satisfied(self) -> bool:
        return (
            self.wells_at_pm_c
            and self.positive_off_wells
            and self.even
            and self.zeros_exactly_pmc0
        )


_FLAGS_FALSE = ShapeFlags(False, False, False, False)


@dataclass(frozen=True)
class Potential:
    """The triple (F, f = -F', f') plus structural metadata.

    All three callables must be pure and accept numpy arrays.  ``c`` may
    be None for potentials without a declared well (e.g. convex F).
    """

    F: ScalarFn
    f: ScalarFn
    fprime: ScalarFn
    c: Optional[float]
    k: float
    zeros_of_f: tuple[float, ...]
    flags: ShapeFlags
    label: str = "custom"

    def require_well(self) -> float:
        if self.c is None:
            raise InvalidArgumentError(f"potential {self.label!r} declares no well location c")
        return self.c


@dataclass(frozen=True)
class ExistenceReport:
    """Outcome of the closed-form existence/nonexistence screens."""

    lhs_remark: float
    rhs_remark: float
    remark_satisfied: bool
    prop_blocking_interval: Optional[tuple[float, float]]
    verdict: str  # nonexistence-proved | sufficient-condition-met | inconclusive


def _fd_consistency(F: ScalarFn, f: ScalarFn, fprime: ScalarFn, half_width: float):
    """Max centered-difference mismatch of f vs -F' and f' vs (f)' per step.

    Returns ((err_f, err_fp) per step, worst probe point).
    """
    grid = np.linspace(-half_width, half_width, _PROBE_POINTS)
    errors = []
    worst_point = 0.0
    worst_val = -1.0
    for h in _PROBE_STEPS:
        dF = (np.asarray(F(grid + h)) - np.asarray(F(grid - h))) / (2 * h)
        err_f = np.abs(np.asarray(f(grid)) + dF)
        df = (np.asarray(f(grid + h)) - np.asarray(f(grid - h))) / (2 * h)
        err_fp = np.abs(np.asarray(fprime(grid)) - df)
        errors.append((float(err_f.max()), float(err_fp.max())))
        combined = np.maximum(err_f, err_fp)
        i = int(np.argmax(combined))
        if combined[i] > worst_val:
            worst_val = float(combined[i])
            worst_point = float(grid[i])
    return errors, worst_point


def _check_consistency(F, f, fprime, c) -> None:
    half_width = 2.0 * (c if c is not None else 1.0)
    grid = np.linspace(-half_width, half_width, _PROBE_POINTS)
    scale = 1.0 + float(np.max(np.abs(np.asarray(f(grid)))))
    errors, worst = _fd_consistency(F, f, fprime, half_width)
    tol = 1e-4 * scale
    (ef1, ep1), (ef2, ep2) = errors
    if max(ef2, ep2) > tol:
        raise ModelInconsistencyError(
            f"(F, f, f') fail finite-difference consistency near t = {worst:.6g}: "
            f"|f + dF/dt| = {ef2:.3e}, |f' - df/dt| = {ep2:.3e} at h = {_PROBE_STEPS[1]:g} "
            f"(tolerance {tol:.1e})",
            point=worst,
        )


def _find_zeros(f: ScalarFn, half_width: float) -> tuple[float, ...]:
    grid = np.linspace(-half_width, half_width, 4 * _PROBE_POINTS)
    vals = np.asarray(f(grid), dtype=float)
    zeros: list[float] = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            zeros.append(float(grid[i]))
        elif a * b < 0.0:
            zeros.append(float(brentq(lambda t: float(f(np.asarray(t))), grid[i], grid[i + 1])))
    if vals[-1] == 0.0:
        zeros.append(float(grid[-1]))
    # dedupe within grid resolution
    out: list[float] = []
    for z in sorted(zeros):
        if not out or abs(z - out[-1]) > half_width / len(grid):
            out.append(0.0 if abs(z) < 1e-12 else z)
    return tuple(out)


def _evaluate_flags(F: ScalarFn, f: ScalarFn, c: Optional[float], zeros) -> ShapeFlags:
    if c is None or c <= 0:
        return _FLAGS_FALSE
    grid = np.linspace(0.0, 2.0 * c, 2 * _PROBE_POINTS)
    Fg = np.asarray(F(grid), dtype=float)
    Fneg = np.asarray(F(-grid), dtype=float)
    scale = 1.0 + float(np.max(np.abs(Fg)))
    wells = abs(float(F(np.asarray(c)))) <= 1e-10 * scale and abs(
        float(F(np.asarray(-c)))
    ) <= 1e-10 * scale
    away = np.abs(grid - c) > 1e-3 * c
    positive = bool(np.all(Fg[away] > 0.0))
    even = bool(np.max(np.abs(Fg - Fneg)) <= 1e-10 * scale)
    target = sorted((-c, 0.0, c))
    zeros_ok = len(zeros) == 3 and all(
        abs(z - t) <= 1e-8 * max(1.0, c) for z, t in zip(sorted(zeros), target)
    )
    return ShapeFlags(wells, positive, even, zeros_ok)


def double_well(A: float) -> Potential:
    """The double-well family F(t) = A(1-t²)²/4, f(t) = A(t-t³), wells at ±1.

    Raises
    ------
    InvalidArgumentError
        If the amplitude A is not strictly positive.
    """
    if not A > 0:
        raise InvalidArgumentError(f"double-well amplitude must be positive, got {A}")
    A = float(A)

    # plain arithmetic so the callables accept scalars, arrays, and jit
    def F(t):
        q = 1.0 - t * t
        return A * q * q / 4.0

    def f(t):
        return A * (t - t * t * t)

    def fprime(t):
        return A * (1.0 - 3.0 * t * t)

    return Potential(
        F=F,
        f=f,
        fprime=fprime,
        c=1.0,
        k=A / 4.0,
        zeros_of_f=(-1.0, 0.0, 1.0),
        flags=ShapeFlags(True, True, True, True),
        label=f"double_well(A={A:g})",
    )


def custom(
    F: ScalarFn,
    f: ScalarFn,
    fprime: ScalarFn,
    c: Optional[float],
    label: str = "custom",
) -> Potential:
    """Validate and wrap a user-supplied (F, f, f') triple.

    The triple must pass the centered-difference consistency check on the
    probe grid; the structural double-well flags are evaluated and
    recorded but a potential violating them is still accepted.
    """
    _check_consistency(F, f, fprime, c)
    half_width = 2.0 * (c if c is not None else 1.0)
    zeros = _find_zeros(f, half_width)
    flags = _evaluate_flags(F, f, c, zeros)
    k = float(F(np.asarray(0.0)))
    return Potential(F=F, f=f, fprime=fprime, c=c, k=k, zeros_of_f=zeros,
                     flags=flags, label=label)


def polynomial(F_coeffs, label: str = "polynomial") -> Potential:
    """Potential from ascending coefficients of F; f and f' by differentiation."""
    coeffs = np.asarray(F_coeffs, dtype=float)
    if coeffs.ndim != 1 or coeffs.size < 2:
        raise InvalidArgumentError("need at least two polynomial coefficients for F")
    P = np.polynomial.Polynomial(coeffs)
    dP = P.deriv()
    ddP = dP.deriv()
    zeros = _find_zeros(lambda t: -dP(np.asarray(t)), 2.0)
    pos = [z for z in zeros if z > 1e-10]
    c = max(pos) if pos else None
    return custom(
        F=lambda t: P(np.asarray(t)),
        f=lambda t: -dP(np.asarray(t)),
        fprime=lambda t: -ddP(np.asarray(t)),
        c=c,
        label=label,
    )


def _blocking_interval(p: Potential, lo: float, hi: float, grid_size: int):
    """Largest one-signed subinterval anchored at U⁻ (f ≥ 0) or U⁺ (f ≤ 0).

    A subinterval counts as blocking only if the sign holds, within a
    -1e-12 margin, at every scan point including the recorded zeros of f,
    and the subinterval has positive length on the scan grid.  The upper
    branch (f ≤ 0 up to U⁺) is preferred when both block; the lower case
    is its mirror image.
    """
    grid = np.linspace(lo, hi, grid_size)
    extra = [z for z in p.zeros_of_f if lo < z < hi]
    grid = np.unique(np.concatenate([grid, np.asarray(extra, dtype=float)]))
    vals = np.asarray(p.f(grid), dtype=float)

    # upper branch: f <= 0 on [U0, hi]; find the smallest such U0
    ok = vals <= _SIGN_MARGIN
    i = len(grid) - 1
    while i >= 0 and ok[i]:
        i -= 1
    upper_start = i + 1
    if upper_start < len(grid) - 1 and grid[upper_start] < hi:
        u0 = float(grid[upper_start])
        if u0 > lo:  # interior anchor exists
            return (max(u0, lo), hi)
        if upper_start == 0:
            # one sign over the whole range; any interior anchor works
            return (0.5 * (lo + hi), hi)

    # lower branch: f >= 0 on [lo, U0]; find the largest such U0
    ok = vals >= -_SIGN_MARGIN
    i = 0
    while i < len(grid) and ok[i]:
        i += 1
    lower_end = i - 1
    if lower_end > 0 and grid[lower_end] > lo:
        u0 = float(grid[lower_end])
        if u0 < hi:
            return (lo, min(u0, hi))
        return (lo, 0.5 * (lo + hi))
    return None


def existence_screen(
    p: Potential,
    Uminus: float,
    Uplus: float,
    sign_grid: int = _SIGN_GRID,
) -> ExistenceReport:
    """Run both closed-form screens on the candidate limits (U⁻, U⁺).

    Preconditions: U⁻ < U⁺ and f vanishes at both (limit values of a
    bounded increasing solution are always zeros of f).
    """
    if not Uminus < Uplus:
        raise InvalidArgumentError(f"need Uminus < Uplus, got ({Uminus}, {Uplus})")
    fm = float(p.f(np.asarray(Uminus)))
    fp_ = float(p.f(np.asarray(Uplus)))
    if abs(fm) > 1e-10 or abs(fp_) > 1e-10:
        raise InvalidArgumentError(
            "end values must be zeros of f (bounded increasing connections force "
            f"f(U-) = f(U+) = 0); got f({Uminus}) = {fm:.3e}, f({Uplus}) = {fp_:.3e}"
        )

    blocking = _blocking_interval(p, Uminus, Uplus, sign_grid)

    upper = p.c if p.c is not None else Uplus
    lhs = integrate_interval(
        lambda r: np.sqrt(2.0 * np.clip(np.asarray(p.F(r), dtype=float), 0.0, None)),
        0.0,
        float(upper),
        panels=256,
    )
    rhs = HALF_LINE_MASS * float(p.F(np.asarray(0.0)))
    remark = lhs <= rhs

    if blocking is not None:
        verdict = "nonexistence-proved"
    elif remark:
        verdict = "sufficient-condition-met"
    else:
        verdict = "inconclusive"
    return ExistenceReport(
        lhs_remark=lhs,
        rhs_remark=rhs,
        remark_satisfied=remark,
        prop_blocking_interval=blocking,
        verdict=verdict,
    )


def remark_threshold() -> float:
    """Critical double-well amplitude where the sufficient-energy screen flips.

    For F_A(t) = A(1-t²)²/4 the two sides are √(A/2)·(2/3) and
    √(π/2)·(A/4); equating them gives A* = 64/(9π).
    """
    return 64.0 / (9.0 * math.pi)
