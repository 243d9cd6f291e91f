"""Level-set geometry diagnostics: the pointwise curvature identity and
the Gaussian-weighted geometric Poincaré inequality.

For a smooth field u with ∇u ≠ 0, the excess of the full Hessian norm
over the norm of ∇|∇u| decomposes into level-line geometry:

    D := |∇²u|² - |∇|∇u||²  =  |∇u|² κ²  +  |∇_T |∇u||²,

with κ the level-line curvature div(∇u/|∇u|) and ∇_T the tangential
derivative.  D is a sum of squares, so the weighted integral
∫ D φ² dγ is controlled, for steady stable states, by
∫ |∇u|² |∇φ|² dγ; with a radial cutoff that is 1 inside radius R and 0
outside R+1 the right side lives on an annulus whose Gaussian mass
decays like e^{-R²/2}, which is the mechanism forcing D ≡ 0 on the
whole space.

All derivatives are centered differences on the field's grid; the
curvature stencil guards the division by |∇u| with a floor, and nodes
below the floor contribute only their |∇²u|² part (on the critical set
the tangential term vanishes almost everywhere).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateFieldError, InvalidArgumentError
from .field2d import CORE_COLLAR, Field2D, gaussian_density
from .potential import Potential

DEFAULT_FLOOR = 1e-3


@dataclass(frozen=True)
class PoincareReport:
    lhs_pointwise_max_error: Optional[float]
    lhs_integral: Optional[float]
    rhs_integral: Optional[float]
    inequality_satisfied: Optional[bool]
    noncritical_fraction: float
    rhs_integral_next: Optional[float] = None
    rhs_decays: Optional[bool] = None
    excluded_gradient_mass: float = 0.0
    R: Optional[float] = None
    floor: float = DEFAULT_FLOOR


def _derivatives(field: Field2D):
    u = field.values
    h = field.h
    ux = (u[2:, 1:-1] - u[:-2, 1:-1]) / (2 * h)
    uy = (u[1:-1, 2:] - u[1:-1, :-2]) / (2 * h)
    uxx = (u[2:, 1:-1] - 2 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / h**2
    uyy = (u[1:-1, 2:] - 2 * u[1:-1, 1:-1] + u[1:-1, :-2]) / h**2
    uxy = (u[2:, 2:] - u[2:, :-2] - u[:-2, 2:] + u[:-2, :-2]) / (4 * h**2)
    return ux, uy, uxx, uyy, uxy


def _core_interior(field: Field2D) -> np.ndarray:
    ax = field.axis[1:-1]
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    lim = field.L - CORE_COLLAR
    return (np.abs(X) <= lim) & (np.abs(Y) <= lim)


def sz_identity_check(field: Field2D, floor: float = DEFAULT_FLOOR) -> PoincareReport:
    """Verify D = |∇u|²κ² + |∇_T|∇u||² pointwise on the noncritical core.

    Reports the maximum relative mismatch (denominator max(D, 1e-12)).
    Raises :class:`DegenerateFieldError` when fewer than 1% of core
    nodes clear the gradient floor.
    """
    if not floor > 0:
        raise InvalidArgumentError("floor must be positive")
    ux, uy, uxx, uyy, uxy = _derivatives(field)
    core = _core_interior(field)
    gn2 = ux**2 + uy**2
    gn = np.sqrt(gn2)
    noncrit = (gn > floor) & core
    frac = float(noncrit.sum()) / float(core.sum())
    if frac < 0.01:
        raise DegenerateFieldError(
            f"only {100 * frac:.2f}% of core nodes have |grad u| > {floor:g}"
        )
    D = uxx**2 + 2 * uxy**2 + uyy**2
    px = ux * uxx + uy * uxy
    py = ux * uxy + uy * uyy
    with np.errstate(divide="ignore", invalid="ignore"):
        grad_mag_sq = (px**2 + py**2) / gn2
        kappa = (uxx * uy**2 - 2 * ux * uy * uxy + uyy * ux**2) / gn**3
        tangential = (-uy * px + ux * py) / gn2
    D_non = D[noncrit] - grad_mag_sq[noncrit]
    rhs = gn2[noncrit] * kappa[noncrit] ** 2 + tangential[noncrit] ** 2
    err = np.abs(D_non - rhs) / np.maximum(D_non, 1e-12)
    return PoincareReport(
        lhs_pointwise_max_error=float(np.max(err)),
        lhs_integral=None,
        rhs_integral=None,
        inequality_satisfied=None,
        noncritical_fraction=frac,
        floor=floor,
    )


def radial_cutoff(r, R: float):
    """Quintic bump: 1 for r ≤ R, 0 for r ≥ R+1, |Φ'| ≤ 15/8 < 3."""
    s = np.clip(np.asarray(r, dtype=float) - R, 0.0, 1.0)
    return 1.0 - s**3 * (10.0 - 15.0 * s + 6.0 * s**2)


def radial_cutoff_slope(r, R: float):
    r = np.asarray(r, dtype=float)
    s = r - R
    inside = (s > 0.0) & (s < 1.0)
    out = np.zeros_like(r)
    ss = s[inside]
    out[inside] = -30.0 * ss**2 * (1.0 - ss) ** 2
    return out


def _integrals(field: Field2D, R: float, floor: float):
    ux, uy, uxx, uyy, uxy = _derivatives(field)
    ax = field.axis[1:-1]
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    r = np.hypot(X, Y)
    w = gaussian_density(field)[1:-1, 1:-1] * field.h**2
    gn2 = ux**2 + uy**2
    gn = np.sqrt(gn2)
    noncrit = gn > floor
    px = ux * uxx + uy * uxy
    py = ux * uxy + uy * uyy
    with np.errstate(divide="ignore", invalid="ignore"):
        grad_mag_sq = np.where(noncrit, (px**2 + py**2) / gn2, 0.0)
    hess_sq = uxx**2 + 2 * uxy**2 + uyy**2
    # below the floor only the Hessian part is kept: the tangential piece
    # vanishes a.e. on the critical set
    integrand = hess_sq - grad_mag_sq
    phi = radial_cutoff(r, R)
    lhs = float(np.sum(w * integrand * phi**2))
    rhs = float(np.sum(w * gn2 * radial_cutoff_slope(r, R) ** 2))
    excluded = float(np.sum((w * gn)[~noncrit]))
    return lhs, rhs, excluded, noncrit


def poincare_inequality_check(
    p: Potential,
    field: Field2D,
    R: float,
    floor: float = DEFAULT_FLOOR,
) -> PoincareReport:
    """Evaluate both sides of the weighted inequality with a radial cutoff.

    Requires the cutoff support [R, R+1] to fit inside the core, a field
    that is (numerically) steady, and reports the right-side value at
    R+1 as well when that cutoff also fits, exhibiting the Gaussian
    decay of the annulus mass.
    """
    if R < 1.0:
        raise InvalidArgumentError(f"R must be >= 1, got {R}")
    if R + 1.0 > field.L - CORE_COLLAR + 1e-12:
        raise InvalidArgumentError(
            f"cutoff support [R, R+1] = [{R}, {R + 1}] must fit inside the core "
            f"radius {field.L - CORE_COLLAR}"
        )
    if np.isfinite(field.steady_residual) and field.steady_residual > 1e-3:
        raise InvalidArgumentError(
            f"field is not steady (weighted residual {field.steady_residual:.3e})"
        )
    lhs, rhs, excluded, noncrit = _integrals(field, R, floor)
    core = _core_interior(field)
    frac = float((noncrit & core).sum()) / float(core.sum())
    rhs_next = None
    decays = None
    if R + 2.0 <= field.L - CORE_COLLAR + 1e-12:
        _, rhs_next, _, _ = _integrals(field, R + 1.0, floor)
        decays = rhs_next < rhs
    return PoincareReport(
        lhs_pointwise_max_error=None,
        lhs_integral=lhs,
        rhs_integral=rhs,
        inequality_satisfied=lhs <= rhs + 1e-8,
        noncritical_fraction=frac,
        rhs_integral_next=rhs_next,
        rhs_decays=decays,
        excluded_gradient_mass=excluded,
        R=R,
        floor=floor,
    )
