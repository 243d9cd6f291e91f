"""Numerical laboratory for the semilinear equation of the
Ornstein-Uhlenbeck operator, Δu - ⟨x,∇u⟩ + f(u) = 0, in Gauss space:
one-dimensional heteroclinic profiles, Gaussian energy minimization
with monotone rearrangement, linearized spectra, two-dimensional
gradient-flow relaxation, and level-set geometry diagnostics.
"""

__version__ = "0.1.0"

# the evaluation op lives at oulab.energy.energy; re-exporting it here would
# shadow the submodule attribute of the same name
from .energy import EnergyReport, ehrhard_rearrange, minimize
from .errors import (
    DegenerateFieldError,
    DivergenceError,
    InvalidArgumentError,
    ModelInconsistencyError,
    NoConvergenceError,
    NumericalDomainError,
    NumericalStiffnessError,
    OULabError,
)
from .field2d import Field2D, FlatnessReport, flatness, lift_1d, relax
from .geometry import PoincareReport, poincare_inequality_check, sz_identity_check
from .heteroclinic import Profile1D, ShootResult, collocate, collocate_refined, limits_check, shoot
from .potential import ExistenceReport, Potential, custom, double_well, existence_screen, remark_threshold
from .quadrature import QuadratureRule, build_rule, integrate, integrate_interval
from .stability import EigenReport, linearized_spectrum, stability_inequality_check

__all__ = [
    "__version__",
    "OULabError",
    "InvalidArgumentError",
    "NumericalDomainError",
    "ModelInconsistencyError",
    "NoConvergenceError",
    "NumericalStiffnessError",
    "DivergenceError",
    "DegenerateFieldError",
    "QuadratureRule",
    "build_rule",
    "integrate",
    "integrate_interval",
    "Potential",
    "ExistenceReport",
    "double_well",
    "custom",
    "existence_screen",
    "remark_threshold",
    "Profile1D",
    "ShootResult",
    "shoot",
    "collocate",
    "collocate_refined",
    "limits_check",
    "EnergyReport",
    "ehrhard_rearrange",
    "minimize",
    "EigenReport",
    "linearized_spectrum",
    "stability_inequality_check",
    "Field2D",
    "FlatnessReport",
    "relax",
    "flatness",
    "lift_1d",
    "PoincareReport",
    "sz_identity_check",
    "poincare_inequality_check",
]
