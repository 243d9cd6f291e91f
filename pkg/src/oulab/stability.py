"""Linearized spectra of L = -Δ_γ - f'(u) around one-dimensional states.

The quadratic form ∫(φ'² - f'(u)φ²)dγ is assembled in the orthonormal
polynomial basis of the one-dimensional Gaussian measure (normalized
probabilists' Hermite family), in which the pure Ornstein-Uhlenbeck part
is exactly diagonal with entries 0, 1, 2, ...; all discretization error
is confined to the multiplication operator f'(u), evaluated by full-
line Gaussian quadrature.  The mass matrix is the identity because the
quadrature is exact on products of basis elements, so a dense symmetric
eigensolve returns the spectrum directly.

Around a monotone connection the lowest eigenvalue is -1: the
derivative U' of the profile satisfies L U' = -U' (differentiate the
profile equation in t), which is the equality case of the stability
inequality  ∫(|φ'|² - f'(u)φ²)dγ ≥ -∫φ²dγ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NumericalDomainError
from .heteroclinic import Profile1D, derivative_interpolant, profile_interpolant
from .potential import Potential
from .quadrature import QuadratureRule, build_rule

DEFAULT_BASIS = 256
STABLE_SLACK = 1e-6


class HermiteSeries:
    """Finite expansion Σ aₖ ψₖ in the orthonormal Hermite family.

    Supports pointwise evaluation and exact differentiation
    (ψₖ' = √k ψₖ₋₁), which the stability checks use to avoid numerical
    differentiation of eigenfunctions.
    """

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        n = len(self.coeffs)
        prev = np.ones_like(t)
        out = self.coeffs[0] * prev
        if n == 1:
            return out
        cur = t.copy()
        out = out + self.coeffs[1] * cur
        for k in range(1, n - 1):
            nxt = (t * cur - np.sqrt(k) * prev) / np.sqrt(k + 1.0)
            out = out + self.coeffs[k + 1] * nxt
            prev, cur = cur, nxt
        return out

    def derivative(self) -> "HermiteSeries":
        a = self.coeffs
        if len(a) == 1:
            return HermiteSeries([0.0])
        k = np.arange(1, len(a))
        return HermiteSeries(a[1:] * np.sqrt(k))


@dataclass(frozen=True)
class EigenReport:
    state_tag: str
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray  # rows: weighted-L2-normalized values at `nodes`
    nodes: np.ndarray
    coefficients: np.ndarray  # rows: basis coefficients per eigenfunction
    stable_in_paper_sense: bool
    multiplier: np.ndarray  # f'(u) at the quadrature nodes
    rule: QuadratureRule

    def eigenfunction_series(self, k: int) -> HermiteSeries:
        return HermiteSeries(self.coefficients[k])


def hermite_basis_weighted(n_basis: int, rule: QuadratureRule) -> np.ndarray:
    """Matrix B with B[k, i] = ψₖ(tᵢ)·√wᵢ via the three-term recurrence.

    Scaling by √w keeps entries bounded (ψₖ grows like t^k in the tails
    where the weights decay correspondingly fast).
    """
    t = rule.nodes
    B = np.zeros((n_basis, len(t)))
    B[0] = np.sqrt(rule.weights)
    if n_basis > 1:
        B[1] = t * B[0]
    for k in range(1, n_basis - 1):
        B[k + 1] = (t * B[k] - np.sqrt(float(k)) * B[k - 1]) / np.sqrt(k + 1.0)
    return B


def _multiplier_values(p: Potential, u, rule: QuadratureRule) -> tuple[np.ndarray, str]:
    t = rule.nodes
    if isinstance(u, Profile1D):
        interp = profile_interpolant(u)
        vals = np.asarray(p.fprime(interp(t)), dtype=float)
        tag = f"profile(c={u.c:g}, T={u.T:g})"
    else:
        const = float(u)
        if abs(float(p.f(np.asarray(const)))) > 1e-8:
            raise InvalidArgumentError(
                f"constant base state must be a zero of f; f({const}) = "
                f"{float(p.f(np.asarray(const))):.3e}"
            )
        vals = np.full_like(t, float(p.fprime(np.asarray(const))))
        tag = f"constant({const:g})"
    if not np.all(np.isfinite(vals)):
        bad = t[~np.isfinite(vals)][0]
        raise NumericalDomainError(
            f"f'(u) is not finite at quadrature node t = {bad!r}", point=float(bad)
        )
    return vals, tag


def linearized_spectrum(
    p: Potential,
    u,
    k: int = 6,
    basis_size: int = DEFAULT_BASIS,
    rule: QuadratureRule | None = None,
) -> EigenReport:
    """Lowest k eigenpairs of the quadratic form around the base state u.

    ``u`` is either a constant (must be a zero of f) or a Profile1D,
    extended oddly across 0 and by its limits ±c beyond its grid.
    Requires basis_size ≥ 4k so the requested eigenpairs are well inside
    the resolved part of the spectrum.
    """
    if basis_size < 4 * k:
        raise InvalidArgumentError(
            f"basis_size must be at least 4k = {4 * k}, got {basis_size}"
        )
    if basis_size > 512:
        raise InvalidArgumentError("basis_size beyond 512 is not supported")
    if rule is None:
        rule = build_rule("full-line-normalized", min(2 * basis_size + 65, 1024))
    mult, tag = _multiplier_values(p, u, rule)
    B = hermite_basis_weighted(basis_size, rule)
    M = (B * mult) @ B.T
    A = np.diag(np.arange(basis_size, dtype=float)) - 0.5 * (M + M.T)
    vals, vecs = np.linalg.eigh(A)
    coeffs = vecs[:, :k].T
    # unweighted node values for export; beyond the support of the weights
    # (w underflows to zero near |t| ~ 45) the values are reported as zero
    sw = np.sqrt(rule.weights)
    funcs = np.where(sw > 0.0, (coeffs @ B) / np.where(sw > 0.0, sw, 1.0), 0.0)
    return EigenReport(
        state_tag=tag,
        eigenvalues=vals[:k].copy(),
        eigenfunctions=funcs,
        nodes=rule.nodes.copy(),
        coefficients=coeffs.copy(),
        stable_in_paper_sense=bool(vals[0] >= -1.0 - STABLE_SLACK),
        multiplier=mult,
        rule=rule,
    )


def _weighted_trial(trial, rule: QuadratureRule):
    """(φ·√w, φ'·√w) at the quadrature nodes.

    Working with √w-scaled values keeps Hermite-series trials bounded in
    the far tail, where raw polynomial values overflow but their
    weighted contributions vanish.
    """
    t = rule.nodes
    sw = np.sqrt(rule.weights)
    if isinstance(trial, HermiteSeries):
        B = hermite_basis_weighted(len(trial.coeffs), rule)
        d = trial.derivative()
        dpad = np.zeros(len(trial.coeffs))
        dpad[: len(d.coeffs)] = d.coeffs
        return trial.coeffs @ B, dpad @ B
    if isinstance(trial, tuple) and len(trial) == 2:
        phi, dphi = trial
        return np.asarray(phi(t), dtype=float) * sw, np.asarray(dphi(t), dtype=float) * sw
    # fourth-order central differences as a fallback
    phi = np.asarray(trial(t), dtype=float)
    h = 1e-4
    dphi = (
        np.asarray(trial(t - 2 * h), dtype=float)
        - 8 * np.asarray(trial(t - h), dtype=float)
        + 8 * np.asarray(trial(t + h), dtype=float)
        - np.asarray(trial(t + 2 * h), dtype=float)
    ) / (12 * h)
    return phi * sw, dphi * sw


def quadratic_form_value(report: EigenReport, trial) -> float:
    """∫(φ'² - f'(u)φ²)dγ + ∫φ²dγ for one trial function."""
    phiw, dphiw = _weighted_trial(trial, report.rule)
    return float(np.sum(dphiw**2 - report.multiplier * phiw**2 + phiw**2))


def stability_inequality_check(report: EigenReport, trial_functions) -> bool:
    """Direct quadrature rendering of the stability inequality.

    Each trial may be a callable, a (φ, φ') pair, or a HermiteSeries;
    returns True when every evaluated form value is ≥ -1e-8.
    """
    return all(quadratic_form_value(report, tr) >= -1e-8 for tr in trial_functions)


def ground_state_vs_derivative(report: EigenReport, profile: Profile1D) -> float:
    """Weighted-L² distance between the ground eigenfunction and U'/‖U'‖."""
    t = report.rule.nodes
    sw = np.sqrt(report.rule.weights)
    upw = derivative_interpolant(profile)(t) * sw
    nrm = np.sqrt(np.sum(upw**2))
    if nrm == 0.0:
        raise InvalidArgumentError("profile derivative vanishes identically")
    upw = upw / nrm
    B = hermite_basis_weighted(report.coefficients.shape[1], report.rule)
    psiw = report.coefficients[0] @ B
    sign = np.sign(np.sum(psiw * upw)) or 1.0
    return float(np.sqrt(np.sum((psiw - sign * upw) ** 2)))
