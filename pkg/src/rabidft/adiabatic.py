"""Adiabatic connection in the coupling scale and its correlation pieces."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .functionals import constrained_optimizer, internal_energy, levy_lieb
from .params import DensityPair, ModelParams, ParameterError
from .quadrature import QuadratureResult, QuadratureSpec, integrate_samples, nodes

EXCHANGE_STEPS = (1e-2, 5e-3, 2.5e-3)


def _check_sigma(sigma: float) -> None:
    if not abs(sigma) <= 1.0:
        raise ParameterError(f"|sigma| must be <= 1, got {sigma}")


def explicit_part(target: DensityPair, p: ModelParams) -> float:
    """All closed-form terms of F^λ: everything except the correlation integral."""
    s, xi = target.sigma, target.xi
    w2 = p.omega**2
    lg = p.coupling
    return (p.omega / 2 - p.t * math.sqrt(max(1 - s * s, 0.0)) + w2 * xi**2 / 2
            + lg * s * xi - lg**2 * (1 - s * s) / (2 * w2))


def coupling_expectation(sigma: float, nu: float, p: ModelParams) -> float:
    """g⟨σ_z x⟩ at the optimizer of F^ν(σ, 0)."""
    if nu < 0:
        raise ParameterError("coupling scale must be >= 0")
    if nu == 0.0 or p.g == 0.0 or abs(sigma) == 1.0:
        # factorized Gaussian optimizer centred at ξ=0
        return 0.0
    q = p.with_lambda(nu)
    _, ex = constrained_optimizer(sigma, q).at_displacement(0.0)
    return p.g * ex.szx


def integrand_samples(sigma: float, lam: float, p: ModelParams, q: QuadratureSpec, workers: int = 1) -> np.ndarray:
    grid = nodes(0.0, lam, q)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            vals = list(pool.map(lambda nu: coupling_expectation(sigma, float(nu), p), grid))
    else:
        vals = [coupling_expectation(sigma, float(nu), p) for nu in grid]
    return np.array(vals)


def coupling_integral(sigma: float, lam: float, p: ModelParams, q: QuadratureSpec = QuadratureSpec(),
                      workers: int = 1) -> QuadratureResult:
    """∫_0^λ g⟨σ_z x⟩ dν with its nested error estimate."""
    if lam < 0:
        raise ParameterError("lambda must be >= 0")
    if lam == 0.0:
        return QuadratureResult(0.0, 0.0, q.nodes)
    return integrate_samples(integrand_samples(sigma, lam, p, q, workers), 0.0, lam, q)


def correlation_integral(sigma: float, lam: float, p: ModelParams, q: QuadratureSpec = QuadratureSpec(),
                         workers: int = 1) -> QuadratureResult:
    """Correlation integral I^λ(σ) by quadrature, with error estimate."""
    _check_sigma(sigma)
    if abs(sigma) == 1.0:
        return QuadratureResult(0.0, 0.0, q.nodes)
    res = coupling_integral(sigma, lam, p, q, workers)
    quad = (lam * p.g) ** 2 * (1 - sigma**2) / (2 * p.omega**2)
    return QuadratureResult(res.value + quad, res.error, res.nodes)


def correlation_integral_I(sigma: float, lam: float, p: ModelParams, q: QuadratureSpec = QuadratureSpec(),
                           workers: int = 1) -> float:
    """Correlation integral I^λ(σ) by quadrature of the coupling expectation."""
    return correlation_integral(sigma, lam, p, q, workers).value


def correlation_integral_direct(sigma: float, lam: float, p: ModelParams) -> float:
    """I^λ(σ) from the functional value minus its explicit part."""
    _check_sigma(sigma)
    if abs(sigma) == 1.0 or lam == 0.0:
        return 0.0
    q = p.with_lambda(lam)
    target = DensityPair(sigma, 0.0)
    return internal_energy(target, q) - explicit_part(target, q)


def functional_reconstruction_check(sigma: float, xi: float, lam: float, p: ModelParams,
                                    q: QuadratureSpec = QuadratureSpec(), workers: int = 1) -> float:
    """F^λ(σ, ξ) from constrained search minus the explicit-plus-integral form."""
    target = DensityPair(sigma, xi)
    pl = p.with_lambda(lam)
    direct = levy_lieb(target, pl).value
    return direct - (explicit_part(target, pl) + correlation_integral_I(sigma, lam, p, q, workers))


@dataclass(frozen=True)
class CorrelationBreakdown:
    """Correlation integral and its photonic/kinetic/coupling decomposition.

    ``G`` is per unit coupling scale (λG is the total correlation energy);
    ``Wc`` is g⟨σ_z x⟩ so that λWc is the coupling contribution.
    ``quad_residual`` is λG minus ∫_0^λ Wc dν, ``quad_error`` its estimate.
    """

    I: float
    G: float
    Pc: float
    Tc: float
    Wc: float
    lam: float
    sigma: float
    quad_residual: float = 0.0
    quad_error: float = 0.0


def correlation_breakdown(sigma: float, lam: float, p: ModelParams, q: QuadratureSpec = QuadratureSpec(),
                          workers: int = 1) -> CorrelationBreakdown:
    """Correlation pieces at polarization ``sigma`` and coupling scale ``lam``."""
    _check_sigma(sigma)
    if lam == 0.0 or abs(sigma) == 1.0:
        return CorrelationBreakdown(0.0, 0.0, 0.0, 0.0, 0.0, lam, sigma)
    pl = p.with_lambda(lam)
    _, ex = constrained_optimizer(sigma, pl).at_displacement(0.0)
    w2 = p.omega**2
    pc = 0.5 * ex.p2 + 0.5 * w2 * ex.x2 - p.omega / 2
    tc = -p.t * ex.sx + p.t * math.sqrt(1 - sigma**2)
    wc = p.g * ex.szx
    lam_g = pc + tc + lam * wc
    explicit_quad = (lam * p.g) ** 2 * (1 - sigma**2) / (2 * w2)
    quad = coupling_integral(sigma, lam, p, q, workers)
    return CorrelationBreakdown(
        I=lam_g + explicit_quad,
        G=lam_g / lam,
        Pc=pc,
        Tc=tc,
        Wc=wc,
        lam=lam,
        sigma=sigma,
        quad_residual=lam_g - quad.value,
        quad_error=quad.error,
    )


def exchange_energy_check(sigma: float, xi: float, p: ModelParams, steps=EXCHANGE_STEPS) -> float:
    """Richardson estimate of the right derivative of F^λ at λ=0 minus gσξ."""
    target = DensityPair(sigma, xi)
    f0 = levy_lieb(target, p.with_lambda(0.0)).value
    d = [(levy_lieb(target, p.with_lambda(h)).value - f0) / h - p.g * sigma * xi for h in steps]
    # steps halve, so eliminate O(h) then O(h²)
    r1 = [2 * d[1] - d[0], 2 * d[2] - d[1]]
    return (4 * r1[1] - r1[0]) / 3


@dataclass(frozen=True)
class BoundsReport:
    """Margins of the analytic bounds (non-negative means satisfied)."""

    sigma: float
    lam: float
    I: float
    lamG: float
    lower_I: float
    upper_I: float
    lower_G: float
    upper_G: float
    saturation: float | None
    passed: bool


def bounds_suite(sigma: float, lam: float, p: ModelParams, q: QuadratureSpec = QuadratureSpec(),
                 slack: float = 1e-7, workers: int = 1) -> BoundsReport:
    """Check the sandwich bounds on I^λ(σ) and the two-sided bound on λG^λ."""
    _check_sigma(sigma)
    w2 = p.omega**2
    lg2 = (lam * p.g) ** 2
    quad_bound = lg2 * (1 - sigma**2) / (2 * w2)
    kin_bound = p.t * math.sqrt(max(1 - sigma**2, 0.0)) * -math.expm1(-lg2 / p.omega**3)
    value_i = correlation_integral_I(sigma, lam, p, q, workers)
    lam_g = value_i - quad_bound
    lower_i = value_i + slack
    upper_i = min(quad_bound, kin_bound) + slack - value_i
    upper_g = slack - lam_g
    lower_g = lam_g + quad_bound + slack
    ok = min(lower_i, upper_i, upper_g, lower_g) >= 0
    sat = None
    if p.g != 0 and lam >= 8 * p.omega**1.5 / abs(p.g) and abs(sigma) < 1:
        sat = value_i / (p.t * math.sqrt(1 - sigma**2))
        ok = ok and 0.9 <= sat <= 1.001
    return BoundsReport(sigma, lam, value_i, lam_g, lower_i, upper_i, lower_g, upper_g, sat, bool(ok))
