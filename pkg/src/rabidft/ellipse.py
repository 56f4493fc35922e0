"""Elliptic model for the correlation integral and least-squares fits."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .adiabatic import correlation_integral_direct, correlation_integral_I
from .params import FitError, ModelParams, ParameterError
from .quadrature import QuadratureSpec

A_FLOOR = 1e-9
DEFAULT_SIGMAS = np.linspace(-0.95, 0.95, 33)


@dataclass(frozen=True)
class EllipseFit:
    """Fitted semi-axis ``a``, scale ``b`` and derived offset ``d``."""

    a: float
    b: float
    d: float
    rms: float
    lam: float = float("nan")
    t: float = float("nan")
    flag: str = "ok"


def ellipse_model(sigma, a: float, b: float, omega: float = 1.0):
    """ω(b/a)(sqrt(a²-σ²) - sqrt(a²-1)); vanishes at σ = ±1."""
    sigma = np.asarray(sigma, dtype=float)
    return omega * (b / a) * (np.sqrt(a * a - sigma * sigma) - math.sqrt(a * a - 1.0))


def offset(a: float, b: float) -> float:
    return b * math.sqrt(1.0 - 1.0 / (a * a))


def _jacobian(sigma: np.ndarray, a: float, b: float, omega: float) -> np.ndarray:
    s = np.sqrt(a * a - sigma * sigma)
    r = math.sqrt(a * a - 1.0)
    d_b = omega * (s - r) / a
    d_a = omega * b * (-(s - r) / (a * a) + 1.0 / s - 1.0 / r)
    # chain rule for a = 1 + A_FLOOR + exp(alpha)
    return np.column_stack([d_a * (a - 1.0 - A_FLOOR), d_b])


def fit_ellipse(sigma, values, omega: float = 1.0, init: tuple[float, float] | None = None) -> EllipseFit:
    """Least-squares fit of the elliptic model to (σ, I) samples.

    Raises
    ------
    FitError
        If the damped Gauss-Newton iteration fails.
    """
    sigma = np.asarray(sigma, dtype=float)
    values = np.asarray(values, dtype=float)
    if sigma.size < 8 or sigma.size != values.size:
        raise ParameterError("need at least 8 matching samples")
    if np.any(values < -1e-9):
        raise ParameterError("correlation samples must be non-negative")
    if np.max(np.abs(values)) < 1e-12:
        return EllipseFit(float("nan"), 0.0, 0.0, 0.0, flag="unidentifiable")
    a0 = 1.5 if init is None else init[0]
    if init is None:
        i0 = float(np.interp(0.0, sigma, values)) if sigma.min() <= 0 <= sigma.max() else float(values.max())
        b0 = i0 * a0 / (omega * (a0 - math.sqrt(a0 * a0 - 1.0)))
    else:
        b0 = init[1]

    def unpack(x):
        return 1.0 + A_FLOOR + math.exp(min(x[0], 50.0)), x[1]

    def resid(x):
        a, b = unpack(x)
        return ellipse_model(sigma, a, b, omega) - values

    def jac(x):
        a, b = unpack(x)
        return _jacobian(sigma, a, b, omega)

    x0 = np.array([math.log(a0 - 1.0 - A_FLOOR), b0])
    try:
        sol = least_squares(resid, x0, jac=jac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise FitError(f"fit failed: {exc}", (a0, b0)) from exc
    a, b = unpack(sol.x)
    if not (np.isfinite(a) and np.isfinite(b)) or sol.status <= 0:
        raise FitError(f"fit failed: {sol.message}", (a, b))
    rms = float(np.sqrt(np.mean(sol.fun**2)))
    flag = "ok" if sol.x[0] < 49.0 else "flat"
    return EllipseFit(float(a), float(b), float(offset(a, b)), rms, flag=flag)


def correlation_samples(lam: float, p: ModelParams, sigmas=DEFAULT_SIGMAS, method: str = "direct",
                        q: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """I^λ(σ) on a σ grid, evaluated once per |σ| (the integral is even in σ)."""
    cache = {}
    out = []
    for s in np.asarray(sigmas, dtype=float):
        key = abs(float(s))
        if key not in cache:
            if method == "direct":
                cache[key] = correlation_integral_direct(key, lam, p)
            else:
                cache[key] = correlation_integral_I(key, lam, p, q)
        out.append(cache[key])
    return np.array(out)


def fit_sweep(lams, ts, p: ModelParams, sigmas=DEFAULT_SIGMAS, workers: int = 1, method: str = "direct") -> list[EllipseFit]:
    """One fit per (λ, t) cell; failed cells are recorded with a flag."""
    lams, ts = list(lams), list(ts)
    if not lams or not ts:
        raise ParameterError("grids must be non-empty")

    def cell(args):
        lam, t = args
        q = ModelParams(p.omega, t, p.g, 1.0)
        try:
            values = np.clip(correlation_samples(lam, q, sigmas, method), 0.0, None)
            fit = fit_ellipse(sigmas, values, p.omega)
            return EllipseFit(fit.a, fit.b, fit.d, fit.rms, lam, t, fit.flag)
        except (FitError, ParameterError, RuntimeError) as exc:
            return EllipseFit(float("nan"), float("nan"), float("nan"), float("nan"), lam, t, f"failed: {exc}")

    cells = [(lam, t) for lam in lams for t in ts]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(cell, cells))
    return [cell(c) for c in cells]
