"""Expectation values and hypervirial residuals for Rabi eigenstates."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .params import ExternalPair, ModelParams


@dataclass(frozen=True)
class ExpectationSet:
    """One-body expectation values of a normalized real state.

    ``n_photon`` is ⟨a†a⟩ and ``sxp2`` is ⟨σ_x p²⟩, kept alongside the
    eight standard quantities because several identities need them.
    """

    sigma: float
    xi: float
    sx: float
    szx: float
    x2: float
    p2: float
    syp: float
    sxx: float
    n_photon: float = 0.0
    sxp2: float = 0.0

    def displaced(self, zeta: float) -> "ExpectationSet":
        """Expectations after the photon shift x -> x + zeta.

        Momentum, hopping and σ_y p terms are shift invariant; the photon
        number is not tracked through the shift and is recomputed from x2, p2.
        """
        x2 = self.x2 + 2.0 * zeta * self.xi + zeta * zeta
        return replace(
            self,
            xi=self.xi + zeta,
            szx=self.szx + zeta * self.sigma,
            sxx=self.sxx + zeta * self.sx,
            x2=x2,
            n_photon=float("nan"),
            sxp2=float("nan"),
        )


@dataclass(frozen=True)
class HypervirialReport:
    r_maxwell: float
    r_sigmay: float
    r_virial: float
    r_force: float
    r_coupling: float

    def max_abs(self) -> float:
        return max(abs(self.r_maxwell), abs(self.r_sigmay), abs(self.r_virial),
                   abs(self.r_force), abs(self.r_coupling))


def _split(vector: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    half = vector.shape[0] // 2
    return vector[:half], vector[half:]


def _x_apply(c: np.ndarray, omega: float) -> np.ndarray:
    off = np.sqrt(np.arange(1, c.shape[0]) / (2.0 * omega))
    out = np.zeros_like(c)
    out[:-1] += off * c[1:]
    out[1:] += off * c[:-1]
    return out


def _antisym_p_apply(c: np.ndarray, omega: float) -> np.ndarray:
    # sqrt(ω/2)(a† - a) c
    off = np.sqrt(np.arange(1, c.shape[0]) * omega / 2.0)
    out = np.zeros_like(c)
    out[1:] += off * c[:-1]
    out[:-1] -= off * c[1:]
    return out


def expectations_from_vector(vector: np.ndarray, omega: float) -> ExpectationSet:
    """All expectation values of a dense-ordered real unit vector."""
    up, dn = _split(np.asarray(vector, dtype=float))
    n = np.arange(up.shape[0], dtype=float)
    xu, xd = _x_apply(up, omega), _x_apply(dn, omega)
    n_photon = float(n @ (up * up + dn * dn))
    x2 = float(xu @ xu + xd @ xd)
    p2 = 2.0 * omega * (n_photon + 0.5) - omega**2 * x2
    # σ_x p² with p² = 2ω(N+½) - ω² x²
    p2d = 2.0 * omega * (n + 0.5) * dn - omega**2 * _x_apply(xd, omega)
    return ExpectationSet(
        sigma=float(up @ up - dn @ dn),
        xi=float(up @ xu + dn @ xd),
        sx=float(2.0 * up @ dn),
        szx=float(up @ xu - dn @ xd),
        x2=x2,
        p2=float(p2),
        syp=float(2.0 * up @ _antisym_p_apply(dn, omega)),
        sxx=float(up @ xd + dn @ xu),
        n_photon=n_photon,
        sxp2=float(2.0 * up @ p2d),
    )


def expectations(sol, basis=None, p: ModelParams | None = None) -> ExpectationSet:
    """Expectation values of a solved state (``GroundSolution`` or vector)."""
    if p is None:
        p = sol.params
    vector = getattr(sol, "vector", sol)
    return expectations_from_vector(vector, p.omega)


def hypervirial_residuals(state, p: ModelParams, ext: ExternalPair) -> HypervirialReport:
    """Residuals of the Maxwell, virial, force-balance and coupling relations.

    ``state`` may be a solution object, a vector or an ``ExpectationSet``.
    """
    ex = state if isinstance(state, ExpectationSet) else expectations(state, p=p)
    w2 = p.omega**2
    lg = p.coupling
    return HypervirialReport(
        r_maxwell=w2 * ex.xi + lg * ex.sigma + ext.j,
        # real representation: ⟨σ_y⟩ vanishes identically
        r_sigmay=0.0,
        r_virial=ex.p2 - w2 * ex.x2 - lg * ex.szx - ext.j * ex.xi,
        r_force=p.t * ex.sigma + lg * ex.sxx + ext.v * ex.sx,
        r_coupling=w2 * ex.szx + 2.0 * p.t * ex.syp + lg + ext.j * ex.sigma,
    )


def kinetic_hopping_residual(ex: ExpectationSet, p: ModelParams) -> float:
    """Residual of ½ξ + ½⟨σ_z x⟩ = -(t/ω²)⟨σ_y p⟩ - λg(1-σ²)/(2ω²) + ξ(1+σ)/2."""
    w2 = p.omega**2
    lhs = 0.5 * ex.xi + 0.5 * ex.szx
    rhs = -(p.t / w2) * ex.syp - p.coupling * (1.0 - ex.sigma**2) / (2.0 * w2) + 0.5 * ex.xi * (1.0 + ex.sigma)
    return float(lhs - rhs)


def second_order_bound_margin(ex: ExpectationSet, p: ModelParams) -> float:
    """ω²(1-σ²)/(8t) + ½⟨σ_x p²⟩, non-negative for optimizers."""
    return float(p.omega**2 * (1.0 - ex.sigma**2) / (8.0 * p.t) + 0.5 * ex.sxp2)
