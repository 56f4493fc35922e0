"""Photon-free approximation: potentials, correlation factor and 2x2 model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functionals import constrained_optimizer, multipliers, potential_zero_coupling
from .observables import expectations_from_vector
from .operators import FockBasis, build_rabi_hamiltonian, position_op, spin_op, photon_op, SIGMA_Z
from .params import DensityPair, ExternalPair, ModelParams, ParameterError
from .spectra import eigen_lowest, ground_state

ETA_STEP = 1e-3


def v_dc_exact(sigma: float, xi: float, lam: float, p: ModelParams) -> float:
    """Direct-coupling plus correlation potential v_s - v."""
    target = DensityPair(sigma, xi)
    v_s = potential_zero_coupling(sigma, p)
    v, _ = multipliers(target, p.with_lambda(lam))
    return v_s - v


def v_dc_force_balance(sigma: float, xi: float, lam: float, p: ModelParams) -> float:
    """Same potential from the force-balance relation of both systems."""
    pl = p.with_lambda(lam)
    _, ex = constrained_optimizer(sigma, pl).at_displacement(xi)
    sx_free = math.sqrt(1.0 - sigma * sigma)
    return (p.t * sigma + pl.coupling * ex.sxx) / ex.sx - p.t * sigma / sx_free


def v_dc_photon_free(sigma: float, xi: float, lam: float, p: ModelParams, eta: float = 1.0) -> float:
    """λgξ + η λ²g²σ/ω²."""
    lg = lam * p.g
    return lg * xi + eta * lg**2 * sigma / p.omega**2


def estimate_eta(lam: float, p: ModelParams, step: float = ETA_STEP) -> float:
    """Correlation factor from the slope of the exact potential at σ=0, ξ=0."""
    if p.g == 0.0:
        raise ParameterError("correlation factor undefined without coupling")
    if not lam > 0:
        raise ParameterError("lambda must be > 0")
    slope = (v_dc_exact(step, 0.0, lam, p) - v_dc_exact(-step, 0.0, lam, p)) / (2 * step)
    return p.omega**2 / (lam * p.g) ** 2 * slope


@dataclass(frozen=True)
class PotentialComparison:
    sigma: np.ndarray
    v_dc_exact: np.ndarray
    v_dc_pf: np.ndarray
    v_dc_pf_eta: np.ndarray
    eta_c: float
    lam: float

    def relative_sup_error(self) -> float:
        """sup |exact - η-corrected| / sup |exact|."""
        return float(np.max(np.abs(self.v_dc_exact - self.v_dc_pf_eta)) / np.max(np.abs(self.v_dc_exact)))


def compare_potentials(sigmas, lam: float, p: ModelParams, xi: float = 0.0) -> PotentialComparison:
    sigmas = np.asarray(sigmas, dtype=float)
    eta = estimate_eta(lam, p)
    exact = np.array([v_dc_exact(float(s), xi, lam, p) for s in sigmas])
    bare = np.array([v_dc_photon_free(float(s), xi, lam, p) for s in sigmas])
    corr = np.array([v_dc_photon_free(float(s), xi, lam, p, eta) for s in sigmas])
    return PotentialComparison(sigmas, exact, bare, corr, eta, lam)


@dataclass(frozen=True)
class PFHamiltonian:
    """Two-level matrix and scalar shift; full operator is matrix + shift·1."""

    matrix: np.ndarray
    shift: float

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix) + self.shift


def build_pf_hamiltonian(p: ModelParams, ext: ExternalPair) -> PFHamiltonian:
    """-tσ_x + (v - λg j/ω²)σ_z + [ω/2 - (j² + λ²g²)/(2ω²)]."""
    w2 = p.omega**2
    lg = p.coupling
    bias = ext.v - lg * ext.j / w2
    matrix = np.array([[bias, -p.t], [-p.t, -bias]])
    shift = p.omega / 2 - (ext.j**2 + lg**2) / (2 * w2)
    return PFHamiltonian(matrix, shift)


@dataclass(frozen=True)
class PFComparison:
    """Lowest levels and ground-state observables, full model vs photon-free."""

    full_energies: np.ndarray
    pf_energies: np.ndarray
    d_sigma: float
    d_sx: float
    d_xi: float
    full_sigma: float
    full_sx: float
    full_xi: float
    pf_sigma: float
    pf_sx: float
    pf_xi: float

    @property
    def energy_deltas(self) -> np.ndarray:
        m = min(2, self.full_energies.size)
        return self.pf_energies[:m] - self.full_energies[:m]


def compare_pf(p: ModelParams, ext: ExternalPair, k: int = 2) -> PFComparison:
    """Compare the full spectrum and ground-state observables with the 2x2 model."""
    if k < 1:
        raise ParameterError("k must be >= 1")
    sol = ground_state(p, ext, check_positivity=False)
    h = build_rabi_hamiltonian(p, ext, FockBasis(sol.n_max_used))
    levels, _ = eigen_lowest(h, k)
    full = expectations_from_vector(sol.vector, p.omega)
    pf = build_pf_hamiltonian(p, ext)
    w, vec = np.linalg.eigh(pf.matrix)
    g0 = vec[:, 0]
    pf_sigma = float(g0[0] ** 2 - g0[1] ** 2)
    pf_sx = float(2 * g0[0] * g0[1])
    # x replaced by ξ - (λg/ω²)(σ_z - σ); its mean is -(λgσ + j)/ω²
    pf_xi = -(p.coupling * pf_sigma + ext.j) / p.omega**2
    return PFComparison(
        full_energies=levels.eigenvalues,
        pf_energies=w + pf.shift,
        d_sigma=pf_sigma - full.sigma,
        d_sx=pf_sx - full.sx,
        d_xi=pf_xi - full.xi,
        full_sigma=full.sigma,
        full_sx=full.sx,
        full_xi=full.xi,
        pf_sigma=pf_sigma,
        pf_sx=pf_sx,
        pf_xi=pf_xi,
    )


def matter_sector_levels(p: ModelParams, ext: ExternalPair, n_max: int = 40, tol: float = 1e-8) -> np.ndarray:
    """Levels of the full model whose displaced photon mode is in its vacuum.

    Selected through the photon energy ⟨ω(N+½) + jx⟩ = ω/2 - j²/(2ω²), valid
    when the coupling vanishes.
    """
    basis = FockBasis(n_max)
    h = build_rabi_hamiltonian(p, ext, basis)
    w, vec = np.linalg.eigh(h)
    photon = photon_op(p.omega * (np.diag(np.arange(n_max + 1.0)) + 0.5 * np.eye(n_max + 1))
                       + ext.j * position_op(basis, p.omega))
    e_ph = np.einsum("ik,ij,jk->k", vec, photon, vec)
    target = p.omega / 2 - ext.j**2 / (2 * p.omega**2)
    return w[np.abs(e_ph - target) < tol]
