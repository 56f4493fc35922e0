"""Ground-energy map, inverse map and constrained-search functional.

The photon current enters only through a shift of the oscillator origin:
with ``x' = x + j/ω²`` the Hamiltonian at ``(v, j)`` equals the one at
``(v - λg j/ω², 0)`` minus ``j²/(2ω²)``.  The constrained search is therefore
done once per polarization in the unshifted (``j = 0``) frame, where the
optimizer sits at displacement ``-λgσ/ω²``; other displacements follow by
translation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .observables import ExpectationSet, expectations_from_vector
from .params import (
    BoundaryError,
    ConvergenceError,
    ConvergenceOptions,
    DegenerateGroundStateError,
    DensityPair,
    ExternalPair,
    ModelParams,
    ParameterError,
)
from .rootfind import decreasing_root
from .spectra import GAP_TOL, ground_state, solve_fixed_cutoff

SIGMA_MARGIN = 1e-3
SIGMA_TOL = 1e-10


# ---------------------------------------------------------------- closed forms

def energy_zero_coupling(p: ModelParams, ext: ExternalPair) -> float:
    """Ground energy without coupling: ω/2 - sqrt(v²+t²) - j²/(2ω²)."""
    return p.omega / 2 - math.hypot(ext.v, p.t) - ext.j**2 / (2 * p.omega**2)


def density_zero_coupling(p: ModelParams, ext: ExternalPair) -> DensityPair:
    """Ground-state density without coupling."""
    return DensityPair(-ext.v / math.hypot(ext.v, p.t), -ext.j / p.omega**2)


def functional_zero_coupling(target: DensityPair, p: ModelParams) -> float:
    """ω/2 - t sqrt(1-σ²) + ω²ξ²/2."""
    s, xi = target.sigma, target.xi
    return p.omega / 2 - p.t * math.sqrt(max(1.0 - s * s, 0.0)) + p.omega**2 * xi**2 / 2


def potential_zero_coupling(sigma: float, p: ModelParams) -> float:
    """Potential producing ``sigma`` without coupling: -tσ/sqrt(1-σ²)."""
    return -p.t * sigma / math.sqrt(1.0 - sigma * sigma)


def boundary_functional(target: DensityPair, p: ModelParams) -> float:
    """Functional at fully polarized states σ = ±1."""
    if abs(target.sigma) != 1.0:
        raise ParameterError("boundary functional needs |sigma| == 1")
    return p.omega / 2 + target.sigma * p.coupling * target.xi + p.omega**2 * target.xi**2 / 2


def energy_lower_bound(p: ModelParams, ext: ExternalPair) -> float:
    """Lower bound from completing the squares in both oscillator branches."""
    w2 = p.omega**2
    lg = p.coupling
    return p.omega / 2 - math.hypot(p.t, ext.v - ext.j * lg / w2) - (ext.j**2 + lg**2) / (2 * w2)


def trial_state_upper_bounds(target: DensityPair, p: ModelParams) -> tuple[float, float]:
    """Energies of the unshifted and coupling-shifted Gaussian trial states."""
    s, xi = target.sigma, target.xi
    if abs(s) > 1:
        raise ParameterError("|sigma| must be <= 1")
    w2 = p.omega**2
    lg = p.coupling
    root = math.sqrt(max(1.0 - s * s, 0.0))
    common = p.omega / 2 + w2 * xi**2 / 2 + lg * s * xi
    u0 = common - p.t * root
    u_lam = common - lg**2 * (1 - s * s) / (2 * w2) - p.t * root * math.exp(-lg**2 / p.omega**3)
    return u0, u_lam


# ---------------------------------------------------------------- energy map

def ground_energy(p: ModelParams, ext: ExternalPair, opts: ConvergenceOptions = ConvergenceOptions()) -> float:
    """Ground energy E(v, j) at converged cutoff."""
    return ground_state(p, ext, opts, check_positivity=False).energy


# ---------------------------------------------------------------- constrained search

@dataclass(frozen=True)
class Optimizer:
    """Constrained minimizer at polarization ``sigma`` in the j = 0 frame.

    ``shift`` is the multiplier K (potential in that frame).  When the two
    lowest levels cannot be resolved numerically the optimizer is the
    two-state mixture of the bracket ends with weights ``weights``; this is
    flagged by ``degenerate``.  ``expect`` and ``internal_energy`` refer to
    displacement ``-λgσ/ω²``.
    """

    sigma: float
    params: ModelParams
    shift: float
    achieved_sigma: float
    internal_energy: float
    expect: ExpectationSet
    gap: float
    n_max: int
    iterations: int
    degenerate: bool
    weights: tuple

    @property
    def xi_centre(self) -> float:
        return -self.params.coupling * self.sigma / self.params.omega**2

    def at_displacement(self, xi: float) -> tuple[float, ExpectationSet]:
        """(internal energy, expectations) of the optimizer shifted to ``xi``."""
        p = self.params
        xi0 = self.xi_centre
        zeta = xi - xi0
        energy = self.internal_energy + p.omega**2 * zeta * (xi0 + zeta / 2) + p.coupling * self.sigma * zeta
        return energy, self.expect.displaced(zeta)


def _centre_cutoff(p: ModelParams, shift: float, opts: ConvergenceOptions) -> int:
    n = opts.n_start
    e_n = solve_fixed_cutoff(p, ExternalPair(shift, 0.0), n)[0]
    trace = [(n, e_n)]
    while 2 * n <= opts.n_limit:
        e_2n = solve_fixed_cutoff(p, ExternalPair(shift, 0.0), 2 * n)[0]
        trace.append((2 * n, e_2n))
        if abs(e_n - e_2n) < opts.tol_energy:
            return n
        n, e_n = 2 * n, e_2n
    raise ConvergenceError(f"no cutoff convergence up to n_max={opts.n_limit}", trace)


def _initial_shift(sigma: float, p: ModelParams) -> float:
    damp = math.exp(-min(p.coupling**2 / p.omega**3, 700.0))
    return -p.t * damp * sigma / math.sqrt(1.0 - sigma * sigma)


@lru_cache(maxsize=4096)
def _optimizer_cached(sigma: float, p: ModelParams, tol: float, opts: ConvergenceOptions) -> Optimizer:
    k0 = _initial_shift(sigma, p)
    n_max = _centre_cutoff(p, k0, opts)
    for _ in range(8):
        # diagonal entries bound the resolvable shift
        scale = p.omega * (n_max + 1) + abs(p.coupling) * math.sqrt(n_max + 1) + p.t + abs(k0)
        xtol = 4e-16 * scale

        def residual(k: float):
            energy, gap, vec = solve_fixed_cutoff(p, ExternalPair(k, 0.0), n_max)
            up, dn = vec[: n_max + 1], vec[n_max + 1:]
            s = float(up @ up - dn @ dn)
            return s - sigma, (k, energy, gap, vec, s)

        step = max(abs(k0), 1e-2 * p.t)
        res = decreasing_root(residual, k0, step, ftol=tol, xtol=xtol)
        k_final = res.x
        n_check = _centre_cutoff(p, k_final, opts)
        if n_check <= n_max:
            break
        n_max, k0 = n_check, k_final
    else:
        raise ConvergenceError("cutoff kept growing during constrained search")

    if res.converged:
        k, energy, gap, vec, s = res.payload
        ex = expectations_from_vector(vec, p.omega)
        # first-order correction from achieved to target polarization
        return Optimizer(sigma, p, k, s, energy - k * sigma, ex, gap, n_max, res.iterations,
                         gap <= GAP_TOL, (1.0,))
    # bracket collapsed below the resolvable width: mix the two ends
    k_lo, e_lo, gap_lo, v_lo, s_lo = res.payload_lo
    k_hi, e_hi, gap_hi, v_hi, s_hi = res.payload_hi
    w = (sigma - s_hi) / (s_lo - s_hi)
    ex_lo = expectations_from_vector(v_lo, p.omega)
    ex_hi = expectations_from_vector(v_hi, p.omega)
    mixed = ExpectationSet(*[w * a + (1 - w) * b for a, b in zip(_astuple(ex_lo), _astuple(ex_hi))])
    internal = w * (e_lo - k_lo * s_lo) + (1 - w) * (e_hi - k_hi * s_hi)
    k_mid = w * k_lo + (1 - w) * k_hi
    return Optimizer(sigma, p, k_mid, mixed.sigma, internal, mixed, min(gap_lo, gap_hi), n_max,
                     res.iterations, True, (w, 1 - w))


def _astuple(ex: ExpectationSet) -> tuple:
    return (ex.sigma, ex.xi, ex.sx, ex.szx, ex.x2, ex.p2, ex.syp, ex.sxx, ex.n_photon, ex.sxp2)


def constrained_optimizer(
    sigma: float,
    p: ModelParams,
    tol: float = SIGMA_TOL,
    opts: ConvergenceOptions = ConvergenceOptions(),
) -> Optimizer:
    """Minimizer of the internal energy at fixed polarization (j = 0 frame)."""
    if not abs(sigma) < 1.0:
        raise BoundaryError(f"|sigma|={abs(sigma)} is not representable by a finite potential")
    return _optimizer_cached(float(sigma), p, float(tol), opts)


@dataclass(frozen=True)
class HKInverseResult:
    v: float
    j: float
    iterations: int
    achieved_sigma: float
    achieved_xi: float
    n_max: int = 0


def current_from_density(target: DensityPair, p: ModelParams) -> float:
    """Photon current fixed by the Maxwell-type relation."""
    return -p.omega**2 * target.xi - p.coupling * target.sigma


def multipliers(target: DensityPair, p: ModelParams, opt: Optimizer | None = None) -> tuple[float, float]:
    """External pair (v, j) whose ground state has density ``target``.

    No degeneracy check; see :func:`hk_inverse` for the certified version.
    """
    if opt is None:
        opt = constrained_optimizer(target.sigma, p)
    j = current_from_density(target, p)
    v = opt.shift + p.coupling * j / p.omega**2
    return v, j


def hk_inverse(
    target: DensityPair,
    p: ModelParams,
    tol_sigma: float = SIGMA_TOL,
    margin: float = SIGMA_MARGIN,
    opts: ConvergenceOptions = ConvergenceOptions(),
) -> HKInverseResult:
    """Invert the density map: find (v, j) producing ``target``.

    Raises
    ------
    BoundaryError
        If |σ| exceeds 1 - margin.
    DegenerateGroundStateError
        If the ground state at the solution is not separated by a gap.
    """
    if abs(target.sigma) > 1.0 - margin + 1e-12:
        raise BoundaryError(f"|sigma|={abs(target.sigma)} exceeds 1 - margin")
    opt = constrained_optimizer(target.sigma, p, tol_sigma, opts)
    if opt.degenerate:
        raise DegenerateGroundStateError(
            f"ground state degenerate (gap {opt.gap:.3e}) at sigma={target.sigma}, lambda*g={p.coupling}"
        )
    v, j = multipliers(target, p, opt)
    # full-frame displacement = centred-frame value shifted by -j/ω²
    xi_ach = opt.expect.xi + target.xi - opt.xi_centre
    return HKInverseResult(v, j, opt.iterations, opt.achieved_sigma, xi_ach, opt.n_max)


@dataclass(frozen=True)
class FunctionalValue:
    value: float
    source: str
    density: DensityPair
    lam: float
    v: float = float("nan")
    j: float = float("nan")


def internal_energy(target: DensityPair, p: ModelParams) -> float:
    """Functional value from the optimizer and the exact translation rule."""
    if abs(target.sigma) == 1.0:
        return boundary_functional(target, p)
    return constrained_optimizer(target.sigma, p).at_displacement(target.xi)[0]


def levy_lieb(
    target: DensityPair,
    p: ModelParams,
    opts: ConvergenceOptions = ConvergenceOptions(),
) -> FunctionalValue:
    """Constrained-search functional F(σ, ξ) = E(v, j) - vσ - jξ."""
    if abs(target.sigma) == 1.0:
        return FunctionalValue(boundary_functional(target, p), "closed-form", target, p.lam)
    opt = constrained_optimizer(target.sigma, p, opts=opts)
    v, j = multipliers(target, p, opt)
    energy = ground_energy(p, ExternalPair(v, j), opts)
    value = energy - v * target.sigma - j * target.xi
    return FunctionalValue(value, "constrained-search", target, p.lam, v, j)


@dataclass(frozen=True)
class GridOracleResult:
    value: float
    v: float
    j: float
    on_boundary: bool


def legendre_grid_oracle(
    target: DensityPair,
    p: ModelParams,
    v_range: tuple[float, float],
    j_range: tuple[float, float],
    step: float,
) -> GridOracleResult:
    """Brute-force maximum of E(v, j) - vσ - jξ over a rectangular grid.

    Test oracle only.  ``on_boundary`` marks an inconclusive result.
    """
    vs = np.arange(v_range[0], v_range[1] + 0.5 * step, step)
    js = np.arange(j_range[0], j_range[1] + 0.5 * step, step)
    vals = np.empty((vs.size, js.size))
    for a, v in enumerate(vs):
        for b, j in enumerate(js):
            vals[a, b] = ground_energy(p, ExternalPair(float(v), float(j))) - v * target.sigma - j * target.xi
    a, b = np.unravel_index(int(np.argmax(vals)), vals.shape)
    edge = a in (0, vs.size - 1) or b in (0, js.size - 1)
    return GridOracleResult(float(vals[a, b]), float(vs[a]), float(js[b]), bool(edge))


def displacement_check(sigma: float, xi: float, zeta: float, p: ModelParams) -> float:
    """Residual of the translation rule for the functional."""
    if zeta == 0.0:
        return 0.0
    f1 = levy_lieb(DensityPair(sigma, xi + zeta), p).value
    f0 = levy_lieb(DensityPair(sigma, xi), p).value
    return f1 - f0 - p.omega**2 * zeta * (xi + zeta / 2) - p.coupling * sigma * zeta
