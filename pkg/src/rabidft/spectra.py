"""Eigensolution, ground-state extraction and Fock-cutoff convergence."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import linalg

from .operators import FockBasis, build_rabi_hamiltonian, interleave_permutation, rabi_banded
from .params import ConvergenceError, ConvergenceOptions, ExternalPair, ModelParams, ParameterError

GAP_TOL = 1e-10
POSITIVITY_TOL = 1e-8


@dataclass(frozen=True)
class SpectrumSlice:
    """Lowest ``k`` eigenvalues in ascending order."""

    eigenvalues: np.ndarray
    k: int


@dataclass(frozen=True)
class GroundSolution:
    """Ground state of the Rabi Hamiltonian at a fixed external pair.

    ``vector`` uses the dense (two-level ⊗ photon) ordering.
    """

    energy: float
    vector: np.ndarray
    gap: float
    n_max_used: int
    converged: bool
    params: ModelParams
    ext: ExternalPair
    trace: tuple = field(default=())

    @property
    def basis(self) -> FockBasis:
        return FockBasis(self.n_max_used)


def check_symmetric(h: np.ndarray, rtol: float = 1e-12) -> None:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(float(np.max(np.abs(h))), 1.0) if h.size else 1.0
    if np.max(np.abs(h - h.T), initial=0.0) > rtol * scale:
        raise ValueError("matrix is not symmetric")


def eigen_lowest(h: np.ndarray, k: int) -> tuple[SpectrumSlice, np.ndarray]:
    """Lowest ``k`` eigenpairs of a dense real symmetric matrix.

    Returns
    -------
    (SpectrumSlice, vectors) with eigenvectors as columns.
    """
    check_symmetric(h)
    dim = h.shape[0]
    if not 1 <= k <= dim:
        raise ParameterError(f"need 1 <= k <= {dim}, got {k}")
    w, vec = linalg.eigh(h, subset_by_index=(0, k - 1))
    return SpectrumSlice(w, k), vec


def banded_matvec(band: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Product of an upper-banded (bandwidth 2) symmetric matrix with ``x``."""
    d, b1, b2 = band[2], band[1], band[0]
    y = d[:, None] * x if x.ndim == 2 else d * x
    c1 = b1[1:, None] if x.ndim == 2 else b1[1:]
    c2 = b2[2:, None] if x.ndim == 2 else b2[2:]
    y[:-1] += c1 * x[1:]
    y[1:] += c1 * x[:-1]
    y[:-2] += c2 * x[2:]
    y[2:] += c2 * x[:-2]
    return y


def lowest_banded(band: np.ndarray, block: int = 3, max_iter: int = 12):
    """Two lowest eigenpairs of a banded symmetric matrix.

    Eigenvalues come from LAPACK band bisection; eigenvectors from shifted
    block inverse iteration with Rayleigh-Ritz, which stays cheap at large
    cutoffs and is insensitive to near-degeneracy of the lowest pair.  Only
    the first vector is iterated to full accuracy.

    Returns
    -------
    (energies[2], vectors[:, 2]) in the banded (interleaved) ordering.
    """
    dim = band.shape[1]
    block = min(block, dim)
    if dim <= 64:
        w, vec = linalg.eig_banded(band, select="i", select_range=(0, min(1, dim - 1)))
        return w, vec
    w = linalg.eig_banded(band, eigvals_only=True, select="i", select_range=(0, block - 1))
    scale = 1.0 + abs(w[0])
    shift = 1e-7 * scale
    x = np.random.default_rng(12345).standard_normal((dim, block))
    for _ in range(6):
        shifted = band.copy()
        shifted[2] -= w[0] - shift
        try:
            factor = linalg.cholesky_banded(shifted, lower=False)
            break
        except linalg.LinAlgError:
            shift *= 10.0
    else:
        raise ConvergenceError("shifted band matrix not positive definite")
    for _ in range(max_iter):
        x = linalg.cho_solve_banded((factor, False), x)
        x, _ = np.linalg.qr(x)
        hx = banded_matvec(band, x)
        theta, rot = np.linalg.eigh(x.T @ hx)
        x = x @ rot
        hx = hx @ rot
        if np.linalg.norm(hx[:, 0] - x[:, 0] * theta[0]) <= 1e-12 * scale:
            break
    return w[:2], x[:, :2]


@lru_cache(maxsize=64)
def _hermite_table(n_max: int, omega: float, npts: int = 401) -> tuple[np.ndarray, np.ndarray]:
    """Oscillator eigenfunctions on a grid spanning the classically allowed region."""
    half = np.sqrt((2 * n_max + 1) / omega)
    x = np.linspace(-half, half, npts)
    y = np.sqrt(omega) * x
    table = np.empty((npts, n_max + 1))
    table[:, 0] = (omega / np.pi) ** 0.25 * np.exp(-0.5 * y * y)
    if n_max >= 1:
        table[:, 1] = np.sqrt(2.0) * y * table[:, 0]
    for n in range(1, n_max):
        table[:, n + 1] = np.sqrt(2.0 / (n + 1)) * y * table[:, n] - np.sqrt(n / (n + 1)) * table[:, n - 1]
    return x, table


def position_wavefunction(vector: np.ndarray, n_max: int, omega: float):
    """Position-space components (ψ_up(x), ψ_down(x)) of a dense-ordered vector.

    Returns
    -------
    x, psi_up, psi_down
    """
    x, table = _hermite_table(n_max, float(omega))
    nph = n_max + 1
    return x, table @ vector[:nph], table @ vector[nph:]


def fix_sign(vector: np.ndarray, n_max: int, omega: float) -> np.ndarray:
    """Choose the global sign so the position-space amplitude of largest size is positive."""
    _, up, down = position_wavefunction(vector, n_max, omega)
    both = np.concatenate([up, down])
    return vector if both[np.argmax(np.abs(both))] >= 0 else -vector


def is_positive(vector: np.ndarray, n_max: int, omega: float, tol: float = POSITIVITY_TOL) -> bool:
    _, up, down = position_wavefunction(vector, n_max, omega)
    return bool(min(up.min(), down.min()) >= -tol)


def solve_fixed_cutoff(p: ModelParams, ext: ExternalPair, n_max: int):
    """Lowest two levels and ground vector (dense ordering) at a fixed cutoff."""
    band = rabi_banded(p, ext, n_max)
    w, vec = lowest_banded(band)
    dense = np.empty_like(vec[:, 0])
    dense[interleave_permutation(n_max)] = vec[:, 0]
    return float(w[0]), float(w[1] - w[0]), dense


def ground_state(
    p: ModelParams,
    ext: ExternalPair = ExternalPair(),
    opts: ConvergenceOptions = ConvergenceOptions(),
    check_positivity: bool = True,
) -> GroundSolution:
    """Ground state at the smallest converged cutoff of the doubling schedule.

    Raises
    ------
    ConvergenceError
        If |E(n) - E(2n)| stays above tolerance up to ``opts.n_limit``.
    """
    n = opts.n_start
    trace = []
    e_n, gap_n, vec_n = solve_fixed_cutoff(p, ext, n)
    trace.append((n, e_n))
    while 2 * n <= opts.n_limit:
        e_2n, gap_2n, vec_2n = solve_fixed_cutoff(p, ext, 2 * n)
        trace.append((2 * n, e_2n))
        if abs(e_n - e_2n) < opts.tol_energy:
            vec = fix_sign(vec_n, n, p.omega)
            # the finer vector has no truncation ripple in the tails
            if check_positivity and gap_n > GAP_TOL and not is_positive(fix_sign(vec_2n, 2 * n, p.omega), 2 * n, p.omega):
                raise ConvergenceError("ground state is not positive in position space", trace)
            return GroundSolution(e_n, vec, max(gap_n, 0.0), n, True, p, ext, tuple(trace))
        n, e_n, gap_n, vec_n = 2 * n, e_2n, gap_2n, vec_2n
    raise ConvergenceError(f"no cutoff convergence up to n_max={opts.n_limit}", trace)


def spectral_gap_check(sol: GroundSolution) -> bool:
    """True iff the ground state is separated from the first excited level."""
    return bool(sol.gap > GAP_TOL)


def rabi_spectrum(p: ModelParams, ext: ExternalPair, n_max: int, k: int):
    """Lowest ``k`` eigenpairs of the dense Rabi Hamiltonian at a fixed cutoff."""
    h = build_rabi_hamiltonian(p, ext, FockBasis(n_max))
    return eigen_lowest(h, k)
