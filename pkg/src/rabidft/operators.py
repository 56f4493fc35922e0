"""Truncated Fock-space operators and model Hamiltonians.

Basis ordering is (two-level factor) ⊗ (photon factor): index ``s*(n_max+1) + n``
with ``s=0`` the σ_z = +1 level.  All matrices are real symmetric ndarrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import DickeParams, ExternalPair, ModelParams, ParameterError, UnsupportedSizeError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
# i*σ_y is real; σ_y p = (iσ_y) ⊗ (-i p) with -i p real antisymmetric
I_SIGMA_Y = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class FockBasis:
    """Photon cutoff and number of two-level sites."""

    n_max: int = 40
    n_sites: int = 1

    def __post_init__(self):
        if self.n_max < 0:
            raise ParameterError("n_max must be >= 0")
        if not 1 <= self.n_sites:
            raise ParameterError("n_sites must be >= 1")

    @property
    def dim_photon(self) -> int:
        return self.n_max + 1

    @property
    def dim_total(self) -> int:
        return 2**self.n_sites * (self.n_max + 1)


def photon_number_op(basis: FockBasis) -> np.ndarray:
    """Number operator on the photon factor, diag(0, ..., n_max)."""
    return np.diag(np.arange(basis.dim_photon, dtype=float))


def _ladder_offdiag(n_max: int) -> np.ndarray:
    return np.sqrt(np.arange(1, n_max + 1, dtype=float))


def position_op(basis: FockBasis, omega: float) -> np.ndarray:
    """Photon position operator on the photon factor."""
    if not omega > 0:
        raise ParameterError(f"omega must be > 0, got {omega}")
    off = _ladder_offdiag(basis.n_max) / np.sqrt(2.0 * omega)
    return np.diag(off, 1) + np.diag(off, -1)


def momentum_antisym(basis: FockBasis, omega: float) -> np.ndarray:
    """Real antisymmetric matrix sqrt(ω/2)(a† - a), i.e. ``-i p``."""
    off = _ladder_offdiag(basis.n_max) * np.sqrt(omega / 2.0)
    return np.diag(off, -1) - np.diag(off, 1)


def sigma_y_p_op(basis: FockBasis, omega: float) -> np.ndarray:
    """Real symmetric representation of σ_y ⊗ p on the full Rabi space."""
    if not omega > 0:
        raise ParameterError(f"omega must be > 0, got {omega}")
    return np.kron(I_SIGMA_Y, momentum_antisym(basis, omega))


def spin_op(matrix: np.ndarray, basis: FockBasis) -> np.ndarray:
    """Lift a 2x2 matrix to the full Rabi space."""
    return np.kron(matrix, np.eye(basis.dim_photon))


def photon_op(matrix: np.ndarray) -> np.ndarray:
    """Lift a photon-factor matrix to the full Rabi space."""
    return np.kron(np.eye(2), matrix)


def build_rabi_hamiltonian(p: ModelParams, ext: ExternalPair, basis: FockBasis) -> np.ndarray:
    """Dense Rabi Hamiltonian with external pair, dimension 2(n_max+1)."""
    num = photon_number_op(basis)
    x = position_op(basis, p.omega)
    eye_ph = np.eye(basis.dim_photon)
    h = np.kron(np.eye(2), p.omega * (num + 0.5 * eye_ph))
    h -= p.t * np.kron(SIGMA_X, eye_ph)
    h += np.kron(p.coupling * SIGMA_Z + ext.j * np.eye(2), x)
    h += ext.v * np.kron(SIGMA_Z, eye_ph)
    return h


def rabi_banded(p: ModelParams, ext: ExternalPair, n_max: int) -> np.ndarray:
    """Upper banded storage (bandwidth 2) of the Rabi Hamiltonian.

    Uses the interleaved ordering ``2*n + s``; :func:`interleave_permutation`
    maps it back to the dense ordering.
    """
    dim = 2 * (n_max + 1)
    n = np.repeat(np.arange(n_max + 1, dtype=float), 2)
    sz = np.tile([1.0, -1.0], n_max + 1)
    band = np.zeros((3, dim))
    band[2] = p.omega * (n + 0.5) + ext.v * sz
    # spin flip within the same photon number
    band[1, 1::2] = -p.t
    # photon hop n -> n+1 with spin-dependent amplitude
    xoff = np.sqrt((n[:-2] + 1.0) / (2.0 * p.omega))
    band[0, 2:] = (p.coupling * sz[:-2] + ext.j) * xoff
    return band


def interleave_permutation(n_max: int) -> np.ndarray:
    """Index array ``perm`` with ``dense[perm] == interleaved``."""
    nph = n_max + 1
    s = np.tile([0, 1], nph)
    n = np.repeat(np.arange(nph), 2)
    return s * nph + n


def lifted_sigma_z(n_sites: int, k: int) -> np.ndarray:
    """Diagonal of σ_z acting on site ``k`` (1-based) of ``n_sites`` levels."""
    if not 1 <= k <= n_sites:
        raise ParameterError(f"site index {k} out of range 1..{n_sites}")
    idx = np.arange(2**n_sites)
    bit = (idx >> (n_sites - k)) & 1
    return 1.0 - 2.0 * bit


def lifted_sigma_x(n_sites: int, k: int) -> np.ndarray:
    """σ_x acting on site ``k`` (1-based) as a dense 2^N matrix."""
    if not 1 <= k <= n_sites:
        raise ParameterError(f"site index {k} out of range 1..{n_sites}")
    left = np.eye(2 ** (k - 1))
    right = np.eye(2 ** (n_sites - k))
    return np.kron(np.kron(left, SIGMA_X), right)


def build_dicke_hamiltonian(
    p: DickeParams, v_vec, j: float, basis: FockBasis
) -> np.ndarray:
    """Dense Dicke Hamiltonian on 2^N (n_max+1) states."""
    n_sites = p.N
    if n_sites > 3:
        raise UnsupportedSizeError(f"N={n_sites} not supported")
    v_vec = tuple(float(x) for x in v_vec)
    if len(v_vec) != n_sites:
        raise ParameterError("v_vec length must equal N")
    eye_ph = np.eye(basis.dim_photon)
    eye_sp = np.eye(2**n_sites)
    num = photon_number_op(basis)
    x = position_op(basis, p.omega)
    h = np.kron(eye_sp, p.omega * (num + 0.5 * eye_ph))
    coupling = j * np.ones(2**n_sites)
    onsite = np.zeros(2**n_sites)
    for k in range(1, n_sites + 1):
        sz = lifted_sigma_z(n_sites, k)
        h -= p.t_vec[k - 1] * np.kron(lifted_sigma_x(n_sites, k), eye_ph)
        coupling += p.lam * p.g_vec[k - 1] * sz
        onsite += v_vec[k - 1] * sz
    h += np.kron(np.diag(coupling), x)
    h += np.kron(np.diag(onsite), eye_ph)
    return h
