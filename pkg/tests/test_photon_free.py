import math

import numpy as np
import pytest

from rabidft.functionals import energy_zero_coupling
from rabidft.params import ExternalPair, ModelParams, ParameterError
from rabidft.photon_free import (
    build_pf_hamiltonian,
    compare_pf,
    compare_potentials,
    estimate_eta,
    matter_sector_levels,
    v_dc_exact,
    v_dc_force_balance,
    v_dc_photon_free,
)

# frozen from oracles.functional: potential difference at σ=0.5 and its σ=0 slope
V_DC_S05 = 3.922737141375429
ETA_L1 = 0.8889056127298992
# frozen from the dense oracle spectrum at cutoff 640
FULL_LOW_TWO = (-4.2626112763075215, -3.8656277928050593)

P3 = ModelParams(1, 1, 3)


def test_potential_examples():
    assert v_dc_exact(0.4, 0.3, 0.0, P3) == pytest.approx(0.0, abs=1e-9)
    assert v_dc_exact(0.0, 0.0, 1.7, P3) == pytest.approx(0.0, abs=1e-9)
    assert v_dc_exact(0.5, 0.0, 1.0, P3) == pytest.approx(V_DC_S05, abs=1e-8)


def test_force_balance_route():
    for s in np.linspace(-0.9, 0.9, 7):
        assert v_dc_force_balance(s, 0.0, 1.0, P3) == pytest.approx(v_dc_exact(s, 0.0, 1.0, P3), abs=1e-6)


def test_photon_free_potential():
    assert v_dc_photon_free(0.0, 0.7, 1.0, P3) == pytest.approx(2.1)
    assert v_dc_photon_free(1.0, 0.0, 1.0, ModelParams(1, 1, 2)) == pytest.approx(4.0)
    assert v_dc_photon_free(0.5, 0.0, 1.0, P3, eta=0.8) == pytest.approx(3.6)


def test_correlation_factor():
    assert estimate_eta(1.0, P3) == pytest.approx(ETA_L1, abs=1e-7)
    assert abs(estimate_eta(3.0, P3) - 1) < 0.05
    assert estimate_eta(0.3, P3) < 1
    with pytest.raises(ParameterError):
        estimate_eta(1.0, ModelParams(1, 1, 0))


def test_potential_comparison_accuracy():
    cmp = compare_potentials(np.linspace(-0.7, 0.7, 15), 2.5, P3)
    assert cmp.relative_sup_error() <= 0.1
    assert np.all(np.abs(cmp.v_dc_exact - cmp.v_dc_pf_eta) <= np.abs(cmp.v_dc_exact - cmp.v_dc_pf) + 1e-12)


def test_two_level_hamiltonian():
    p, ext = ModelParams(1.2, 0.7, 1.4, 0.9), ExternalPair(0.3, -0.5)
    lg = p.coupling
    root = math.hypot(p.t, ext.v - lg * ext.j / p.omega**2)
    base = p.omega / 2 - (ext.j**2 + lg**2) / (2 * p.omega**2)
    assert np.allclose(build_pf_hamiltonian(p, ext).eigenvalues(), [base - root, base + root], atol=1e-14)
    p0 = ModelParams(1.2, 0.7, 0.0)
    assert build_pf_hamiltonian(p0, ext).eigenvalues()[0] == pytest.approx(energy_zero_coupling(p0, ext), abs=1e-14)


def test_zero_coupling_matches_matter_sector():
    p, ext = ModelParams(1.1, 0.8, 0.0), ExternalPair(0.4, 0.6)
    levels = matter_sector_levels(p, ext)
    assert levels.size == 2
    assert np.allclose(levels, build_pf_hamiltonian(p, ext).eigenvalues(), atol=1e-10)
    cmp = compare_pf(p, ext)
    assert np.max(np.abs([cmp.d_sigma, cmp.d_sx, cmp.d_xi])) < 1e-10


def test_coupled_comparison():
    cmp = compare_pf(P3, ExternalPair(0.1, 0.1))
    assert np.allclose(cmp.full_energies, FULL_LOW_TWO, atol=1e-9)
    assert np.allclose(cmp.pf_energies, build_pf_hamiltonian(P3, ExternalPair(0.1, 0.1)).eigenvalues())
    cmp = compare_pf(P3, ExternalPair(0.0, 0.0))
    assert abs(cmp.d_sigma) < 1e-9
