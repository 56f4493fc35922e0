import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rabidft.operators import FockBasis, build_rabi_hamiltonian
from rabidft.params import ConvergenceError, ConvergenceOptions, ExternalPair, ModelParams, ParameterError
from rabidft.spectra import (
    eigen_lowest,
    ground_state,
    is_positive,
    lowest_banded,
    spectral_gap_check,
)
from rabidft.operators import rabi_banded

import oracles

# frozen from oracles.converged_ground (dense numpy solver, photon-major basis)
E0_G3 = -4.0592257263017775
E0_G3_V01_J01 = -4.2626112763075215
E1_G3_V01_J01 = -3.8656277928050593


def test_eigen_lowest_small():
    sl, _ = eigen_lowest(np.diag([3.0, 1.0, 2.0]), 2)
    assert np.allclose(sl.eigenvalues, [1, 2])
    sl, _ = eigen_lowest(np.array([[0.8, -1], [-1, 0.2]]), 1)
    assert sl.eigenvalues[0] == pytest.approx(0.5 - math.sqrt(1.09), abs=1e-14)


def test_eigen_lowest_rejects_bad_input():
    with pytest.raises(ValueError):
        eigen_lowest(np.array([[1.0, 2.0], [0.0, 1.0]]), 1)
    with pytest.raises(ParameterError):
        eigen_lowest(np.eye(3), 4)


def test_two_eigensolver_paths_agree():
    h = build_rabi_hamiltonian(ModelParams(1, 1, 3), ExternalPair(), FockBasis(40))
    lapack = eigen_lowest(h, 1)[0].eigenvalues[0]
    jacobi = oracles.jacobi_eigvalsh(h)[0]
    assert abs(lapack - jacobi) < 1e-10


@given(g=st.floats(-3, 3), v=st.floats(-2, 2), j=st.floats(-2, 2), n_max=st.integers(20, 60))
@settings(max_examples=25, deadline=None)
def test_banded_solver_matches_dense(g, v, j, n_max):
    p, ext = ModelParams(1, 1, g), ExternalPair(v, j)
    w, vec = lowest_banded(rabi_banded(p, ext, n_max))
    ref = np.linalg.eigvalsh(build_rabi_hamiltonian(p, ext, FockBasis(n_max)))[:2]
    assert np.allclose(w, ref, atol=1e-11, rtol=0)


def test_uncoupled_closed_forms():
    sol = ground_state(ModelParams(1, 1, 0), ExternalPair())
    assert sol.energy == pytest.approx(-0.5, abs=1e-12)
    assert sol.gap == pytest.approx(1.0, abs=1e-9)
    sol = ground_state(ModelParams(1, 1, 0), ExternalPair(1, 0))
    assert sol.energy == pytest.approx(0.5 - math.sqrt(2), abs=1e-12)


def test_frozen_coupled_energies():
    sol = ground_state(ModelParams(1, 1, 3), ExternalPair())
    assert sol.energy == pytest.approx(E0_G3, abs=1e-10)
    sol = ground_state(ModelParams(1, 1, 3), ExternalPair(0.1, 0.1))
    assert sol.energy == pytest.approx(E0_G3_V01_J01, abs=1e-10)
    assert sol.energy + sol.gap == pytest.approx(E1_G3_V01_J01, abs=1e-9)
    assert spectral_gap_check(sol)


def test_ground_state_positive_and_converged():
    sol = ground_state(ModelParams(1.3, 0.7, -1.5), ExternalPair(0.3, -0.8))
    assert sol.converged
    assert is_positive(sol.vector, sol.n_max_used, 1.3)
    assert np.linalg.norm(sol.vector) == pytest.approx(1.0, abs=1e-12)
    e_big = np.linalg.eigvalsh(build_rabi_hamiltonian(sol.params, sol.ext, FockBasis(2 * sol.n_max_used)))[0]
    assert abs(sol.energy - e_big) < 1e-10


def test_degenerate_spectrum_flagged():
    sl, _ = eigen_lowest(np.diag([1.0, 1.0, 2.0]), 2)
    assert sl.eigenvalues[1] - sl.eigenvalues[0] == 0.0


def test_convergence_failure_reports_trace():
    opts = ConvergenceOptions(n_start=10, n_limit=20, tol_energy=1e-12)
    with pytest.raises(ConvergenceError) as info:
        ground_state(ModelParams(1, 1, 3), ExternalPair(), opts)
    assert [n for n, _ in info.value.trace] == [10, 20]
