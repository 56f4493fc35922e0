import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rabidft.ellipse import (
    DEFAULT_SIGMAS,
    correlation_samples,
    ellipse_model,
    fit_ellipse,
    fit_sweep,
    offset,
)
from rabidft.params import ModelParams, ParameterError


def test_synthetic_recovery():
    values = ellipse_model(DEFAULT_SIGMAS, 1.3, 0.8)
    fit = fit_ellipse(DEFAULT_SIGMAS, values)
    assert fit.a == pytest.approx(1.3, abs=1e-6)
    assert fit.b == pytest.approx(0.8, abs=1e-6)
    assert fit.rms < 1e-9
    assert fit.d == pytest.approx(offset(1.3, 0.8))
    assert fit.flag == "ok"


def test_zero_samples_unidentifiable():
    fit = fit_ellipse(DEFAULT_SIGMAS, np.zeros_like(DEFAULT_SIGMAS))
    assert fit.flag == "unidentifiable" and fit.b == 0 and fit.rms == 0


def test_input_validation():
    with pytest.raises(ParameterError):
        fit_ellipse(DEFAULT_SIGMAS[:5], np.ones(5))
    with pytest.raises(ParameterError):
        fit_ellipse(DEFAULT_SIGMAS, -np.ones_like(DEFAULT_SIGMAS))


@given(a=st.floats(1.0 + 1e-6, 50), b=st.floats(0, 10), omega=st.floats(0.2, 3))
@settings(max_examples=50, deadline=None)
def test_model_vanishes_at_full_polarization(a, b, omega):
    assert np.allclose(ellipse_model([-1.0, 1.0], a, b, omega), 0.0, atol=1e-12)


def test_sweep_edges_and_noise():
    cells = fit_sweep([0.0, 1.5], [1.5], ModelParams(1, 1, 1))
    assert cells[0].flag == "unidentifiable"
    assert cells[1].flag == "ok" and cells[1].rms <= 0.05
    assert (cells[1].lam, cells[1].t) == (1.5, 1.5)


def test_small_hopping_gives_small_scale():
    fit = fit_sweep([1.5], [0.05], ModelParams(1, 1, 1))[0]
    assert abs(fit.b) < 0.05


def test_strong_coupling_approaches_hopping_curve():
    p = ModelParams(1, 1, 3)
    values = np.clip(correlation_samples(3.0, p), 0, None)
    fit = fit_ellipse(DEFAULT_SIGMAS, values)
    grid = np.linspace(-0.9, 0.9, 37)
    assert np.max(np.abs(ellipse_model(grid, fit.a, fit.b) - np.sqrt(1 - grid**2))) <= 0.1
