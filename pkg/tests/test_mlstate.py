import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from quasipos.errors import DomainError, NoMinimumError
from quasipos.mlstate import MLParams, amplitude, ml_wavefunction, solve_ml_params, \
    verify_ml_conditions
from quasipos.model import identity, kmm, sqrt_model
from quasipos.quadrature import build_grid


def kmm_dx_by_grid_search(beta):
    """Independent oracle: in u = sqrt(beta) rho the KMM amplitude is cos(u)^a.

    dx^2(a) = beta int (d/du cos^a)^2 / int cos^(2a); scan a on a fine grid.
    """
    def dx2(a):
        num = integrate.quad(lambda u: (a * math.cos(u) ** (a - 1) * math.sin(u)) ** 2,
                             -math.pi / 2, math.pi / 2)[0]
        den = integrate.quad(lambda u: math.cos(u) ** (2 * a), -math.pi / 2, math.pi / 2)[0]
        return beta * num / den

    grid = np.linspace(0.6, 1.6, 201)
    vals = [dx2(a) for a in grid]
    k = int(np.argmin(vals))
    return grid[k], math.sqrt(vals[k])


@pytest.mark.parametrize("beta", [0.25, 1.0, 4.0])
def test_kmm_parameters(beta):
    ml = solve_ml_params(kmm(beta))
    assert ml.delta_p == pytest.approx(beta ** -0.5, rel=1e-8)
    assert ml.mean_f == pytest.approx(2.0, rel=1e-8)
    assert ml.mean_p == 0.0
    assert ml.achieved_delta_x == pytest.approx(math.sqrt(beta), rel=1e-10)


def test_grid_search_oracle():
    a_best, dx_best = kmm_dx_by_grid_search(1.0)
    assert a_best == pytest.approx(1.0, abs=0.005)
    ml = solve_ml_params(kmm(1.0))
    assert ml.c / 1.0 == pytest.approx(a_best, abs=0.005)
    assert ml.achieved_delta_x == pytest.approx(dx_best, rel=1e-6)


@given(st.floats(-20.0, 20.0))
def test_ml_conditions_random_xi(xi):
    m = kmm(1.0)
    g = build_grid(m, 512)
    rep = verify_ml_conditions(ml_wavefunction(m, solve_ml_params(m, xi), g), g)
    assert rep.passed, rep.to_dict()
    assert abs(rep.variance_identity) < 1e-6


def test_epsilon_grid_norm():
    m = kmm(1.0)
    g = build_grid(m, 256, epsilon=0.5)
    st_ = ml_wavefunction(m, solve_ml_params(m), g)
    assert float(np.sum(g.weights * np.abs(st_.samples.values) ** 2)) == pytest.approx(1.0)


def test_amplitude_shape():
    ml = solve_ml_params(kmm(2.0))
    p = np.linspace(-30, 30, 61)
    # A = (1 + beta p^2)^(-c / 2 beta), c = beta
    np.testing.assert_allclose(amplitude(kmm(2.0), ml, p), (1 + 2 * p ** 2) ** -0.5, rtol=1e-8)


def test_no_minimum_models():
    for m in (identity(), sqrt_model(0.5)):
        with pytest.raises(NoMinimumError):
            solve_ml_params(m)


def test_bounded_asymmetric_domain_has_no_interior_minimum():
    from quasipos.model import model_from_dict
    with pytest.warns(UserWarning):
        m = model_from_dict({"family": "kmm", "beta": 1.0, "p_min": -1.0, "p_max": 4.0})
    with pytest.raises(NoMinimumError):
        solve_ml_params(m)


def test_params_validation():
    with pytest.raises(DomainError):
        MLParams(0.0, 0.0, -1.0, 2.0)
    assert MLParams.ordinary().c == 0.0
