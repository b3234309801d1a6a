import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasipos import quasiop as qo
from quasipos.errors import ConventionError, ResolutionError
from quasipos.mlstate import ml_wavefunction, solve_ml_params
from quasipos.model import kmm
from quasipos.quadrature import build_grid
from quasipos.transform import prime_map
from quasipos.wavefunction import random_smooth_state

M = kmm(1.0)
ML = solve_ml_params(M)


@given(st.integers(0, 10 ** 6))
def test_commutators(seed):
    g = build_grid(M, 1024)
    psi = random_smooth_state(g, np.random.default_rng(seed))
    assert qo.commutator_residual(g, ML, psi) < 1e-6


def test_commutator_convergence_order(rng):
    coef_seed = 7
    res = []
    for n in (64, 128, 256):
        g = build_grid(M, n)
        res.append(qo.commutator_residual(g, ML, random_smooth_state(
            g, np.random.default_rng(coef_seed))))
    rates = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert np.all(rates >= 8.0), (res, rates)


def test_x_is_hermitian(rng):
    g = build_grid(M, 512)
    a, b = random_smooth_state(g, rng), random_smooth_state(g, rng)
    lhs = qo.expectation(g, a, qo.apply_x(g, b))
    rhs = np.conj(qo.expectation(g, b, qo.apply_x(g, a)))
    assert lhs == pytest.approx(rhs, abs=1e-10)


@pytest.mark.parametrize("xi0", [-2.0, 0.0, 0.3, 5.0])
def test_ml_state_is_xi_eigenvector(xi0):
    g = build_grid(M, 512)
    st_ = ml_wavefunction(M, ML.with_xi(xi0), g).samples
    resid = qo.apply_xi(g, ML, st_) - xi0 * st_
    assert math.sqrt(qo.norm_squared(g, resid)) < 1e-6
    rep = qo.uncertainty_report(g, ML, st_)
    assert rep.xi_p_product < 1e-6
    assert rep.delta_x * rep.delta_p == pytest.approx(0.5 * rep.mean_f, rel=1e-6)


@given(st.integers(0, 10 ** 6))
def test_robertson_bound(seed):
    g = build_grid(M, 512)
    rep = qo.uncertainty_report(g, ML, random_smooth_state(g, np.random.default_rng(seed)))
    assert rep.gup_satisfied


@given(st.integers(0, 10 ** 6))
def test_corrected_measure(seed):
    g = build_grid(M, 1024)
    r = np.random.default_rng(seed)
    psi, phi = random_smooth_state(g, r), random_smooth_state(g, r)
    lhs = qo.expectation(g, psi, qo.apply_x(g, phi))
    rhs = qo.expectation_corrected(g, ML, prime_map(psi, ML), "xi", prime_map(phi, ML))
    assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


def test_corrected_needs_primed(rng):
    g = build_grid(M, 64)
    psi = random_smooth_state(g, rng)
    with pytest.raises(ConventionError):
        qo.expectation_corrected(g, ML, psi, "xi", psi)


def test_under_resolved_derivative_detected():
    g = build_grid(M, 32)
    wild = random_smooth_state(g, np.random.default_rng(0), n_modes=15)
    with pytest.raises(ResolutionError):
        qo.d_rho(g, wild, check=True)


def test_report_json(rng):
    g = build_grid(M, 128)
    rep = qo.uncertainty_report(g, ML, random_smooth_state(g, rng))
    assert '"xi_p_product"' in rep.to_json()
