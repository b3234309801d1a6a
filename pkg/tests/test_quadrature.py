import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasipos import quadrature as qq
from quasipos.errors import ConfigurationError, ConventionError, DomainError
from quasipos.model import identity, kmm, sqrt_model
from quasipos.wavefunction import WaveFunction, random_smooth_state


def test_total_measure_is_rho_span():
    g = qq.build_grid(kmm(1.0), 64)
    assert np.sum(g.weights) == pytest.approx(math.pi, rel=1e-14)


@pytest.mark.parametrize("layout", ["rho", "gauss"])
def test_gaussian_moment_against_reference(layout):
    m = kmm(0.5)
    g = qq.build_grid(m, 256, layout=layout)
    func = lambda p: np.exp(-p ** 2) * p ** 2  # noqa: E731
    ref = qq.reference_integral(m, func)
    assert qq.integrate_samples(g, func(g.nodes)) == pytest.approx(ref.real, rel=1e-10)


@given(st.floats(-1.0, 1.0))
def test_epsilon_weights(eps):
    m = kmm(1.0)
    g = qq.build_grid(m, 200, epsilon=eps)
    func = lambda p: 1.0 / (1.0 + p ** 2) ** 3  # noqa: E731
    ref = qq.reference_integral(m, func, epsilon=eps).real
    assert qq.integrate_samples(g, func(g.nodes)) == pytest.approx(ref, rel=1e-8)


def test_with_epsilon_keeps_nodes():
    g = qq.build_grid(kmm(1.0), 32)
    e = g.with_epsilon(0.5)
    np.testing.assert_array_equal(g.nodes, e.nodes)
    np.testing.assert_allclose(e.weights, g.weights * g.f_values ** 0.5)


def test_infinite_rho_needs_window():
    with pytest.raises(ConfigurationError):
        qq.build_grid(identity(), 64)
    g = qq.build_grid(sqrt_model(0.2), 64, cutoff=10.0)
    assert abs(g.nodes).max() < 10.0


def test_small_cutoff_is_noted():
    g = qq.build_grid(kmm(1.0), 64, cutoff=3.0)
    assert g.warnings


@pytest.mark.parametrize("kwargs", [{"cutoff": -1.0}, {"rho_range": (-3.0, 3.0)}])
def test_bad_windows(kwargs):
    with pytest.raises(DomainError):
        qq.build_grid(kmm(1.0), 64, **kwargs)


def test_inner_product_properties(rng):
    g = qq.build_grid(kmm(1.0), 128)
    a, b = random_smooth_state(g, rng), random_smooth_state(g, rng)
    assert qq.inner_product(g, a, b) == pytest.approx(np.conj(qq.inner_product(g, b, a)))
    assert qq.norm(g, a) == pytest.approx(1.0)
    with pytest.raises(ConventionError):
        qq.inner_product(g, a, WaveFunction(b.values, g, convention="primed"))
