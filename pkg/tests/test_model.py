import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasipos import model as qm
from quasipos.errors import ConfigurationError, DomainError

# int_0^inf dp / (1 + p^4), mpmath at 30 digits
RHO_MAX_QUARTIC = 1.11072073453959156175


@pytest.mark.parametrize("beta", [0.25, 1.0, 4.0])
def test_kmm_scales_numeric_vs_arctan(beta):
    sc = qm.kinematic_scales(qm.kmm(beta), method="numeric")
    assert sc.rho_max == pytest.approx(math.pi / (2 * math.sqrt(beta)), rel=1e-10)
    assert sc.delta_x_min == pytest.approx(math.sqrt(beta), rel=1e-10)


def test_quartic_custom_rho_max():
    m = qm.custom_from_expression("1 + p**4", name="quartic")
    sc = qm.kinematic_scales(m)
    assert sc.rho_max == pytest.approx(RHO_MAX_QUARTIC, rel=1e-10)
    assert sc.delta_x_min == pytest.approx(math.pi / (2 * RHO_MAX_QUARTIC), rel=1e-10)


def test_identity_and_sqrt_have_no_minimum():
    for m in (qm.identity(), qm.sqrt_model(0.3)):
        sc = qm.kinematic_scales(m)
        assert math.isinf(sc.rho_max)
        assert sc.delta_x_min == 0.0


def test_small_beta_kmm_is_finite():
    sc = qm.kinematic_scales(qm.kmm(1e-4))
    assert sc.rho_max == pytest.approx(math.pi / 2 / 1e-2, rel=1e-12)


@given(st.floats(0.01, 10.0), st.floats(-50.0, 50.0))
def test_rho_quadrature_matches_closed_form(beta, p):
    m = qm.kmm(beta)
    assert qm.rho_of_p(m, p) == pytest.approx(math.atan(math.sqrt(beta) * p) / math.sqrt(beta),
                                              rel=1e-10, abs=1e-12)


@given(st.floats(0.01, 4.0), st.floats(-0.95, 0.95))
def test_rho_p_round_trip(beta, s):
    for m in (qm.kmm(beta), qm.sqrt_model(beta)):
        lim = qm.kinematic_scales(m).rho_hi
        r = s * (lim if math.isfinite(lim) else 20.0)
        assert qm.rho_of_p(m, qm.p_of_rho(m, r)) == pytest.approx(r, rel=1e-9, abs=1e-11)


@given(st.lists(st.floats(-30, 30), min_size=2, max_size=20))
def test_rho_is_monotone(ps):
    ps = np.sort(np.array(ps))
    r = qm.rho_array(qm.kmm(0.5), ps)
    assert np.all(np.diff(r) >= 0)


def test_custom_expression_matches_builtin():
    a, b = qm.custom_from_expression("1 + beta*p**2", beta=0.7), qm.kmm(0.7)
    p = np.linspace(-5, 5, 11)
    np.testing.assert_allclose(qm.evaluate_f(a, p), qm.evaluate_f(b, p), rtol=1e-15)
    assert qm.rho_of_p(a, 3.0) == pytest.approx(qm.rho_of_p(b, 3.0), rel=1e-11)


def test_dict_round_trip():
    for m in (qm.kmm(2.0), qm.sqrt_model(0.1), qm.identity(),
              qm.custom_from_expression("1 + beta*p**4", beta=0.5)):
        back = qm.model_from_dict(qm.model_to_dict(m))
        assert back.family == m.family and back.beta == m.beta
        np.testing.assert_allclose(qm.evaluate_f(back, [0.3, 2.0]), qm.evaluate_f(m, [0.3, 2.0]))


@pytest.mark.parametrize("doc", [{"family": "kmm", "beta": -1},
                                 {"family": "nope"},
                                 {"family": "kmm", "colour": 1},
                                 {"family": "custom"},
                                 {"family": "kmm", "beta": "1"}])
def test_bad_model_documents(doc):
    with pytest.raises((ConfigurationError, DomainError)):
        qm.model_from_dict(doc)


def test_domain_is_enforced():
    m = qm.model_from_dict({"family": "kmm", "beta": 1.0, "p_min": -1.0, "p_max": 1.0})
    with pytest.raises(DomainError):
        qm.evaluate_f(m, 2.0)


def test_nonpositive_f_is_rejected():
    with pytest.raises(ConfigurationError):
        qm.custom_from_expression("1 - p**2")
