import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasipos import overlap as ov
from quasipos.errors import NoMinimumError
from quasipos.mlstate import MLParams, solve_ml_params
from quasipos.model import identity, kmm, sqrt_model
from quasipos.quadrature import build_grid
from quasipos.wavefunction import random_smooth_state

# <xi|0> for KMM beta = 1: int cos^2(u) cos(d u) du / (pi/2), mpmath at 30 digits
KMM_OVERLAP = {0.5: 0.960337403900913140859, 1.0: 0.848826363156775124101,
               2.0: 0.5, 3.0: 0.169765272631355024821}


@pytest.mark.parametrize("d", sorted(KMM_OVERLAP))
def test_ml_overlap_frozen(d):
    m = kmm(1.0)
    ml = solve_ml_params(m)
    assert ov.ml_overlap(m, ml, d, 0.0) == pytest.approx(KMM_OVERLAP[d], abs=1e-10)
    # the midpoint sum is only algebraically convergent when d is not an even integer
    g = build_grid(m, 1024)
    assert ov.ml_overlap(m, ml, d, 0.0, g) == pytest.approx(KMM_OVERLAP[d], abs=1e-9)


@given(st.floats(-30, 30))
def test_position_overlap_matches_quadrature(d):
    m = kmm(1.0)
    assert ov.position_overlap(m, d) == pytest.approx(ov.band_limited_overlap(m, d), abs=1e-10)


@pytest.mark.parametrize("beta", [0.25, 1.0, 4.0])
def test_sinc_zeros(beta):
    dx = math.sqrt(beta)
    for k in (1, 2, 5):
        assert abs(ov.position_overlap(kmm(beta), 2 * k * dx)) < 1e-15
    assert ov.position_overlap(kmm(beta), dx) == pytest.approx(2 / math.pi, rel=1e-14)


def test_overlap_matrix_hermitian():
    m = kmm(1.0)
    mat = ov.overlap_matrix(m, solve_ml_params(m), [-1.0, 0.0, 0.7, 2.5], build_grid(m, 128))
    np.testing.assert_allclose(mat, mat.conj().T, atol=1e-15)
    np.testing.assert_allclose(np.diag(mat), 1.0)


def test_plane_wave_limit():
    m = kmm(1.0)
    d = np.linspace(0.1, 6, 25)
    errs = []
    for dp in (2.0, 4.0, 8.0, 16.0):
        ml = MLParams(0.0, 0.0, dp, 2.0)
        errs.append(max(abs(ov.ml_overlap(m, ml, x, 0.0) - ov.position_overlap(m, x)) for x in d))
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_no_minimum():
    for m in (identity(), sqrt_model(1.0)):
        with pytest.raises(NoMinimumError):
            ov.position_overlap(m, 1.0)


@pytest.mark.parametrize("beta", [0.25, 1.0])
def test_identity_resolution(beta, rng):
    m = kmm(beta)
    g = build_grid(m, 128)
    rep = ov.identity_resolution_check(m, solve_ml_params(m), g, random_smooth_state(g, rng))
    assert rep.relative_l2_error < 1e-7
    assert rep.kernel_error < 1e-6
