import numpy as np
import pytest

from quasipos.errors import ConventionError
from quasipos.model import kmm
from quasipos.quadrature import build_grid
from quasipos.wavefunction import WaveFunction, require_same


def test_arithmetic_checks_tags():
    g = build_grid(kmm(1.0), 16)
    a = WaveFunction(np.ones(16, complex), g)
    assert np.all((a + a).values == 2)
    assert np.all((2 * a - a).values == 1)
    with pytest.raises(ConventionError):
        a + a.replace(convention="primed")
    with pytest.raises(ConventionError):
        require_same(a, convention="primed")


def test_bad_tags():
    g = build_grid(kmm(1.0), 16)
    with pytest.raises(ConventionError):
        WaveFunction(np.ones(16, complex), g, representation="position")
