"""Overlaps of maximal-localization states and the resolution of identity."""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, NoMinimumError
from .mlstate import amplitude
from .model import kinematic_scales, p_array
from .transform import kernel_normalization, to_quasiposition, xi_grid


def ml_overlap(model, ml, xi1, xi2, grid=None):
    """<xi1|xi2> for normalized ML states.

    On ``grid`` the integral int dp/f A^2 exp(-i (xi1 - xi2) rho) is a grid
    sum; without a grid it is integrated adaptively in rho (finite rho_max
    only), which serves as the reference.
    """
    d = float(xi1) - float(xi2)
    if grid is not None:
        amp2 = np.asarray(amplitude(model, ml, grid.nodes), dtype=float) ** 2
        w = grid.base_weights * amp2
        return complex(np.sum(w * np.exp(-1j * d * grid.rho)) / np.sum(w))
    scales = kinematic_scales(model)
    if not scales.finite:
        raise ConfigurationError("adaptive ML overlaps need a finite rho_max; pass a grid")

    def amp2(r):
        return float(amplitude(model, ml, float(p_array(model, r)))) ** 2

    lo, hi = scales.rho_lo, scales.rho_hi
    norm = integrate.quad(amp2, lo, hi, epsabs=0, epsrel=1e-13, limit=500)[0]
    if d == 0:
        return 1.0 + 0.0j
    kw = dict(epsabs=1e-15, epsrel=1e-13, limit=500, wvar=d)
    re, im = _oscillatory(amp2, lo, hi, kw)
    return complex(re, im) / norm


def _oscillatory(func, lo, hi, kw):
    # parts that vanish exactly cannot meet a relative tolerance; quad's
    # roundoff warning is expected there
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re = integrate.quad(func, lo, hi, weight="cos", **kw)[0]
        im = -integrate.quad(func, lo, hi, weight="sin", **kw)[0]
    return re, im


def overlap_matrix(model, ml, xi_values, grid=None):
    xi_values = np.asarray(xi_values, dtype=float)
    out = np.empty((xi_values.size, xi_values.size), dtype=complex)
    for i, a in enumerate(xi_values):
        for j, b in enumerate(xi_values):
            out[i, j] = 1.0 if i == j else (np.conj(out[j, i]) if j < i
                                            else ml_overlap(model, ml, a, b, grid))
    return out


def position_overlap(model, dxi):
    """<x'|x> = sinc(dxi / (2 dx_min)) for position eigenvectors."""
    scales = kinematic_scales(model)
    if not scales.finite:
        raise NoMinimumError("position overlap needs a finite rho_max (position "
                             "eigenvectors are orthogonal delta functions otherwise)")
    return np.sinc(np.asarray(dxi, dtype=float) / (2.0 * scales.delta_x_min))


def band_limited_overlap(model, dxi):
    """(1/2 rho_max) int_{rho range} exp(-i dxi rho) drho by adaptive quadrature."""
    scales = kinematic_scales(model)
    if not scales.finite:
        raise NoMinimumError("band-limited overlap needs a finite rho_max")
    lo, hi = scales.rho_lo, scales.rho_hi
    d = float(dxi)
    if d == 0:
        return 1.0 + 0.0j
    one = lambda r: 1.0  # noqa: E731
    kw = dict(epsabs=1e-15, epsrel=1e-14, limit=500, wvar=d)
    re, im = _oscillatory(one, lo, hi, kw)
    return complex(re, im) / (hi - lo)


@dataclass(frozen=True)
class IdentityReport:
    l2_error: float
    relative_l2_error: float
    kernel_error: float
    kernel_diagonal_error: float
    xi_points: int
    xi_half_width: float

    def to_dict(self):
        return dict(self.__dict__)


def identity_resolution_check(model, ml, grid, psi, xi_nodes=None):
    """Reconstruct psi through (1/2pi) int dxi A^{-2} |xi><xi| and test the kernel.

    ``kernel_error`` is max |K_jk w_k - delta_jk| for the discretized
    <p_j|p_k> built from ML projections, where the exact kernel is the
    discrete delta delta_jk / w_j of the dp/f measure.
    """
    if grid.epsilon:
        raise ConfigurationError("identity resolution is checked on epsilon = 0 grids")
    xg = xi_grid(grid) if xi_nodes is None else xi_nodes
    proj = to_quasiposition(grid, psi, xg, ml)
    xg = proj.grid
    n = kernel_normalization(grid, ml)
    amp = np.asarray(amplitude(model, ml, grid.nodes), dtype=float) * np.ones(grid.size)
    # <p|xi> for normalized states, assembled directly
    p_xi = n * amp[:, None] * np.exp(-1j * np.outer(grid.rho, xg.nodes))
    weight = xg.weights / (2 * math.pi * n * n)
    recon = (p_xi / amp[:, None] ** 2) @ (weight * proj.values)
    diff = recon - psi.values
    l2 = math.sqrt(float(np.sum(grid.weights * np.abs(diff) ** 2)))
    nrm = math.sqrt(float(np.sum(grid.weights * np.abs(psi.values) ** 2)))
    xi_p = np.conj(p_xi).T
    kernel = (p_xi / amp[:, None] ** 2) @ (weight[:, None] * xi_p)
    scaled = kernel * grid.weights[None, :]
    err = np.abs(scaled - np.eye(grid.size))
    return IdentityReport(l2, l2 / nrm if nrm else l2, float(err.max()),
                          float(np.max(np.abs(np.diag(scaled) - 1.0))), xg.size,
                          float(xg.nodes[-1]))
