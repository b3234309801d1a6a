"""Generalized Fourier transform between momentum and quasi-position space.

Forward:  psi(xi) = int dp/f <xi|p> psi(p),       <xi|p> = N A(p) exp(i xi rho(p))
Inverse:  psi(p)  = (1/2pi) int dxi <xi|p>^{-1} psi(xi)

N normalizes the maximal-localization states on the momentum grid (N = 1
for the plane-wave limit A = 1).  On a rho-uniform grid with spacing h the
default xi grid covers one alias period [-pi/h, pi/h] with trapezoid
weights; the discrete pair is then an exact inverse.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConventionError, TruncationWarning
from .kernels import fourier_sum
from .mlstate import amplitude
from .wavefunction import WaveFunction, require_same

DEFAULT_OVERSAMPLING = 4
A_FLOOR = 1e-12
EDGE_THRESHOLD = 1e-6


@dataclass(frozen=True, eq=False)
class XiGrid:
    nodes: np.ndarray
    weights: np.ndarray
    spacing: float
    full_period: bool

    @property
    def size(self):
        return self.nodes.size


def _alias_half_width(grid):
    if grid.layout == "rho":
        return math.pi / grid.spacing
    return math.pi / float(np.min(np.diff(grid.rho)))


def xi_grid(grid, oversampling=DEFAULT_OVERSAMPLING, half_width=None):
    """Uniform symmetric xi grid with spacing <= pi / (W * oversampling).

    W is the width of the rho window of ``grid``.  Without ``half_width``
    the grid spans one alias period of the momentum grid.
    """
    width = grid.rho_range[1] - grid.rho_range[0]
    max_step = math.pi / (width * oversampling)
    period = _alias_half_width(grid)
    half = period if half_width is None else float(half_width)
    intervals = max(2, math.ceil(2 * half / max_step - 1e-9))
    nodes = np.linspace(-half, half, intervals + 1)
    step = 2 * half / intervals
    weights = np.full(nodes.size, step)
    weights[[0, -1]] *= 0.5
    for arr in (nodes, weights):
        arr.setflags(write=False)
    full = grid.layout == "rho" and half >= period * (1 - 1e-12)
    return XiGrid(nodes, weights, step, full)


def kernel_normalization(grid, ml):
    """N such that the sampled state N A exp(-i xi rho) has unit norm; 1 if A = 1."""
    if ml.c == 0.0:
        return 1.0
    amp = amplitude(grid.model, ml, grid.nodes)
    return 1.0 / math.sqrt(float(np.sum(grid.base_weights * amp ** 2)))


def _amplitude_on(grid, ml):
    return np.asarray(amplitude(grid.model, ml, grid.nodes), dtype=float) * np.ones(grid.size)


def _eps_factor(grid):
    if grid.epsilon:
        return grid.f_values ** (-0.5 * grid.epsilon)
    return 1.0


def _as_xi_grid(xi_nodes):
    if isinstance(xi_nodes, XiGrid):
        return xi_nodes
    nodes = np.asarray(xi_nodes, dtype=float)
    if nodes.size > 1:
        steps = np.diff(nodes)
        weights = np.concatenate([[steps[0] / 2], (steps[:-1] + steps[1:]) / 2, [steps[-1] / 2]])
        step = float(steps.mean())
    else:
        weights, step = np.ones(1), math.nan
    return XiGrid(nodes, weights, step, False)


def to_quasiposition(grid, psi_p, xi_nodes, ml, normalized=True):
    """psi(xi_i) = sum_j w_j <xi_i|p_j> psi(p_j).

    The convention tag of the input is kept, so a primed momentum state maps
    to psi'(xi) = <xi|A|psi>.  With ``normalized=False`` the kernel is the
    bare A exp(i xi rho).
    """
    require_same(psi_p, representation=("momentum", "rho"))
    if psi_p.grid.size != grid.size:
        raise ConventionError("wave function is not sampled on this grid")
    xg = _as_xi_grid(xi_nodes)
    n = kernel_normalization(grid, ml) if normalized else 1.0
    coeff = grid.weights * _eps_factor(grid) * n * _amplitude_on(grid, ml) * psi_p.values
    values = fourier_sum(grid.rho, coeff, xg.nodes, sign=1.0)
    return WaveFunction(values, xg, "quasiposition", psi_p.convention)


def to_momentum(psi_xi, grid, ml, normalized=True):
    """psi(p_k) = (1/2pi) sum_i W_i <xi_i|p_k>^{-1} psi(xi_i).

    Warns when the xi grid is not a full alias period and the samples have
    not decayed at its ends, and when A falls below 1e-12 on the grid (the
    inverse kernel is clipped there).
    """
    if psi_xi.representation != "quasiposition":
        raise ConventionError(f"expected quasiposition samples, got {psi_xi.representation}")
    xg = psi_xi.grid
    vals = psi_xi.values
    if not xg.full_period and vals.size > 2:
        peak = float(np.max(np.abs(vals)))
        edge = max(abs(vals[0]), abs(vals[-1]))
        if peak > 0 and edge > EDGE_THRESHOLD * peak:
            warnings.warn(f"xi window too small: edge value {edge / peak:.2e} of the peak",
                          TruncationWarning, stacklevel=2)
    amp = _amplitude_on(grid, ml)
    if np.any(amp < A_FLOOR):
        warnings.warn("amplitude below 1e-12 on the grid; inverse kernel clipped",
                      TruncationWarning, stacklevel=2)
        amp = np.maximum(amp, A_FLOOR)
    n = kernel_normalization(grid, ml) if normalized else 1.0
    raw = fourier_sum(xg.nodes, xg.weights * vals, grid.rho, sign=-1.0)
    values = raw * _eps_factor(grid) / (2 * math.pi * n * amp)
    return WaveFunction(values, grid, "momentum", psi_xi.convention)


def prime_map(psi, ml, direction="to_primed"):
    """Multiply by A(p) (``to_primed``) or by 1/A(p) (``to_unprimed``)."""
    if psi.representation not in ("momentum", "rho"):
        raise ConventionError("the priming map acts multiplicatively in momentum space")
    grid = psi.grid
    amp = _amplitude_on(grid, ml)
    if direction == "to_primed":
        require_same(psi, convention="unprimed")
        return psi.replace(psi.values * amp, convention="primed")
    if direction == "to_unprimed":
        require_same(psi, convention="primed")
        small = amp < A_FLOOR
        if np.any(small & (psi.values != 0)):
            warnings.warn("1/A clipped where A < 1e-12; the state is unsupported there",
                          TruncationWarning, stacklevel=2)
        return psi.replace(psi.values / np.maximum(amp, A_FLOOR), convention="unprimed")
    raise ValueError(f"unknown direction {direction!r}")


def quasi_inner_product(grid, xi_nodes, phi, psi, ml):
    """<phi|psi> via (1/2pi) int dxi <phi|A^{-2}|xi><xi|psi> with normalized kernels."""
    require_same(phi, psi, representation=("momentum", "rho"), convention="unprimed")
    amp = _amplitude_on(grid, ml)
    weighted = phi.replace(phi.values / amp ** 2)
    a = to_quasiposition(grid, weighted, xi_nodes, ml)
    b = to_quasiposition(grid, psi, xi_nodes, ml)
    n = kernel_normalization(grid, ml)
    xg = a.grid
    return complex(np.sum(xg.weights * np.conj(a.values) * b.values) / (2 * math.pi * n * n))


def transform_matrix(grid, xi_nodes, ml, normalized=True):
    """Dense M x n matrix of :func:`to_quasiposition`."""
    xg = _as_xi_grid(xi_nodes)
    n = kernel_normalization(grid, ml) if normalized else 1.0
    col = grid.weights * _eps_factor(grid) * n * _amplitude_on(grid, ml)
    return np.exp(1j * np.outer(xg.nodes, grid.rho)) * col[None, :]


def inverse_transform_matrix(grid, xi_nodes, ml, normalized=True):
    """Dense n x M matrix of :func:`to_momentum`."""
    xg = _as_xi_grid(xi_nodes)
    n = kernel_normalization(grid, ml) if normalized else 1.0
    row = _eps_factor(grid) / (2 * math.pi * n * np.maximum(_amplitude_on(grid, ml), A_FLOOR))
    return row[:, None] * np.exp(-1j * np.outer(grid.rho, xg.nodes)) * xg.weights[None, :]
