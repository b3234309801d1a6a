"""Momentum grids realizing the measure dp / f(p)^(1 - epsilon).

The default layout is uniform in rho: with dp/f = drho the epsilon = 0
measure becomes flat and the weights are the constant spacing.  Other
members of the epsilon family get weights ``h * f(p)^epsilon``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ConventionError, DomainError
from .model import kinematic_scales, p_array, rho_array, rho_of_p
from .wavefunction import require_same

TAIL_FRACTION = 1e-12


@dataclass(frozen=True, eq=False)
class MomentumGrid:
    model: object
    nodes: np.ndarray
    weights: np.ndarray
    epsilon: float
    cutoff: float
    layout: str
    rho: np.ndarray
    spacing: float
    rho_range: tuple
    f_values: np.ndarray
    deriv_order: int = 8
    warnings: tuple = ()

    @property
    def size(self):
        return self.nodes.size

    @property
    def base_weights(self):
        """Weights of the epsilon = 0 measure dp/f on the same nodes."""
        if self.epsilon == 0:
            return self.weights
        return self.weights / self.f_values ** self.epsilon

    def with_epsilon(self, epsilon):
        return MomentumGrid(self.model, self.nodes, self.base_weights * self.f_values ** epsilon,
                            float(epsilon), self.cutoff, self.layout, self.rho, self.spacing,
                            self.rho_range, self.f_values, self.deriv_order, self.warnings)


def default_cutoff(model, tail=TAIL_FRACTION):
    """|p| beyond which the tail of int dp/f is below ``tail`` of the total."""
    scales = kinematic_scales(model)
    if not scales.finite:
        raise ConfigurationError(
            f"model {model.name!r} has infinite rho_max; an explicit cutoff is required")
    total = scales.rho_hi - scales.rho_lo
    hi = model.p_domain[1]
    if math.isfinite(hi):
        return hi
    cut = 1.0
    while scales.rho_hi - rho_array(model, cut) > tail * total:
        cut *= 2.0
    return cut


def build_grid(model, n, epsilon=0.0, cutoff=None, layout="rho", rho_range=None,
               deriv_order=8):
    """Quadrature grid for ``int dp / f(p)^(1-epsilon)``.

    Parameters
    ----------
    model : GupModel
    n : int
        Number of nodes (at least 16).
    epsilon : float
        Measure exponent; 0 gives the plain dp/f measure.
    cutoff : float, optional
        Momentum truncation |p| <= cutoff.  Required for models with
        infinite rho_max unless ``rho_range`` is given.
    layout : {"rho", "gauss"}
        ``"rho"``: midpoint nodes uniform in rho (the default; operators
        use finite-difference stencils).  ``"gauss"``: Gauss-Legendre nodes
        in rho on the same window (operators use a spectral derivative).
    rho_range : tuple, optional
        Explicit rho window.
    deriv_order : int
        Accuracy order of the derivative stencils used by operators.
    """
    n = int(n)
    if n < 16:
        raise ConfigurationError("grids need at least 16 nodes")
    scales = kinematic_scales(model)
    notes = []
    if cutoff is not None:
        cutoff = float(cutoff)
        lo_p, hi_p = model.p_domain
        if not (cutoff > 0 and -cutoff >= lo_p and cutoff <= hi_p):
            raise DomainError(f"cutoff {cutoff} is not inside the momentum domain")
        if scales.finite:
            tail = (scales.rho_hi - scales.rho_lo) - (rho_array(model, cutoff)
                                                     - rho_array(model, -cutoff))
            if tail > TAIL_FRACTION * (scales.rho_hi - scales.rho_lo):
                notes.append(f"cutoff {cutoff:g} leaves a fraction "
                             f"{tail / (scales.rho_hi - scales.rho_lo):.2e} of int dp/f outside")

    if layout not in ("rho", "gauss"):
        raise ConfigurationError(f"unknown grid layout {layout!r}")
    if rho_range is not None:
        lo, hi = (float(v) for v in rho_range)
        if not (scales.rho_lo <= lo < hi <= scales.rho_hi):
            raise DomainError(f"rho_range {rho_range} exceeds ({scales.rho_lo}, {scales.rho_hi})")
    elif cutoff is not None:
        lo, hi = float(rho_array(model, -cutoff)), float(rho_array(model, cutoff))
    elif scales.finite:
        lo, hi = scales.rho_lo, scales.rho_hi
    else:
        raise ConfigurationError(
            f"model {model.name!r} has infinite rho_max; pass cutoff or rho_range")
    if layout == "rho":
        h = (hi - lo) / n
        rho = lo + (np.arange(n) + 0.5) * h
        base = np.full(n, h)
    else:
        # Gauss-Legendre in rho: a rule in p cannot resolve the algebraic
        # tails of dp/f without astronomically large cutoffs.
        x, w = np.polynomial.legendre.leggauss(n)
        h = math.nan
        rho = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
        base = 0.5 * (hi - lo) * w
    nodes = p_array(model, rho)
    fv = np.asarray(model.f(nodes), dtype=float) * np.ones(n)
    weights = base * fv ** epsilon if epsilon else base
    full = (lo, hi) == (scales.rho_lo, scales.rho_hi)
    eff_cut = math.inf if full else float(np.abs(nodes).max())
    grid = MomentumGrid(model, nodes, weights, float(epsilon), eff_cut, layout, rho, h,
                        (lo, hi), fv, int(deriv_order), tuple(notes))
    for arr in (grid.nodes, grid.weights, grid.rho, grid.f_values):
        arr.setflags(write=False)
    return grid


def integrate_samples(grid, values):
    """Sum of ``weights * values``."""
    return np.sum(grid.weights * np.asarray(values))


def inner_product(grid, phi, psi):
    """<phi|psi> = sum_i w_i conj(phi_i) psi_i on the grid's measure."""
    require_same(phi, psi, representation=("momentum", "rho"))
    if phi.grid.size != grid.size:
        raise ConventionError("wave functions are not sampled on this grid")
    return complex(np.sum(grid.weights * np.conj(phi.values) * psi.values))


def norm(grid, psi):
    return math.sqrt(max(inner_product(grid, psi, psi).real, 0.0))


def reference_integral(model, func, epsilon=0.0):
    """Adaptive-quadrature reference for ``int func(p) dp / f^(1-eps)`` over the domain.

    Integrates in rho when rho_max is finite so unbounded momentum tails are
    mapped to a finite interval.  Independent of any grid; used as an oracle.
    """
    from scipy import integrate

    scales = kinematic_scales(model)

    def integrand_rho(r, part):
        p = float(p_array(model, r))
        val = func(p) * float(model.f(p)) ** epsilon
        return val.real if part == 0 else val.imag

    if scales.finite:
        lo, hi = scales.rho_lo, scales.rho_hi
        parts = [integrate.quad(integrand_rho, lo, hi, args=(k,), epsabs=1e-15, epsrel=1e-13,
                                limit=400)[0] for k in (0, 1)]
    else:
        def integrand_p(p, part):
            val = func(p) * float(model.f(p)) ** (epsilon - 1.0)
            return val.real if part == 0 else val.imag
        lo, hi = model.p_domain
        parts = [integrate.quad(integrand_p, lo, hi, args=(k,), epsabs=1e-15, epsrel=1e-13,
                                limit=400)[0] for k in (0, 1)]
    return complex(parts[0], parts[1])


def rho_span(model, a, b):
    """int_a^b dp/f by quadrature."""
    return rho_of_p(model, b) - rho_of_p(model, a)
