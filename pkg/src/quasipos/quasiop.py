"""Position, quasi-position and momentum operators on momentum grids.

With hbar = 1 the position operator is x = i f(p) d/dp = i d/drho.  On the
default rho-uniform grid it is applied with finite-difference stencils in
rho; Gauss layouts use a spectral (barycentric) derivative.  The
quasi-position operator is xi = A x A^{-1} = x + i c (p - <p>), with the
amplitude exponent c = <f>/(2 dp^2) of the maximal-localization family.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConventionError, ResolutionError
from .mlstate import amplitude
from .quadrature import inner_product
from .stencils import barycentric_derivative_matrix, derivative
from .wavefunction import WaveFunction, require_same

RESOLUTION_RTOL = 1e-3
DEFAULT_TOLERANCE = 1e-6


def _grid_derivative(grid, values, order=None):
    order = grid.deriv_order if order is None else order
    if grid.layout == "rho":
        return derivative(values, grid.spacing, order=order)
    mat = grid.__dict__.get("_dmat")
    if mat is None:
        mat = barycentric_derivative_matrix(grid.rho)
        object.__setattr__(grid, "_dmat", mat)
    return mat @ values


def _check_input(grid, psi):
    if not isinstance(psi, WaveFunction):
        raise ConventionError("operators act on WaveFunction objects")
    if psi.representation not in ("momentum", "rho"):
        raise ConventionError(f"operators act in momentum space, got {psi.representation}")
    if psi.grid.size != grid.size:
        raise ConventionError("wave function is not sampled on this grid")


def d_rho(grid, psi, check=False):
    """d psi / d rho on the grid; ``check`` compares with a lower order."""
    _check_input(grid, psi)
    out = _grid_derivative(grid, psi.values)
    if check and grid.layout == "rho" and grid.deriv_order > 2:
        coarse = _grid_derivative(grid, psi.values, grid.deriv_order - 2)
        scale = max(np.max(np.abs(out)), 1e-300)
        if np.max(np.abs(out - coarse)) > RESOLUTION_RTOL * scale:
            raise ResolutionError(
                f"derivative not converged on {grid.size} points (orders {grid.deriv_order} "
                f"and {grid.deriv_order - 2} differ by "
                f"{np.max(np.abs(out - coarse)) / scale:.2e} relative)")
    return out


def apply_x(grid, psi, check=False):
    """x psi = i f dpsi/dp.

    On grids with measure exponent epsilon the operator carries the extra
    term (i epsilon / 2) f'(p) that keeps it symmetric under dp/f^(1-eps).
    """
    values = 1j * d_rho(grid, psi, check=check)
    if grid.epsilon:
        values = values + 0.5j * grid.epsilon * grid.model.derivative(grid.nodes) * psi.values
    return psi.replace(values)


def _shift(grid, ml):
    return ml.c * (grid.nodes - ml.mean_p)


def apply_xi(grid, ml, psi, check=False):
    """xi psi = x psi + i c (p - <p>) psi."""
    xpsi = apply_x(grid, psi, check=check)
    return xpsi.replace(xpsi.values + 1j * _shift(grid, ml) * psi.values)


def apply_xi_dagger(grid, ml, psi, check=False):
    """xi^dagger psi = x psi - i c (p - <p>) psi."""
    xpsi = apply_x(grid, psi, check=check)
    return xpsi.replace(xpsi.values - 1j * _shift(grid, ml) * psi.values)


def apply_p(grid, psi):
    _check_input(grid, psi)
    return psi.replace(grid.nodes * psi.values)


def apply_f(grid, psi):
    _check_input(grid, psi)
    return psi.replace(grid.f_values * psi.values)


def expectation(grid, psi, op_psi):
    """<psi| O |psi> given O psi."""
    return inner_product(grid, psi, op_psi)


def norm_squared(grid, psi):
    return inner_product(grid, psi, psi).real


def delta_xi(grid, ml, psi):
    """|| (xi - <xi>) psi || for a normalized psi."""
    xi_psi = apply_xi(grid, ml, psi)
    mean = expectation(grid, psi, xi_psi)
    return math.sqrt(max(norm_squared(grid, xi_psi - mean * psi), 0.0))


def commutator_residual(grid, ml, psi):
    """max over x, xi, xi^dagger of ||([O, p] - i f) psi|| / ||psi||."""
    p_psi = apply_p(grid, psi)
    f_psi = apply_f(grid, psi)
    scale = math.sqrt(norm_squared(grid, psi))
    worst = 0.0
    for op in (lambda s: apply_x(grid, s), lambda s: apply_xi(grid, ml, s),
               lambda s: apply_xi_dagger(grid, ml, s)):
        comm = op(p_psi) - apply_p(grid, op(psi)) - 1j * f_psi
        worst = max(worst, math.sqrt(norm_squared(grid, comm)) / scale)
    return worst


_OPERATORS = {
    "identity": lambda grid, ml, s: s,
    "x": lambda grid, ml, s: apply_x(grid, s),
    "xi": lambda grid, ml, s: apply_xi(grid, ml, s),
    "xi_dagger": lambda grid, ml, s: apply_xi_dagger(grid, ml, s),
    "p": lambda grid, ml, s: apply_p(grid, s),
}


def expectation_corrected(grid, ml, psi_primed, op, phi_primed):
    """<psi'| A^{-2} O |phi'> under the grid measure.

    ``op`` is a name from ``identity, x, xi, xi_dagger, p`` or a callable
    ``op(grid, ml, wavefunction)``.  For ``op="xi"`` the result equals
    <psi|x|phi> on the unprimed states.
    """
    require_same(psi_primed, phi_primed, convention="primed")
    fn = _OPERATORS[op] if isinstance(op, str) else op
    out = fn(grid, ml, phi_primed)
    amp = amplitude(grid.model, ml, grid.nodes) * np.ones(grid.size)
    return complex(np.sum(grid.weights * np.conj(psi_primed.values) * out.values / amp ** 2))


@dataclass(frozen=True)
class OperatorReport:
    delta_x: float
    delta_p: float
    delta_xi: float
    mean_x: float
    mean_xi: complex
    mean_xi_dagger: complex
    mean_p: float
    mean_f: float
    gup_satisfied: bool
    xi_p_product: float
    xi_dagger_p_minus_p_xi: complex
    tolerance: float

    def to_dict(self):
        out = asdict(self)
        for key in ("mean_xi", "mean_xi_dagger", "xi_dagger_p_minus_p_xi"):
            val = complex(out[key])
            out[key] = {"re": val.real, "im": val.imag}
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def uncertainty_report(grid, ml, psi, tolerance=DEFAULT_TOLERANCE):
    """Spreads, means and the Robertson check for an unprimed normalized state."""
    require_same(psi, convention="unprimed")
    nrm = norm_squared(grid, psi)
    x_psi = apply_x(grid, psi)
    mean_x = expectation(grid, psi, x_psi).real / nrm
    delta_x = math.sqrt(max(norm_squared(grid, x_psi - mean_x * psi) / nrm, 0.0))
    p_psi = apply_p(grid, psi)
    mean_p = expectation(grid, psi, p_psi).real / nrm
    delta_p = math.sqrt(max(norm_squared(grid, p_psi - mean_p * psi) / nrm, 0.0))
    mean_f = expectation(grid, psi, apply_f(grid, psi)).real / nrm
    xi_psi = apply_xi(grid, ml, psi)
    mean_xi = expectation(grid, psi, xi_psi) / nrm
    mean_xi_dag = expectation(grid, psi, apply_xi_dagger(grid, ml, psi)) / nrm
    d_xi = math.sqrt(max(norm_squared(grid, xi_psi - mean_xi * psi) / nrm, 0.0))
    # <xi^dagger p - p xi> = <xi psi | p psi> - <p psi | xi psi>
    mixed = (inner_product(grid, xi_psi, p_psi) - inner_product(grid, p_psi, xi_psi)) / nrm
    bound = 0.5 * abs(mean_f)
    return OperatorReport(delta_x, delta_p, d_xi, mean_x, mean_xi, mean_xi_dag, mean_p, mean_f,
                          delta_x * delta_p >= bound * (1.0 - tolerance), d_xi * delta_p, mixed,
                          tolerance)
