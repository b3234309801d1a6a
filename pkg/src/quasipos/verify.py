"""Invariant suites run by ``quasipos verify``."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import overlap, quasiop, solver
from .errors import NoMinimumError
from .mlstate import MLParams, ml_wavefunction, solve_ml_params, verify_ml_conditions
from .model import identity, kinematic_scales, p_array, rho_array
from .quadrature import build_grid
from .transform import prime_map
from .wavefunction import random_smooth_state

TOLERANCES = {
    "kinematics": 1e-8,
    "ml_conditions": 1e-6,
    "commutator": 1e-6,
    "eigen_relation": 1e-6,
    "expectation_measure": 1e-8,
    "overlaps": 1e-10,
    "identity_resolution": 1e-7,
    "solver_similarity": 1e-7,
    "ordinary_limit": 1e-8,
}
INFINITE_CUTOFF = 12.0


@dataclass
class SuiteResult:
    name: str
    passed: bool
    tolerance: float
    details: dict = field(default_factory=dict)
    skipped: bool = False

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "skipped": self.skipped,
                "tolerance": self.tolerance, "details": self.details}


def _grid(model, n):
    if kinematic_scales(model).finite:
        return build_grid(model, n)
    return build_grid(model, n, cutoff=INFINITE_CUTOFF)


def _ml(model):
    try:
        return solve_ml_params(model)
    except NoMinimumError:
        return None


def suite_kinematics(model, n, rng):
    tol = TOLERANCES["kinematics"]
    auto = kinematic_scales(model)
    numeric = kinematic_scales(model, method="numeric")
    details = {"rho_max": auto.rho_max, "rho_max_numeric": numeric.rho_max,
               "delta_x_min": auto.delta_x_min}
    ok = (math.isinf(auto.rho_max) and math.isinf(numeric.rho_max)) or \
        abs(auto.rho_max - numeric.rho_max) <= tol * auto.rho_max
    lim = auto.rho_hi if auto.finite else 50.0
    rho = rng.uniform(-0.9, 0.9, 16) * lim
    back = rho_array(model, p_array(model, rho))
    err = float(np.max(np.abs(back - rho)))
    details["rho_round_trip"] = err
    return SuiteResult("kinematics", bool(ok and err <= tol * max(1.0, lim)), tol, details)


def suite_ml_conditions(model, n, rng):
    tol = TOLERANCES["ml_conditions"]
    ml = _ml(model)
    if ml is None:
        return SuiteResult("ml_conditions", True, tol, {"reason": "no finite rho_max"}, True)
    grid = build_grid(model, n)
    scales = kinematic_scales(model)
    results = []
    for xi in rng.uniform(-5, 5, 5) * scales.delta_x_min:
        rep = verify_ml_conditions(ml_wavefunction(model, ml.with_xi(xi), grid), grid, tol)
        results.append(rep.to_dict())
    return SuiteResult("ml_conditions", all(r["passed"] for r in results), tol,
                       {"params": ml.to_dict(), "reports": results})


def _params(model):
    return _ml(model) or MLParams.ordinary()


def suite_commutator(model, n, rng):
    tol = TOLERANCES["commutator"]
    grid, ml = _grid(model, n), _params(model)
    res = [quasiop.commutator_residual(grid, ml, random_smooth_state(grid, rng))
           for _ in range(3)]
    return SuiteResult("commutator", max(res) <= tol, tol, {"residuals": res})


def suite_eigen_relation(model, n, rng):
    tol = TOLERANCES["eigen_relation"]
    ml = _ml(model)
    if ml is None:
        return SuiteResult("eigen_relation", True, tol, {"reason": "no finite rho_max"}, True)
    grid = build_grid(model, n)
    worst_eig = worst_var = worst_prod = 0.0
    for xi in rng.uniform(-3, 3, 3):
        st = ml_wavefunction(model, ml.with_xi(xi), grid).samples
        resid = quasiop.apply_xi(grid, ml, st) - xi * st
        worst_eig = max(worst_eig, math.sqrt(quasiop.norm_squared(grid, resid)))
        xi_psi = quasiop.apply_xi(grid, ml, st)
        var = (quasiop.norm_squared(grid, xi_psi)
               - quasiop.norm_squared(grid, quasiop.apply_x(grid, st))
               + ml.mean_f ** 2 / (4 * ml.delta_p ** 2))
        worst_var = max(worst_var, abs(var))
        rep = quasiop.uncertainty_report(grid, ml, st)
        worst_prod = max(worst_prod, rep.xi_p_product)
    ok = max(worst_eig, worst_var, worst_prod) <= tol
    return SuiteResult("eigen_relation", ok, tol, {"eigen_residual": worst_eig,
                                                   "variance_identity": worst_var,
                                                   "xi_p_product": worst_prod})


def suite_expectation_measure(model, n, rng):
    tol = TOLERANCES["expectation_measure"]
    grid, ml = _grid(model, max(n, 1024)), _params(model)
    worst = 0.0
    for _ in range(5):
        psi, phi = random_smooth_state(grid, rng), random_smooth_state(grid, rng)
        lhs = quasiop.expectation(grid, psi, quasiop.apply_x(grid, phi))
        rhs = quasiop.expectation_corrected(grid, ml, prime_map(psi, ml), "xi", prime_map(phi, ml))
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-300))
    return SuiteResult("expectation_measure", worst <= tol, tol, {"max_relative_error": worst})


def suite_overlaps(model, n, rng):
    tol = TOLERANCES["overlaps"]
    scales = kinematic_scales(model)
    if not scales.finite:
        return SuiteResult("overlaps", True, tol, {"reason": "no finite rho_max"}, True)
    dx = scales.delta_x_min
    samples = rng.uniform(-10, 10, 20) * dx
    err = max(abs(overlap.position_overlap(model, d) - overlap.band_limited_overlap(model, d))
              for d in samples)
    zeros = max(abs(overlap.position_overlap(model, 2 * k * dx)) for k in (1, 2, 3))
    return SuiteResult("overlaps", bool(err <= tol and zeros <= tol), tol,
                       {"closed_vs_quadrature": float(err), "zeros": float(zeros)})


def suite_identity_resolution(model, n, rng):
    tol = TOLERANCES["identity_resolution"]
    grid, ml = _grid(model, min(n, 256)), _params(model)
    rep = overlap.identity_resolution_check(model, ml, grid, random_smooth_state(grid, rng))
    ok = rep.relative_l2_error <= tol and rep.kernel_error <= 1e-6
    return SuiteResult("identity_resolution", ok, tol, rep.to_dict())


def suite_solver_similarity(model, n, rng):
    tol = TOLERANCES["solver_similarity"]
    spec = solver.HamiltonianSpec(model, solver.Potential.harmonic(1.0), basis_size=min(n, 256))
    rep = solver.compare_prescriptions(spec, 4)
    return SuiteResult("solver_similarity", rep.similarity_max_relative <= tol, tol,
                       {"similarity_max_relative": rep.similarity_max_relative,
                        "naive_max_abs": rep.naive_max_abs})


def suite_ordinary_limit(model, n, rng):
    tol = TOLERANCES["ordinary_limit"]
    spec = solver.HamiltonianSpec(identity(), solver.Potential.harmonic(1.0), basis_size=128)
    ho = solver.solve_spectrum(spec, 5).eigenvalues
    well = solver.solve_spectrum(solver.HamiltonianSpec(identity(), solver.Potential.well(math.pi),
                                                        mass=0.5), 5).eigenvalues
    e_ho = float(np.max(np.abs(ho - (np.arange(5) + 0.5))))
    e_well = float(np.max(np.abs(well - np.arange(1, 6) ** 2)))
    return SuiteResult("ordinary_limit", max(e_ho, e_well) <= tol, tol,
                       {"harmonic": e_ho, "well": e_well})


SUITES = [suite_kinematics, suite_ml_conditions, suite_commutator, suite_eigen_relation,
          suite_expectation_measure, suite_overlaps, suite_identity_resolution,
          suite_solver_similarity, suite_ordinary_limit]


def run_verification(model, n=512, seed=0):
    """Run every suite; returns a list of :class:`SuiteResult`."""
    rng = np.random.default_rng(seed)
    return [suite(model, n, rng) for suite in SUITES]
