"""Acceptance criteria 1-9.

Each test records one ``PASS``/``FAIL`` line (printed in the terminal
summary by conftest, or directly when run as a script) and then asserts.
Criteria that cannot be met are left failing; see the notes in the
README.
"""

import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from quasipos import overlap as ov
from quasipos import quasiop as qo
from quasipos import solver as sv
from quasipos.mlstate import MLParams, ml_wavefunction, solve_ml_params, verify_ml_conditions
from quasipos.model import identity, kinematic_scales, kmm
from quasipos.quadrature import build_grid, norm
from quasipos.transform import prime_map, to_momentum, to_quasiposition, xi_grid
from quasipos.wavefunction import WaveFunction, random_smooth_state

RESULTS = []
SEED = 12345


def record(number, passed, summary):
    line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {summary}"
    RESULTS.append(line)
    print(line)
    return passed


def criterion_1():
    worst = 0.0
    for beta in (0.25, 1.0, 4.0):
        sc = kinematic_scales(kmm(beta), method="numeric")
        oracle = math.pi / (2 * math.atan(math.inf) / math.sqrt(beta))
        assert oracle == pytest.approx(math.sqrt(beta))
        worst = max(worst, abs(sc.delta_x_min - oracle) / oracle)
    return record(1, worst < 1e-8, f"max relative dx_min error {worst:.2e} (tol 1e-8)")


def _kmm_grid_search(beta):
    # amplitude cos(u)^a in u = sqrt(beta) rho; scan a
    def dx2(a):
        num = integrate.quad(lambda u: (a * math.cos(u) ** (a - 1) * math.sin(u)) ** 2,
                             -math.pi / 2, math.pi / 2, epsabs=1e-14, limit=200)[0]
        den = integrate.quad(lambda u: math.cos(u) ** (2 * a), -math.pi / 2, math.pi / 2,
                             epsabs=1e-14, limit=200)[0]
        return beta * num / den

    def dp2(a):
        num = integrate.quad(lambda u: math.tan(u) ** 2 * math.cos(u) ** (2 * a),
                             -math.pi / 2, math.pi / 2, epsabs=1e-14, limit=200)[0]
        den = integrate.quad(lambda u: math.cos(u) ** (2 * a), -math.pi / 2, math.pi / 2,
                             epsabs=1e-14, limit=200)[0]
        return num / den / beta

    grid = np.linspace(0.6, 1.4, 1001)
    a = grid[int(np.argmin([dx2(v) for v in grid]))]
    # <f> = 1 + beta dp^2 for a centred state
    return math.sqrt(dp2(a)), 1 + beta * dp2(a), math.sqrt(dx2(a))


def criterion_2():
    rng = np.random.default_rng(SEED)
    worst_par = worst_oracle = 0.0
    failures = 0
    for beta in (0.25, 1.0, 4.0):
        m = kmm(beta)
        ml = solve_ml_params(m)
        worst_par = max(worst_par, abs(ml.delta_p - beta ** -0.5), abs(ml.mean_f - 2.0),
                        abs(ml.mean_p))
        dp, mf, dx = _kmm_grid_search(beta)
        # the oracle's a-grid spacing is 1e-3; dx is stationary there, dp is not
        worst_oracle = max(worst_oracle, abs(dx - ml.achieved_delta_x) / dx)
        assert abs(dp - ml.delta_p) < 2e-3 * dp and abs(mf - ml.mean_f) < 4e-3
        g = build_grid(m, 1024)
        for xi in rng.uniform(-10, 10, 20) * math.sqrt(beta):
            rep = verify_ml_conditions(ml_wavefunction(m, ml.with_xi(xi), g), g, 1e-6)
            failures += not rep.passed
    ok = worst_par < 1e-6 and worst_oracle < 1e-6 and failures == 0
    return record(2, ok, f"param error {worst_par:.2e}, grid-search dx error {worst_oracle:.2e}, "
                         f"{failures}/60 ML-condition failures (tol 1e-6)")


def criterion_3():
    m = kmm(1.0)
    ml = solve_ml_params(m)
    rng = np.random.default_rng(SEED)
    g = build_grid(m, 1024)
    worst = max(qo.commutator_residual(g, ml, random_smooth_state(g, rng)) for _ in range(10))
    res = []
    for n in (64, 128, 256):
        gn = build_grid(m, n)
        res.append(qo.commutator_residual(gn, ml, random_smooth_state(
            gn, np.random.default_rng(SEED))))
    rates = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    ok = worst < 1e-6 and bool(np.all(rates >= 8.0))
    return record(3, ok, f"residual {worst:.2e} at n=1024 (tol 1e-6), doubling orders "
                         f"{', '.join(f'{r:.1f}' for r in rates)} (need >= 8)")


def criterion_4():
    rng = np.random.default_rng(SEED)
    eig = var = prod = 0.0
    for beta in (0.25, 1.0, 4.0):
        m = kmm(beta)
        ml = solve_ml_params(m)
        g = build_grid(m, 1024)
        for xi0 in rng.uniform(-5, 5, 5):
            st = ml_wavefunction(m, ml.with_xi(xi0), g).samples
            xi_psi = qo.apply_xi(g, ml, st)
            eig = max(eig, math.sqrt(qo.norm_squared(g, xi_psi - xi0 * st)))
            x_sq = qo.norm_squared(g, qo.apply_x(g, st))
            var = max(var, abs(qo.norm_squared(g, xi_psi) - x_sq
                               + ml.mean_f ** 2 / (4 * ml.delta_p ** 2)))
            prod = max(prod, qo.uncertainty_report(g, ml, st).xi_p_product)
    ok = max(eig, var, prod) < 1e-6
    return record(4, ok, f"eigen residual {eig:.2e}, variance identity {var:.2e}, "
                         f"dxi*dp {prod:.2e} (tol 1e-6)")


def criterion_5():
    m = kmm(1.0)
    ml = solve_ml_params(m)
    g = build_grid(m, 1024)
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(50):
        psi, phi = random_smooth_state(g, rng), random_smooth_state(g, rng)
        # unprimed x on phi versus A^-2 xi on the primed pair
        lhs = qo.expectation(g, psi, qo.apply_x(g, phi))
        rhs = qo.expectation_corrected(g, ml, prime_map(psi, ml), "xi", prime_map(phi, ml))
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return record(5, worst < 1e-8, f"max relative error {worst:.2e} over 50 pairs (tol 1e-8)")


def criterion_6():
    m = kmm(1.0)
    dx = kinematic_scales(m).delta_x_min
    rng = np.random.default_rng(SEED)
    seps = rng.uniform(-20, 20, 100) * dx
    closed = max(abs(ov.position_overlap(m, d) - ov.band_limited_overlap(m, d)) for d in seps)
    zeros = max(abs(ov.position_overlap(m, 2 * k * dx)) for k in range(1, 11))
    d = np.linspace(0.05, 8, 60) * dx
    ladder = []
    for dp in (2.0, 4.0, 8.0, 16.0):
        ml = MLParams(0.0, 0.0, dp, 2.0)
        ladder.append(max(abs(ov.ml_overlap(m, ml, x, 0.0) - ov.position_overlap(m, x))
                          for x in d))
    mono = all(a > b for a, b in zip(ladder, ladder[1:]))
    ok = closed < 1e-10 and zeros < 1e-10 and mono
    return record(6, ok, f"closed vs quadrature {closed:.2e}, zeros {zeros:.2e} (tol 1e-10), "
                         f"dp ladder sup errors {', '.join(f'{e:.3g}' for e in ladder)}")


def criterion_7():
    rng = np.random.default_rng(SEED)
    l2 = kern = 0.0
    for beta in (0.25, 1.0):
        m = kmm(beta)
        ml = solve_ml_params(m)
        g = build_grid(m, 256)
        for _ in range(3):
            rep = ov.identity_resolution_check(m, ml, g, random_smooth_state(g, rng))
            l2, kern = max(l2, rep.relative_l2_error), max(kern, rep.kernel_error)
    ok = l2 < 1e-7 and kern < 1e-6
    return record(7, ok, f"round-trip L2 {l2:.2e} (tol 1e-7), kernel {kern:.2e} (tol 1e-6)")


def criterion_8():
    betas = (1e-4, 3e-4, 1e-3)
    k = 4
    spec = sv.HamiltonianSpec(kmm(betas[0]), sv.Potential.harmonic())
    rep = sv.compare_prescriptions(spec, k, betas=betas)
    sim = 0.0
    gaps, pert, exact_vs_pert = [], [], 0.0
    e0 = sv.solve_spectrum(sv.HamiltonianSpec(identity(), sv.Potential.harmonic()), k).eigenvalues
    for b in betas:
        s = sv.HamiltonianSpec(kmm(b), sv.Potential.harmonic())
        r = sv.compare_prescriptions(s, k)
        sim = max(sim, r.similarity_max_relative)
        gap = np.abs(r.spectra["naive_literature"] - r.spectra["derivative_corrected"])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            shift = np.abs(sv.perturbation_first_order(s, k))
        gaps.append(gap)
        pert.append(shift)
        shift_exact = np.abs(r.spectra["derivative_corrected"] - e0)
        exact_vs_pert = max(exact_vs_pert, float(np.max(np.abs(shift_exact / shift - 1))))
    slope = rep.sweep["naive_gap_slope"]
    agreement = max(float(np.max(np.abs(g / p - 1))) for g, p in zip(gaps, pert))
    ok = sim < 1e-7 and abs(slope - 1.0) <= 0.1 and agreement <= 0.01
    return record(8, ok, f"similarity {sim:.2e} (tol 1e-7); naive gap "
                         f"{max(float(g.max()) for g in gaps):.2e}, slope {slope:.2f} "
                         f"(need 1.0 +- 0.1); gap vs first-order oracle {agreement:.2e} "
                         f"(tol 1e-2); [supplementary: E_correct - E_0 vs oracle "
                         f"{exact_vs_pert:.2e}, <x^2> discrepancy slope "
                         f"{rep.sweep['x2_gap_slope']:.3f}]")


def criterion_9():
    m = identity()
    ml = MLParams.ordinary()
    g = build_grid(m, 512, cutoff=16.0)
    psi = WaveFunction(math.pi ** -0.25 * np.exp(-g.nodes ** 2 / 2) + 0j, g)
    x = np.linspace(-6, 6, 49)
    ft = to_quasiposition(g, psi, x, ml)
    ref = math.sqrt(2 * math.pi) * math.pi ** -0.25 * np.exp(-x ** 2 / 2)
    fourier = float(np.max(np.abs(ft.values - ref)))
    back = to_momentum(to_quasiposition(g, psi, xi_grid(g), ml), g, ml)
    trip = norm(g, back - psi)
    comm = qo.commutator_residual(g, ml, psi)
    ho = sv.solve_spectrum(sv.HamiltonianSpec(m, sv.Potential.harmonic()), 8).eigenvalues
    e_ho = float(np.max(np.abs(ho - (np.arange(8) + 0.5))))
    well = sv.solve_spectrum(sv.HamiltonianSpec(m, sv.Potential.well(math.pi), mass=0.5),
                             8).eigenvalues
    e_well = float(np.max(np.abs(well - np.arange(1, 9) ** 2)))
    worst = max(fourier, trip, comm, e_ho, e_well)
    return record(9, worst < 1e-8, f"Gaussian pair {fourier:.2e}, round trip {trip:.2e}, "
                                   f"[x,p] {comm:.2e}, oscillator {e_ho:.2e}, "
                                   f"well {e_well:.2e} (tol 1e-8)")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    for c in CRITERIA:
        c()
