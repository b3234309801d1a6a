"""Schroedinger eigenproblems in the rho representation.

States are sampled on a rho-uniform window.  The kinetic term is diagonal,
T = p(rho)^2 / 2m, and the position operator x = i d/drho is applied
spectrally: the eigenvectors of x on the window are exp(-i k rho) with k on
the discrete Fourier lattice, so V(x) = U diag(V(k)) U^dagger.  The three
potential prescriptions are

``derivative_corrected``   H = T + V(x) on unprimed states;
``primed_correct``         H' = T + A V(x) A^{-1} on primed states, an explicit
                           similarity transform of the first;
``naive_literature``       V multiplies the unprimed quasi-position samples:
                           psi -> psi(xi) -> V(xi) psi(xi) -> back, which is
                           H = T + A^{-1} V(x) A with the same Fourier lattice.

The infinite well is treated in quasi-position space with a sine basis.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg

from .errors import ConfigurationError, RegimeWarning
from .mlstate import MLParams, amplitude, solve_ml_params
from .model import kinematic_scales, p_array
from .quadrature import build_grid
from .stencils import derivative_matrix
from .wavefunction import WaveFunction

PRESCRIPTIONS = ("primed_correct", "derivative_corrected", "naive_literature")
TAIL_LOG = math.log(1e12)
CONVERGENCE_RTOL = 1e-4
FD_STEP = 1e-5


@dataclass(frozen=True)
class Potential:
    """``harmonic`` (1/2 m omega^2 x^2), ``polynomial`` (sum c_k x^k) or ``well``."""

    kind: str
    omega: float = 1.0
    coefficients: tuple = ()
    width: float = math.pi

    def __post_init__(self):
        if self.kind not in ("harmonic", "polynomial", "well"):
            raise ConfigurationError(f"unknown potential kind {self.kind!r}")
        if self.kind == "harmonic" and not self.omega > 0:
            raise ConfigurationError("omega must be positive")
        if self.kind == "well" and not self.width > 0:
            raise ConfigurationError("well width must be positive")
        if self.kind == "polynomial" and not self.coefficients:
            raise ConfigurationError("polynomial potential needs coefficients")

    @classmethod
    def harmonic(cls, omega=1.0):
        return cls("harmonic", omega=float(omega))

    @classmethod
    def polynomial(cls, coefficients):
        return cls("polynomial", coefficients=tuple(float(c) for c in coefficients))

    @classmethod
    def well(cls, width):
        return cls("well", width=float(width))

    def coefficients_for(self, mass):
        if self.kind == "harmonic":
            return (0.0, 0.0, 0.5 * mass * self.omega ** 2)
        return self.coefficients

    def value(self, x, mass):
        x = np.asarray(x, dtype=float)
        return np.polynomial.polynomial.polyval(x, self.coefficients_for(mass))

    def to_dict(self):
        if self.kind == "harmonic":
            return {"kind": "harmonic", "omega": self.omega}
        if self.kind == "well":
            return {"kind": "well", "width": self.width}
        return {"kind": "polynomial", "coefficients": list(self.coefficients)}


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    model: object
    potential: Potential
    mass: float = 1.0
    prescription: str = "derivative_corrected"
    domain: str = "full_line"
    basis_size: int = 256
    derivative: str = "spectral"
    rho_window: float = None
    ml: MLParams = None

    def __post_init__(self):
        if self.prescription not in PRESCRIPTIONS:
            raise ConfigurationError(f"unknown prescription {self.prescription!r}")
        if not self.mass > 0:
            raise ConfigurationError("mass must be positive")
        if self.basis_size < 32:
            raise ConfigurationError("basis_size must be at least 32")
        if self.derivative not in ("spectral", "stencil"):
            raise ConfigurationError(f"unknown derivative scheme {self.derivative!r}")
        domain = "box" if self.potential.kind == "well" else self.domain
        if domain != self.domain and self.domain != "full_line":
            raise ConfigurationError("domain does not match the potential")
        if self.domain == "box" and self.potential.kind != "well":
            raise ConfigurationError(
                "box domains support only the infinite well (no interior polynomial potential)")
        object.__setattr__(self, "domain", domain)

    def with_model(self, model):
        return replace(self, model=model, ml=None)

    @property
    def ml_params(self):
        """ML parameters entering A: solved for the model, or A = 1 without a minimum."""
        if self.ml is not None:
            return self.ml
        if kinematic_scales(self.model).finite:
            return solve_ml_params(self.model)
        return MLParams.ordinary()


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: list
    convergence: np.ndarray
    converged: np.ndarray
    prescription: str
    max_imaginary: float = 0.0
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {"prescription": self.prescription,
                "eigenvalues": [float(v) for v in self.eigenvalues],
                "convergence": [float(v) for v in self.convergence],
                "converged": [bool(v) for v in self.converged],
                "max_imaginary": float(self.max_imaginary), "metadata": self.metadata}


def _window(spec, n_levels):
    scales = kinematic_scales(spec.model)
    if spec.rho_window is not None:
        half = float(spec.rho_window)
    else:
        coeffs = spec.potential.coefficients_for(spec.mass)
        if len(coeffs) > 2 and coeffs[2] > 0:
            # harmonic extent of the level-k state plus a Gaussian tail
            # whose density falls below 1e-12
            mw = math.sqrt(2.0 * coeffs[2] * spec.mass)
            half = math.sqrt(mw) * (math.sqrt(2 * n_levels + 1) + math.sqrt(2 * TAIL_LOG))
        elif scales.finite:
            half = math.inf
        else:
            raise ConfigurationError("set rho_window: the potential gives no confining scale")
    if half >= scales.rho_max:
        if not scales.finite:
            raise ConfigurationError("rho window must be finite")
        return scales.rho_lo, scales.rho_hi
    return -half, half


def solver_grid(spec, n_levels=8, basis_size=None, model=None):
    """rho-uniform grid of the spec (optionally for another model on the same window)."""
    n = spec.basis_size if basis_size is None else basis_size
    lo, hi = _window(spec, n_levels)
    if model is not None:
        return build_grid(model, n, rho_range=(lo, hi))
    return build_grid(spec.model, n, rho_range=(lo, hi))


def _fourier_lattice(grid):
    n = grid.size
    return 2 * math.pi * np.fft.fftfreq(n, d=grid.spacing)


def _potential_matrix(spec, grid):
    coeffs = spec.potential.coefficients_for(spec.mass)
    n = grid.size
    if spec.derivative == "stencil":
        x = 1j * derivative_matrix(n, grid.spacing, order=grid.deriv_order)
        out = np.zeros((n, n), dtype=complex)
        power = np.eye(n, dtype=complex)
        for c in coeffs:
            if c:
                out += c * power
            power = power @ x
        return out
    k = _fourier_lattice(grid)
    even = np.polynomial.polynomial.polyval(np.abs(k), [c if i % 2 == 0 else 0.0
                                                        for i, c in enumerate(coeffs)])
    odd = np.polynomial.polynomial.polyval(k, [c if i % 2 else 0.0 for i, c in enumerate(coeffs)])
    if n % 2 == 0:
        odd[n // 2] = 0.0  # the Nyquist mode has no sign
    # x exp(-i k rho) = k exp(-i k rho); the matrix depends on (j - l) mod n
    vk = even + odd
    column = np.fft.fft(vk) / n
    return linalg.circulant(column)


def _amplitude_diag(spec, grid):
    ml = spec.ml_params
    return np.asarray(amplitude(grid.model, ml, grid.nodes), dtype=float) * np.ones(grid.size)


def assemble_hamiltonian(spec, grid=None):
    """Dense Hamiltonian matrix of ``spec`` on ``grid`` (rho representation)."""
    if spec.domain == "box":
        raise ConfigurationError("the infinite well is diagonal in its sine basis; "
                                 "use solve_spectrum")
    if grid is None:
        grid = solver_grid(spec)
    kinetic = np.diag(grid.nodes ** 2 / (2.0 * spec.mass)).astype(complex)
    v = _potential_matrix(spec, grid)
    if spec.prescription == "derivative_corrected":
        return kinetic + v
    amp = _amplitude_diag(spec, grid)
    if spec.prescription == "primed_correct":
        return kinetic + (amp[:, None] * v) / amp[None, :]
    # naive: transform A psi to the Fourier lattice, multiply by V, return and divide by A
    return kinetic + (v * amp[None, :]) / amp[:, None]


def _box_levels(spec, k):
    model, L = spec.model, spec.potential.width
    scales = kinematic_scales(model)
    q = np.arange(1, k + 1) * math.pi / L
    if scales.finite and q[-1] >= scales.rho_max:
        raise ConfigurationError(
            f"only {int(scales.rho_max * L / math.pi)} well levels exist below rho_max")
    return p_array(model, q) ** 2 / (2.0 * spec.mass)


def _box_spectrum(spec, k):
    energies = _box_levels(spec, k)
    L = spec.potential.width
    xs = np.linspace(-L / 2, L / 2, spec.basis_size)
    from .transform import XiGrid

    xg = XiGrid(xs, np.full(xs.size, xs[1] - xs[0]), xs[1] - xs[0], False)
    convention = "primed" if spec.prescription == "primed_correct" else "unprimed"
    vecs = [WaveFunction(math.sqrt(2 / L) * np.sin(j * math.pi * (xs + L / 2) / L), xg,
                         "quasiposition", convention) for j in range(1, k + 1)]
    # sine modes diagonalize every even function of p(rho), A(p) included,
    # so Dirichlet conditions on psi and on psi' select the same levels
    return Spectrum(energies, vecs, np.zeros(k), np.ones(k, dtype=bool), spec.prescription,
                    0.0, {"domain": "box", "boundary_condition": convention,
                          "basis": "sine"})


def _diagonalize(spec, grid, k):
    h = assemble_hamiltonian(spec, grid)
    if spec.prescription == "derivative_corrected":
        vals, vecs = linalg.eigh(h)
        imag = 0.0
    else:
        vals, vecs = linalg.eig(h)
        order = np.argsort(vals.real)
        vals, vecs = vals[order], vecs[:, order]
        imag = float(np.max(np.abs(vals[:k].imag)))
        vals = vals.real
    return vals[:k], vecs[:, :k], imag


def solve_spectrum(spec, k=5):
    """Lowest ``k`` levels with convergence estimates from a half-size basis."""
    if spec.domain == "box":
        return _box_spectrum(spec, k)
    if k > spec.basis_size // 4:
        raise ConfigurationError("k must not exceed basis_size / 4")
    grid = solver_grid(spec, n_levels=k)
    vals, vecs, imag = _diagonalize(spec, grid, k)
    coarse_grid = solver_grid(spec, n_levels=k, basis_size=spec.basis_size // 2)
    coarse, _, _ = _diagonalize(spec, coarse_grid, k)
    drift = np.abs(vals - coarse)
    converged = drift <= CONVERGENCE_RTOL * np.maximum(np.abs(vals), 1e-300)
    convention = "primed" if spec.prescription == "primed_correct" else "unprimed"
    wfs = []
    for j in range(k):
        v = vecs[:, j]
        v = v / math.sqrt(float(np.sum(grid.weights * np.abs(v) ** 2)))
        phase = v[np.argmax(np.abs(v))]
        wfs.append(WaveFunction(v * abs(phase) / phase, grid, "rho", convention))
    meta = {"domain": spec.domain, "basis_size": spec.basis_size,
            "rho_window": list(grid.rho_range), "derivative": spec.derivative,
            "ml": spec.ml_params.to_dict()}
    return Spectrum(vals, wfs, drift, converged, spec.prescription, imag, meta)


def _beta_model(model, beta):
    if model.family in ("kmm", "sqrt"):
        return model.with_beta(beta)
    raise ConfigurationError("first-order shifts need a model family with a beta parameter")


def _spec_at(spec, beta):
    return spec.with_model(_beta_model(spec.model, beta))


def _matrix_at(spec, grid_rho, beta):
    s = _spec_at(spec, beta)
    g = build_grid(s.model, spec.basis_size, rho_range=grid_rho)
    return assemble_hamiltonian(s, g)


def perturbation_first_order(spec, k=5, step=FD_STEP):
    """First-order-in-beta shifts beta <n|dH/dbeta|n> on beta = 0 eigenstates.

    dH/dbeta is a Richardson-extrapolated finite difference of the assembled
    Hamiltonian on a fixed rho window (step and step/2).  Warns when exact
    levels at 0, beta/2, beta curve away from a straight line.
    """
    beta = spec.model.beta
    if beta == 0:
        return [0.0] * k
    if spec.domain == "box":
        # levels are p(q)^2/2m with q fixed; differentiate them directly
        e0 = _box_levels(_spec_at(spec, 0.0), k)
        e1 = _box_levels(_spec_at(spec, step), k)
        e2 = _box_levels(_spec_at(spec, step / 2), k)
        slope = 2 * (e2 - e0) / (step / 2) - (e1 - e0) / step
        return list(beta * slope)
    window = solver_grid(spec, n_levels=k).rho_range
    h0 = _matrix_at(spec, window, 0.0)
    d1 = (_matrix_at(spec, window, step) - h0) / step
    d2 = (_matrix_at(spec, window, step / 2) - h0) / (step / 2)
    dh = 2 * d2 - d1
    vals, vecs = linalg.eigh(h0)
    shifts = [beta * float(np.real(np.vdot(vecs[:, j], dh @ vecs[:, j]))) for j in range(k)]
    _regime_check(spec, k, shifts)
    return shifts


def _regime_check(spec, k, shifts):
    beta = spec.model.beta
    levels = [solve_spectrum(_spec_at(spec, b), k).eigenvalues for b in (0.0, beta / 2, beta)]
    e0, eh, e1 = levels
    curvature = 2 * (e1 - 2 * eh + e0)
    linear = e1 - e0 - curvature / 2
    ratio = np.max(np.abs(curvature) / np.maximum(np.abs(linear), 1e-300))
    if ratio > 0.1:
        warnings.warn(f"beta = {beta:g} is outside the linear regime (quadratic/linear "
                      f"ratio {ratio:.2f})", RegimeWarning, stacklevel=3)


def _x_matrix(grid):
    k = _fourier_lattice(grid)
    if grid.size % 2 == 0:
        k = k.copy()
        k[grid.size // 2] = 0.0
    return linalg.circulant(np.fft.fft(k) / grid.size)


def _expectations(spec, spectrum):
    """Corrected versus naive <x> and <x^2> on each eigenstate.

    Corrected: <psi|x^n|psi> on the unprimed eigenvector, which equals
    <psi'|A^{-2} xi^n|psi'>.  Naive: moments of |psi(xi)|^2 for the unprimed
    quasi-position samples, i.e. x^n weighted with the state A psi.
    """
    grid = spectrum.eigenvectors[0].grid
    x = _x_matrix(grid)
    x2 = x @ x
    amp = _amplitude_diag(spec, grid)
    rows = []
    for wf in spectrum.eigenvectors:
        psi = wf.values / amp if wf.convention == "primed" else wf.values
        psi = psi / np.linalg.norm(psi)
        naive = amp * psi
        naive = naive / np.linalg.norm(naive)
        rows.append({
            "x_corrected": float(np.real(np.vdot(psi, x @ psi))),
            "x_naive": float(np.real(np.vdot(naive, x @ naive))),
            "x2_corrected": float(np.real(np.vdot(psi, x2 @ psi))),
            "x2_naive": float(np.real(np.vdot(naive, x2 @ naive))),
        })
    return rows


@dataclass(frozen=True)
class PrescriptionReport:
    levels: int
    spectra: dict
    differences: dict
    expectations: list
    similarity_max_relative: float
    naive_max_abs: float
    sweep: dict = None

    def to_dict(self):
        return {"levels": self.levels,
                "spectra": {k: [float(v) for v in vals] for k, vals in self.spectra.items()},
                "differences": {k: [float(v) for v in vals] for k, vals in self.differences.items()},
                "expectations": self.expectations,
                "similarity_max_relative": self.similarity_max_relative,
                "naive_max_abs": self.naive_max_abs, "sweep": self.sweep}


def _loglog_slope(betas, values):
    betas = np.asarray(betas, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    floor = np.finfo(float).tiny
    return float(np.polyfit(np.log(betas), np.log(np.maximum(values, floor)), 1)[0])


def compare_prescriptions(spec, k=5, betas=None):
    """Spectra under all three prescriptions, their gaps and, over ``betas``, slopes.

    The sweep reports the log-log slope of max_n |E_naive - E_correct| and,
    for reference, of the naive-versus-corrected <x^2> discrepancy and of the
    first-order energy shift.
    """
    spectra = {p: solve_spectrum(replace(spec, prescription=p), k) for p in PRESCRIPTIONS}
    e = {p: s.eigenvalues for p, s in spectra.items()}
    diffs = {
        "primed_minus_derivative": e["primed_correct"] - e["derivative_corrected"],
        "naive_minus_correct": e["naive_literature"] - e["derivative_corrected"],
    }
    sim = float(np.max(np.abs(diffs["primed_minus_derivative"])
                       / np.maximum(np.abs(e["derivative_corrected"]), 1e-300)))
    expect = _expectations(spec, spectra["derivative_corrected"]) if spec.domain != "box" else []
    sweep = None
    if betas is not None:
        gaps, x2_gaps, shifts = [], [], []
        for b in betas:
            s = _spec_at(spec, b)
            sub = compare_prescriptions(s, k)
            gaps.append(sub.naive_max_abs)
            x2_gaps.append(max(abs(r["x2_naive"] - r["x2_corrected"]) for r in sub.expectations)
                           if sub.expectations else 0.0)
            e_corr = sub.spectra["derivative_corrected"]
            e_zero = solve_spectrum(_spec_at(spec, 0.0), k).eigenvalues
            shifts.append(float(np.max(np.abs(e_corr - e_zero))))
        sweep = {"betas": [float(b) for b in betas], "naive_gap": gaps,
                 "naive_gap_slope": _loglog_slope(betas, gaps),
                 "x2_gap": x2_gaps, "x2_gap_slope": _loglog_slope(betas, x2_gaps),
                 "shift": shifts, "shift_slope": _loglog_slope(betas, shifts)}
    return PrescriptionReport(k, e, diffs, expect, sim,
                              float(np.max(np.abs(diffs["naive_minus_correct"]))), sweep)
