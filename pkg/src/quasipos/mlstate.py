"""Maximal-localization states and their variational parameters.

A state of the family is A(p) exp(-i xi rho(p)) with

    A(p) = exp(-c * int_{p0}^{p} (q - p0) / f(q) dq),   c = <f> / (2 dp^2).

Because (x - xi) psi = -i c (p - p0) psi, every member with p0 = <p>
saturates the Robertson bound, so <f> = 2 c dp^2 holds for the moments of
the state itself and the family is parametrized by c alone.  The position
spread is then dx(c) = c * dp(c); :func:`solve_ml_params` minimizes it.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, NoMinimumError, NumericalError
from .model import kinematic_scales, p_array, rho_array
from .wavefunction import WaveFunction

MOMENT_RTOL = 1e-11
MEAN_P_DRIFT = 1e-10
SCAN_EXPONENTS = np.arange(-20, 21)


@dataclass(frozen=True)
class MLParams:
    """Parameters of a maximal-localization state (hbar = 1 units)."""

    xi: float
    mean_p: float
    delta_p: float
    mean_f: float
    achieved_delta_x: float = math.nan
    trace: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not self.delta_p > 0:
            raise DomainError(f"delta_p must be positive, got {self.delta_p}")
        if not self.mean_f > 0:
            raise DomainError(f"mean_f must be positive, got {self.mean_f}")

    @property
    def c(self):
        """Exponent <f> / (2 dp^2) of the amplitude; 0 when dp is infinite."""
        if math.isinf(self.delta_p):
            return 0.0
        return self.mean_f / (2.0 * self.delta_p ** 2)

    def with_xi(self, xi):
        return replace(self, xi=float(xi))

    @classmethod
    def ordinary(cls, xi=0.0, mean_p=0.0, mean_f=1.0):
        """Plane-wave limit dp -> infinity, where A = 1."""
        return cls(float(xi), float(mean_p), math.inf, float(mean_f))

    def to_dict(self):
        return {"xi": self.xi, "mean_p": self.mean_p, "delta_p": self.delta_p,
                "mean_f": self.mean_f, "achieved_delta_x": self.achieved_delta_x,
                "c": self.c}


@dataclass(frozen=True, eq=False)
class MLState:
    params: MLParams
    samples: WaveFunction
    normalization: float


T_EDGE = 1e-9


def _tabulation(model):
    """Dense solutions rho(p) and G(p) = int_0^p q/f dq in t = arctan(p).

    Used for models without closed forms, so that moment integrals do not
    nest adaptive quadratures.  Cached on the model instance.
    """
    cached = model.__dict__.get("_tabulation")
    if cached is not None:
        return cached
    lo = max(math.atan(model.p_domain[0]), -0.5 * math.pi + T_EDGE)
    hi = min(math.atan(model.p_domain[1]), 0.5 * math.pi - T_EDGE)

    def rhs(t, y):
        p = math.tan(t)
        sec2 = 1.0 + p * p
        inv = 1.0 / float(model.f(p))
        return [inv * sec2, p * inv * sec2]

    sols = []
    for end in (lo, hi):
        sol = integrate.solve_ivp(rhs, (0.0, end), [0.0, 0.0], method="DOP853", rtol=1e-13,
                                  atol=1e-15, dense_output=True)
        if not sol.success:
            raise NumericalError(f"tabulating rho and G failed: {sol.message}")
        sols.append(sol.sol)

    def evaluate(p, index):
        t = np.arctan(np.clip(np.asarray(p, dtype=float), math.tan(lo), math.tan(hi)))
        out = np.where(t < 0, sols[0](np.minimum(t, 0.0))[index], sols[1](np.maximum(t, 0.0))[index])
        return out if out.ndim else float(out)

    table = (lambda p: evaluate(p, 0), lambda p: evaluate(p, 1))
    object.__setattr__(model, "_tabulation", table)
    return table


def _first_moment(model):
    """Callable G(p) = int_0^p q / f(q) dq."""
    if model.first_moment_closed_form is not None:
        return lambda p: np.asarray(model.first_moment_closed_form(p), dtype=float)
    return _tabulation(model)[1]


def _rho(model):
    if model.rho_closed_form is not None:
        return lambda p: rho_array(model, p)
    return _tabulation(model)[0]


def _exponent(model, mean_p, p, rho=None):
    """I(p) = int_{mean_p}^{p} (q - mean_p)/f dq, vectorised."""
    p = np.asarray(p, dtype=float)
    g = _first_moment(model)
    if mean_p == 0.0:
        return g(p) - g(np.zeros(()))
    rho_fn = _rho(model)
    if rho is None:
        rho = rho_fn(p)
    return g(p) - g(np.asarray(mean_p)) - mean_p * (rho - rho_fn(mean_p))


def amplitude(model, params, p):
    """A(p) for ``params``, normalized so that A(mean_p) = 1."""
    lo, hi = model.p_domain
    arr = np.asarray(p, dtype=float)
    if np.any(arr < lo) or np.any(arr > hi):
        raise DomainError(f"p outside the momentum domain [{lo}, {hi}]")
    c = params.c
    if c == 0.0:
        out = np.ones_like(arr)
    else:
        out = np.exp(-c * _exponent(model, params.mean_p, arr))
    return out if out.ndim else float(out)


class _Moments:
    """Moments of |A|^2 for a trial exponent c, integrated in rho."""

    def __init__(self, model):
        self.model = model
        self.scales = kinematic_scales(model)
        self.use_rho = model.p_closed_form is not None and self.scales.finite
        self.g = _first_moment(model)
        self.rho = _rho(model)

    def _quad(self, func, a, b):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(func, a, b, epsabs=0.0, epsrel=MOMENT_RTOL, limit=400)
            except integrate.IntegrationWarning as exc:
                raise NumericalError(f"moment quadrature failed: {exc}") from None
        if not math.isfinite(val) or err > 1e-8 * max(abs(val), 1e-300):
            raise NumericalError("moment quadrature did not converge", residual=err)
        return val

    def integrals(self, c, mean_p, funcs):
        """int A^2 * fn(p, I) drho for each fn, with A^2 = exp(-2 c I)."""
        model = self.model
        g0 = float(self.g(np.asarray(mean_p)))
        r0 = float(self.rho(mean_p)) if mean_p else 0.0

        def weight(p, rho):
            expo = self.g(p) - g0 - mean_p * (rho - r0)
            return np.exp(-2.0 * c * expo), expo

        out = []
        for fn in funcs:
            if self.use_rho:
                def integrand(r, fn=fn):
                    p = float(p_array(model, r))
                    w, expo = weight(p, r)
                    return float(w * fn(p, expo))
                pieces = [(self.scales.rho_lo, r0), (r0, self.scales.rho_hi)]
            else:
                # integrate in t = arctan(p), so dp/f = sec^2(t) dt / f
                def integrand(t, fn=fn):
                    p = math.tan(t)
                    w, expo = weight(p, float(self.rho(p)))
                    return float(w * fn(p, expo) * (1.0 + p * p) / model.f(p))
                w = 1.0 / math.sqrt(c) if c > 0 else math.inf
                cuts = sorted({mean_p + s * k * w for s in (-1, 1) for k in (1, 4, 16)
                               if math.isfinite(w)} | {mean_p})
                cuts = [math.atan(v) for v in cuts if model.p_domain[0] < v < model.p_domain[1]]
                edges = [math.atan(model.p_domain[0]), *cuts, math.atan(model.p_domain[1])]
                pieces = list(zip(edges[:-1], edges[1:]))
            out.append(sum(self._quad(integrand, a, b) for a, b in pieces if a < b))
        return out

    def stats(self, c, mean_p):
        """(<p>, <(p - mean_p)^2>, <f>) of the trial state."""
        f = self.model.f
        n0, n1, n2, nf = self.integrals(c, mean_p, [
            lambda p, e: 1.0, lambda p, e: p - mean_p, lambda p, e: (p - mean_p) ** 2,
            lambda p, e: f(p)])
        if not n0 > 0:
            raise NumericalError("trial amplitude underflows everywhere")
        return mean_p + n1 / n0, n2 / n0, nf / n0

    def dvar_dc(self, c):
        """d<p^2>/dc at mean_p = 0 via d(A^2)/dc = -2 I A^2."""
        n0, n2, ni, n2i = self.integrals(c, 0.0, [
            lambda p, e: 1.0, lambda p, e: p * p, lambda p, e: e, lambda p, e: p * p * e])
        return -2.0 * (n2i / n0 - (n2 / n0) * (ni / n0))


def _self_consistent_mean(moments, c, mean_p):
    trace = []
    for _ in range(200):
        new_mean, var, mean_f = moments.stats(c, mean_p)
        trace.append(new_mean)
        if abs(new_mean - mean_p) < MEAN_P_DRIFT * max(1.0, math.sqrt(var)):
            return new_mean, var, mean_f, trace
        mean_p = new_mean
    raise NumericalError("<p> fixed-point loop did not converge", residual=abs(trace[-1] - trace[-2]),
                         trace=trace)


def _no_minimum(model):
    return NoMinimumError(
        f"model {model.name!r} has infinite rho_max: dx -> hbar/(2 dp) decreases without "
        "bound as dp grows, so there is no positive minimal uncertainty")


def solve_ml_params(model, xi=0.0):
    """Self-consistent (<p>, dp, <f>) minimizing the position spread.

    Scans the exponent c on a logarithmic ladder, refines the bracketing
    interval by bounded minimization of dx(c)^2 and, for symmetric models,
    polishes with a root find on the analytic derivative.  The result
    depends on the model only; ``xi`` is stored for convenience.
    """
    scales = kinematic_scales(model)
    if not scales.finite:
        raise _no_minimum(model)
    cache = model.__dict__.get("_ml_params")
    if cache is None:
        cache = _solve_core(model)
        object.__setattr__(model, "_ml_params", cache)
    return cache.with_xi(xi)


def _solve_core(model):
    moments = _Moments(model)
    symmetric = model.symmetric
    state = {"mean_p": 0.0}
    trace = []

    def dx2(logc):
        c = math.exp(logc)
        try:
            if symmetric:
                _, var, _ = moments.stats(c, 0.0)
            else:
                state["mean_p"], var, _, _ = _self_consistent_mean(moments, c, state["mean_p"])
        except NumericalError:
            return math.inf
        val = c * c * var
        trace.append((c, val))
        return val

    logs = SCAN_EXPONENTS * math.log(2.0)
    values = np.array([dx2(v) for v in logs])
    k = int(np.argmin(values))
    if not math.isfinite(values[k]) or k in (0, len(logs) - 1):
        raise NoMinimumError(
            f"no interior minimum of dx over the ML family for model {model.name!r}")
    with np.errstate(invalid="ignore", over="ignore"):
        res = optimize.minimize_scalar(dx2, bounds=(logs[k - 1], logs[k + 1]), method="bounded",
                                       options={"xatol": 1e-10})
    c = math.exp(res.x)
    if symmetric:
        def slope(cc):
            _, var, _ = moments.stats(cc, 0.0)
            return 2 * cc * var + cc * cc * moments.dvar_dc(cc)
        lo, hi = c * (1 - 1e-4), c * (1 + 1e-4)
        try:
            if slope(lo) < 0 < slope(hi):
                c = optimize.brentq(slope, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        except NumericalError:
            pass
        mean_p, (_, var, mean_f) = 0.0, moments.stats(c, 0.0)
    else:
        mean_p, var, mean_f, _ = _self_consistent_mean(moments, c, state["mean_p"])
    delta_p = math.sqrt(var)
    return MLParams(0.0, mean_p, delta_p, mean_f, c * delta_p, tuple(trace))


def ml_wavefunction(model, params, grid):
    """Sampled N A(p) exp(-i xi rho(p)) on ``grid``, unit norm under dp/f.

    On grids with epsilon != 0 the samples carry the extra factor
    f^(-epsilon/2) of that representation, so the norm is still 1.
    """
    amp = amplitude(model, params, grid.nodes)
    amp = amp * np.ones(grid.size)
    norm2 = float(np.sum(grid.base_weights * amp ** 2))
    if not norm2 > 0:
        raise NumericalError("ML amplitude vanishes on the grid")
    n = 1.0 / math.sqrt(norm2)
    values = n * amp * np.exp(-1j * params.xi * grid.rho)
    if grid.epsilon:
        values = values * grid.f_values ** (-0.5 * grid.epsilon)
    return MLState(params, WaveFunction(values, grid), n)


@dataclass(frozen=True)
class MLCheckReport:
    mean_x: float
    delta_x: float
    target_delta_x: float
    mean_xi: complex
    mean_xi_dagger: complex
    delta_xi: float
    variance_identity: float
    tolerance: float
    checks: dict

    @property
    def passed(self):
        return all(self.checks.values())

    def to_dict(self):
        return {"mean_x": self.mean_x, "delta_x": self.delta_x,
                "target_delta_x": self.target_delta_x,
                "mean_xi": [self.mean_xi.real, self.mean_xi.imag],
                "mean_xi_dagger": [self.mean_xi_dagger.real, self.mean_xi_dagger.imag],
                "delta_xi": self.delta_xi, "variance_identity": self.variance_identity,
                "tolerance": self.tolerance, "checks": dict(self.checks), "passed": self.passed}


def verify_ml_conditions(state, grid, tolerance=1e-6):
    """Check <x> = xi, dx = dx_min, <xi> = <xi^dagger> and d(xi) = 0."""
    from . import quasiop

    psi, params = state.samples, state.params
    scales = kinematic_scales(grid.model)
    target = scales.delta_x_min if scales.finite else params.achieved_delta_x
    mean_x = quasiop.expectation(grid, psi, quasiop.apply_x(grid, psi)).real
    x_sq = quasiop.norm_squared(grid, quasiop.apply_x(grid, psi))
    delta_x = math.sqrt(max(x_sq - mean_x ** 2, 0.0))
    xi_psi = quasiop.apply_xi(grid, params, psi)
    mean_xi = quasiop.expectation(grid, psi, xi_psi)
    mean_xi_dag = quasiop.expectation(grid, psi, quasiop.apply_xi_dagger(grid, params, psi))
    delta_xi = quasiop.delta_xi(grid, params, psi)
    identity = (quasiop.norm_squared(grid, xi_psi) - x_sq
                + params.mean_f ** 2 / (4.0 * params.delta_p ** 2))
    scale = max(1.0, abs(params.xi))
    checks = {
        "mean_x": abs(mean_x - params.xi) <= tolerance * scale,
        "delta_x": abs(delta_x - target) <= tolerance * max(target, 1e-300),
        "xi_equals_xi_dagger": abs(mean_xi - mean_xi_dag) <= tolerance * scale,
        "delta_xi": delta_xi <= tolerance * max(1.0, target),
    }
    return MLCheckReport(mean_x, delta_x, target, mean_xi, mean_xi_dag, delta_xi,
                         identity, tolerance, checks)
