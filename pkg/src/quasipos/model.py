"""Deformation functions f(p) and the kinematic maps p <-> rho.

Internal units have hbar = 1.  ``rho(p)`` is the integral of dp'/f(p') from
0 to p; it is the eigenvalue of the generator of translations, and the
minimal position uncertainty follows from its supremum as
``pi / (2 * rho_max)``.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
from scipy import integrate, optimize

from .errors import ConfigurationError, DomainError, NumericalError

# one doubling of the cutoff must add less than this to call the limit finite
CONVERGENCE_GROWTH = 1e-12
MAX_DOUBLINGS = 200
# a tail still growing at |p| ~ 2^40 is taken as divergent
MIN_DOUBLINGS = 40
QUAD_EPSABS = 1e-15
QUAD_EPSREL = 1e-13


@dataclass(frozen=True, eq=False)
class GupModel:
    """A one-dimensional GUP model ``[x, p] = i f(p)``.

    Parameters
    ----------
    name : str
    f : callable
        Vectorised evaluator of the deformation function.
    p_domain : tuple of float
        ``(p_min, p_max)``; either endpoint may be infinite.
    params : mapping
        Real parameters, e.g. ``{"beta": 0.1}``.
    family : str
        ``"identity"``, ``"kmm"``, ``"sqrt"`` or ``"custom"``.
    df : callable, optional
        Derivative f'(p); finite differences are used when absent.
    rho_closed_form, p_closed_form : callable, optional
        Analytic rho(p) and its inverse.  Used as fast paths and as an
        independent cross-check of the quadrature.
    first_moment_closed_form : callable, optional
        Analytic ``G(p) = int_0^p p'/f(p') dp'`` used by the ML amplitude.
    """

    name: str
    f: Callable
    p_domain: tuple = (-math.inf, math.inf)
    params: Mapping = field(default_factory=dict)
    family: str = "custom"
    df: Optional[Callable] = None
    rho_closed_form: Optional[Callable] = None
    p_closed_form: Optional[Callable] = None
    first_moment_closed_form: Optional[Callable] = None

    def __post_init__(self):
        lo, hi = (float(v) for v in self.p_domain)
        if not lo < 0.0 < hi:
            raise ConfigurationError("p_domain must contain 0 in its interior")
        object.__setattr__(self, "p_domain", (lo, hi))
        object.__setattr__(self, "params", dict(self.params))
        sample = _dense_sample(lo, hi)
        with np.errstate(all="ignore"):
            values = np.asarray(self.f(sample), dtype=float) * np.ones_like(sample)
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            bad = sample[~(np.isfinite(values) & (values > 0))][0]
            raise ConfigurationError(
                f"f(p) must be finite and positive on the domain; fails at p={bad:g}")
        if not self.symmetric:
            warnings.warn(f"model {self.name!r} has an asymmetric momentum domain",
                          stacklevel=3)

    @property
    def symmetric(self):
        lo, hi = self.p_domain
        if lo != -hi:
            return False
        probe = np.linspace(0.1, 10.0, 7)
        probe = probe[probe < hi]
        return bool(np.allclose(self.f(probe), self.f(-probe), rtol=1e-12, atol=0))

    @property
    def beta(self):
        return float(self.params.get("beta", 0.0))

    def with_beta(self, beta):
        """Same built-in family at another deformation strength."""
        builders = {"kmm": kmm, "sqrt": sqrt_model}
        if self.family in builders:
            return builders[self.family](beta)
        if self.family == "identity":
            return identity() if beta == 0 else kmm(beta)
        if self.family == "custom" and "expression" in self.params:
            return custom_from_expression(self.params["expression"], beta,
                                          self.p_domain, self.name)
        raise ConfigurationError(f"model {self.name!r} has no deformation parameter")

    def derivative(self, p):
        p = np.asarray(p, dtype=float)
        if self.df is not None:
            return np.asarray(self.df(p), dtype=float) * np.ones_like(p)
        step = 1e-5 * np.maximum(1.0, np.abs(p))
        return (self.f(p + step) - self.f(p - step)) / (2 * step)

    def __repr__(self):
        return f"GupModel(name={self.name!r}, family={self.family!r}, params={self.params})"


@dataclass(frozen=True)
class KinematicScales:
    rho_max: float
    delta_x_min: float
    rho_lo: float
    rho_hi: float

    @property
    def finite(self):
        return math.isfinite(self.rho_max)

    def to_dict(self):
        return {"rho_max": self.rho_max, "delta_x_min": self.delta_x_min,
                "rho_lo": self.rho_lo, "rho_hi": self.rho_hi}


def _dense_sample(lo, hi, n=4001):
    a = math.atan(lo) if math.isfinite(lo) else -math.pi / 2
    b = math.atan(hi) if math.isfinite(hi) else math.pi / 2
    theta = np.linspace(a, b, n)[1:-1]
    inner = np.tan(theta)
    ends = [v for v in (lo, hi) if math.isfinite(v)]
    return np.concatenate([inner, ends]) if ends else inner


# ---------------------------------------------------------------------------
# built-in models


def identity():
    """Ordinary quantum mechanics, f = 1."""
    return GupModel(
        name="identity", family="identity", params={"beta": 0.0},
        f=lambda p: np.ones_like(np.asarray(p, dtype=float)),
        df=lambda p: np.zeros_like(np.asarray(p, dtype=float)),
        rho_closed_form=lambda p: np.asarray(p, dtype=float) * 1.0,
        p_closed_form=lambda r: np.asarray(r, dtype=float) * 1.0,
        first_moment_closed_form=lambda p: 0.5 * np.asarray(p, dtype=float) ** 2,
    )


def _check_beta(beta):
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0:
        raise ConfigurationError(f"beta must be a non-negative finite number, got {beta}")
    return beta


def kmm(beta):
    """f = 1 + beta p^2, which has a finite rho_max = pi / (2 sqrt(beta))."""
    beta = _check_beta(beta)
    if beta == 0.0:
        base = identity()
        return GupModel(name="kmm", family="kmm", params={"beta": 0.0}, f=base.f, df=base.df,
                        rho_closed_form=base.rho_closed_form, p_closed_form=base.p_closed_form,
                        first_moment_closed_form=base.first_moment_closed_form)
    sb = math.sqrt(beta)
    return GupModel(
        name="kmm", family="kmm", params={"beta": beta},
        f=lambda p: 1.0 + beta * np.asarray(p, dtype=float) ** 2,
        df=lambda p: 2.0 * beta * np.asarray(p, dtype=float),
        rho_closed_form=lambda p: np.arctan(sb * np.asarray(p, dtype=float)) / sb,
        p_closed_form=lambda r: np.tan(sb * np.asarray(r, dtype=float)) / sb,
        first_moment_closed_form=lambda p: np.log1p(beta * np.asarray(p, dtype=float) ** 2)
        / (2.0 * beta),
    )


def sqrt_model(beta):
    """f = sqrt(1 + beta p^2); rho_max is infinite."""
    beta = _check_beta(beta)
    if beta == 0.0:
        base = identity()
        return GupModel(name="sqrt", family="sqrt", params={"beta": 0.0}, f=base.f, df=base.df,
                        rho_closed_form=base.rho_closed_form, p_closed_form=base.p_closed_form,
                        first_moment_closed_form=base.first_moment_closed_form)
    sb = math.sqrt(beta)

    def f(p):
        return np.sqrt(1.0 + beta * np.asarray(p, dtype=float) ** 2)

    def first_moment(p):
        p = np.asarray(p, dtype=float)
        return p ** 2 / (f(p) + 1.0)

    return GupModel(
        name="sqrt", family="sqrt", params={"beta": beta}, f=f,
        df=lambda p: beta * np.asarray(p, dtype=float) / f(p),
        rho_closed_form=lambda p: np.arcsinh(sb * np.asarray(p, dtype=float)) / sb,
        p_closed_form=lambda r: np.sinh(sb * np.asarray(r, dtype=float)) / sb,
        first_moment_closed_form=first_moment,
    )


def custom(name, f, p_domain=(-math.inf, math.inf), params=None, **closed_forms):
    """User model from an evaluator; closed forms are optional keywords."""
    return GupModel(name=name, f=f, p_domain=tuple(p_domain), params=params or {},
                    family="custom", **closed_forms)


def custom_from_expression(expression, beta=0.0, p_domain=(-math.inf, math.inf), name="custom"):
    """Custom model from a string in ``p`` and ``beta``, e.g. ``"1 + beta*p**4"``."""
    import sympy

    p_sym, b_sym = sympy.symbols("p beta", real=True)
    try:
        expr = sympy.sympify(expression, locals={"p": p_sym, "beta": b_sym})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ConfigurationError(f"cannot parse f expression {expression!r}: {exc}") from exc
    extra = expr.free_symbols - {p_sym, b_sym}
    if extra:
        raise ConfigurationError(f"unknown symbols in f expression: {sorted(map(str, extra))}")
    beta = _check_beta(beta)
    f_num = sympy.lambdify(p_sym, expr.subs(b_sym, beta), "numpy")
    df_num = sympy.lambdify(p_sym, sympy.diff(expr, p_sym).subs(b_sym, beta), "numpy")

    def f(p):
        p = np.asarray(p, dtype=float)
        return np.asarray(f_num(p), dtype=float) * np.ones_like(p)

    def df(p):
        p = np.asarray(p, dtype=float)
        return np.asarray(df_num(p), dtype=float) * np.ones_like(p)

    return GupModel(name=name, f=f, df=df, p_domain=tuple(p_domain), family="custom",
                    params={"beta": beta, "expression": str(expression)})


BUILTINS = {"identity": lambda beta: identity(), "kmm": kmm, "sqrt": sqrt_model}
_MODEL_KEYS = {"name", "family", "beta", "p_min", "p_max", "f"}


def model_from_dict(doc):
    """Build a model from its JSON form.

    ``{"name", "family" ("identity"|"kmm"|"sqrt"|"custom"), "beta", "p_min",
    "p_max"}``; custom models also need ``"f"``, an expression in ``p`` and
    ``beta``.
    """
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise ConfigurationError(f"unknown model keys: {sorted(unknown)}")
    family = doc.get("family", "kmm")
    beta = doc.get("beta", 0.0)
    if not isinstance(beta, (int, float)) or isinstance(beta, bool):
        raise ConfigurationError("beta must be a number")
    lo = float(doc.get("p_min", -math.inf))
    hi = float(doc.get("p_max", math.inf))
    if family == "custom":
        if "f" not in doc:
            raise ConfigurationError("custom models need an 'f' expression")
        return custom_from_expression(doc["f"], beta, (lo, hi), doc.get("name", "custom"))
    if "f" in doc:
        raise ConfigurationError("'f' is only accepted for the custom family")
    if family not in BUILTINS:
        raise ConfigurationError(f"unknown model family {family!r}")
    model = BUILTINS[family](beta)
    if (lo, hi) != model.p_domain:
        model = GupModel(name=doc.get("name", model.name), f=model.f, df=model.df,
                         p_domain=(lo, hi), params=model.params, family=model.family,
                         rho_closed_form=model.rho_closed_form,
                         first_moment_closed_form=model.first_moment_closed_form)
    elif "name" in doc:
        model = GupModel(**{**_fields(model), "name": doc["name"]})
    return model


def model_to_dict(model):
    doc = {"name": model.name, "family": model.family, "beta": model.beta,
           "p_min": model.p_domain[0], "p_max": model.p_domain[1]}
    if "expression" in model.params:
        doc["f"] = model.params["expression"]
    return doc


def _fields(model):
    return {k: getattr(model, k) for k in model.__dataclass_fields__}


# ---------------------------------------------------------------------------
# kinematic maps


def _check_domain(model, p):
    lo, hi = model.p_domain
    p = np.asarray(p, dtype=float)
    if np.any(np.isnan(p)) or np.any(p < lo) or np.any(p > hi):
        raise DomainError(f"p outside the momentum domain [{lo}, {hi}]")
    return p


def evaluate_f(model, p):
    """f(p) with a domain check."""
    p = _check_domain(model, p)
    return model.f(p) * np.ones_like(p) if p.ndim else float(model.f(p))


def _breakpoints(a, b):
    # split at +-10^k so quad sees each decade separately
    pts = [a, b]
    for k in range(0, 309):
        edge = 10.0 ** k
        if edge >= max(abs(a), abs(b)):
            break
        pts.extend(v for v in (edge, -edge) if a < v < b)
    return sorted(set(pts))


def _integrate(func, a, b):
    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    total = err = 0.0
    pts = _breakpoints(a, b)
    for lo, hi in zip(pts[:-1], pts[1:]):
        val, e = integrate.quad(func, lo, hi, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
        total += val
        err += e
    if not math.isfinite(total) or err > 1e-9 * max(1.0, abs(total)):
        raise NumericalError(f"quadrature on [{a:g}, {b:g}] did not converge", residual=err)
    return sign * total, err


def _inv_f(model):
    return lambda q: 1.0 / float(model.f(q))


def rho_of_p(model, p, method="quad"):
    """rho(p) = int_0^p dp'/f(p').

    ``method="quad"`` integrates adaptively (the reference route);
    ``"closed"`` uses the model's analytic form.
    """
    p = _check_domain(model, p)
    if method == "closed":
        if model.rho_closed_form is None:
            raise ConfigurationError(f"model {model.name!r} has no closed-form rho")
        out = np.asarray(model.rho_closed_form(p), dtype=float)
        return out if out.ndim else float(out)
    if method != "quad":
        raise ValueError(f"unknown method {method!r}")
    g = _inv_f(model)
    if p.ndim == 0:
        return _integrate(g, 0.0, float(p))[0]
    return np.array([_integrate(g, 0.0, float(v))[0] for v in p.ravel()]).reshape(p.shape)


def p_of_rho(model, rho, method="auto"):
    """Inverse of :func:`rho_of_p`.

    ``method``: ``"closed"``, ``"numeric"`` (bracketed root finding on the
    quadrature) or ``"auto"`` (closed form when the model has one).
    """
    rho = np.asarray(rho, dtype=float)
    scales = kinematic_scales(model)
    if np.any(rho <= scales.rho_lo) or np.any(rho >= scales.rho_hi):
        raise DomainError(f"rho outside ({scales.rho_lo}, {scales.rho_hi})")
    if method == "auto":
        method = "closed" if model.p_closed_form is not None else "numeric"
    if method == "closed":
        if model.p_closed_form is None:
            raise ConfigurationError(f"model {model.name!r} has no closed-form inverse")
        out = np.asarray(model.p_closed_form(rho), dtype=float)
        return out if out.ndim else float(out)
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}")
    if rho.ndim == 0:
        return _invert(model, float(rho))
    return np.array([_invert(model, float(v)) for v in rho.ravel()]).reshape(rho.shape)


def _invert(model, target):
    if target == 0.0:
        return 0.0
    lo, hi = model.p_domain
    edge = hi if target > 0 else lo
    g = _inv_f(model)
    step = 1.0 if target > 0 else -1.0
    a, ra = 0.0, 0.0
    b = step
    while True:
        if abs(b) >= abs(edge):
            b = edge
        rb = ra + _integrate(g, a, b)[0]
        if (rb - target) * step >= 0 or b == edge:
            break
        a, ra, b = b, rb, 2 * b
    # root on the bracket, integrating from the anchor a where rho(a) = ra
    return optimize.brentq(lambda q: ra + _integrate(g, a, q)[0] - target, min(a, b), max(a, b),
                           xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def rho_array(model, p):
    """Vectorised rho(p) for grid construction (closed form when available)."""
    if model.rho_closed_form is not None:
        return np.asarray(model.rho_closed_form(np.asarray(p, dtype=float)), dtype=float)
    return rho_of_p(model, np.asarray(p, dtype=float))


def p_array(model, rho):
    """Vectorised p(rho): closed form, else integration of dp/drho = f(p)."""
    rho = np.asarray(rho, dtype=float)
    if model.p_closed_form is not None:
        return np.asarray(model.p_closed_form(rho), dtype=float)
    out = np.zeros_like(rho)
    for sign in (1.0, -1.0):
        mask = sign * rho > 0
        if not np.any(mask):
            continue
        targets = np.sort(sign * rho[mask])
        sol = integrate.solve_ivp(lambda t, y: sign * model.f(y), (0.0, targets[-1]), [0.0],
                                  t_eval=targets, method="DOP853", rtol=1e-13, atol=1e-14)
        if not sol.success:
            raise NumericalError(f"p(rho) integration failed: {sol.message}")
        order = np.argsort(sign * rho[mask])
        vals = np.empty(targets.size)
        vals[order] = sol.y[0]
        out[mask] = vals
    return out


def _rho_limit(model, direction, numeric=False):
    """Limit of rho(p) as p runs to the domain edge in ``direction`` (+1/-1)."""
    edge = model.p_domain[1] if direction > 0 else model.p_domain[0]
    if model.rho_closed_form is not None and not numeric:
        with np.errstate(all="ignore"):
            val = float(model.rho_closed_form(np.asarray(edge)))
        if not math.isnan(val):
            return val
    g = _inv_f(model)
    if math.isfinite(edge):
        return _integrate(g, 0.0, edge)[0]
    cut = float(direction)
    total = _integrate(g, 0.0, cut)[0]
    growth = []
    for _ in range(MAX_DOUBLINGS):
        inc = abs(_integrate(g, cut, 2 * cut)[0])
        total += direction * inc
        growth.append(inc)
        if inc < CONVERGENCE_GROWTH * max(1.0, abs(total)):
            if len(growth) > 1 and 0 < inc < growth[-2]:
                ratio = inc / growth[-2]
                total += direction * inc * ratio / (1 - ratio)
            return total
        if len(growth) >= MIN_DOUBLINGS and all(growth[-k] >= 0.999 * growth[-k - 1]
                                                 for k in range(1, 9)):
            return direction * math.inf
        cut *= 2
    raise NumericalError(
        "convergence of rho(p) at infinite |p| is ambiguous; increase the cutoff range "
        f"beyond |p| = {abs(cut):.3g} or supply a closed form",
        residual=growth[-1], trace=growth)


def kinematic_scales(model, method="auto"):
    """rho_max and the minimal position uncertainty pi / (2 rho_max).

    ``method="numeric"`` ignores closed forms and integrates dp/f with the
    cutoff-doubling limit (not cached).  For asymmetric domains ``rho_max``
    is half the width of the rho range.
    """
    if method not in ("auto", "numeric"):
        raise ValueError(f"unknown method {method!r}")
    numeric = method == "numeric"
    cached = None if numeric else model.__dict__.get("_scales")
    if cached is not None:
        return cached
    rho_hi = _rho_limit(model, +1, numeric)
    rho_lo = _rho_limit(model, -1, numeric)
    rho_max = 0.5 * (rho_hi - rho_lo)
    dx = 0.0 if math.isinf(rho_max) else math.pi / (2.0 * rho_max)
    scales = KinematicScales(rho_max=rho_max, delta_x_min=dx, rho_lo=rho_lo, rho_hi=rho_hi)
    if not numeric:
        object.__setattr__(model, "_scales", scales)
    return scales
