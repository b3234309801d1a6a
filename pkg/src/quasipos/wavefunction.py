"""Sampled wave functions tagged by representation and convention."""

from dataclasses import dataclass

import numpy as np

from .errors import ConventionError

REPRESENTATIONS = ("momentum", "rho", "quasiposition")
CONVENTIONS = ("unprimed", "primed")


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex samples of a state on a grid.

    ``convention="primed"`` marks psi' = A(p) psi, the image of a state under
    the non-unitary map that sends position eigenvectors to maximally
    localized states.  Momentum and rho samples on a rho-uniform grid hold
    the same numbers; the tag only records how they were produced.
    """

    values: np.ndarray
    grid: object
    representation: str = "momentum"
    convention: str = "unprimed"

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ConventionError(f"unknown representation {self.representation!r}")
        if self.convention not in CONVENTIONS:
            raise ConventionError(f"unknown convention {self.convention!r}")
        values = np.array(self.values, dtype=complex).ravel()
        if values.size != self.grid.size:
            raise ValueError(f"{values.size} samples for a grid of {self.grid.size} points")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def replace(self, values=None, **tags):
        return WaveFunction(self.values if values is None else values, tags.pop("grid", self.grid),
                            tags.pop("representation", self.representation),
                            tags.pop("convention", self.convention))

    def _check_compatible(self, other):
        if not isinstance(other, WaveFunction):
            return NotImplemented
        require_same(self, other)
        return True

    def __add__(self, other):
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        return self.replace(self.values + other.values)

    def __sub__(self, other):
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        return self.replace(self.values - other.values)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return self.replace(self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self.replace(-self.values)


def require_same(*wfs, representation=None, convention=None):
    """Raise ConventionError unless all tags (and grids) agree."""
    first = wfs[0]
    for wf in wfs:
        if wf.grid is not first.grid and wf.grid.size != first.grid.size:
            raise ConventionError("wave functions live on different grids")
        if wf.representation != first.representation:
            raise ConventionError(
                f"representation mismatch: {first.representation} vs {wf.representation}")
        if wf.convention != first.convention:
            raise ConventionError(f"convention mismatch: {first.convention} vs {wf.convention}")
    if representation is not None:
        allowed = (representation,) if isinstance(representation, str) else representation
        if first.representation not in allowed:
            raise ConventionError(
                f"expected {' or '.join(allowed)} representation, got {first.representation}")
    if convention is not None and first.convention != convention:
        raise ConventionError(f"expected {convention} states, got {first.convention}")


def random_smooth_state(grid, rng, n_modes=4, normalize=True):
    """Random smooth state on a rho-uniform grid.

    A sin^2 envelope over the rho window times a random trigonometric
    polynomial, so the state and its first derivative vanish at the window
    edges and ``p * psi`` stays smooth when p(rho) diverges there.
    """
    lo, hi = grid.rho_range
    s = (grid.rho - lo) / (hi - lo)
    k = np.arange(n_modes + 1)
    coef = (rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size)) / (1.0 + k)
    poly = np.exp(1j * np.pi * np.outer(2 * s - 1, k)) @ coef
    values = np.sin(np.pi * s) ** 2 * poly
    wf = WaveFunction(values, grid)
    if normalize:
        from .quadrature import norm
        wf = wf * (1.0 / norm(grid, wf))
    return wf
