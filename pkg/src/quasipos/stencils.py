"""Finite-difference weights and derivative matrices."""

from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels


def fornberg_weights(x0, nodes, order):
    """Weights for the ``order``-th derivative at ``x0`` from values at ``nodes``.

    Exact when the inputs are integers or Fractions (Fornberg's recurrence).
    """
    nodes = [Fraction(v) for v in nodes]
    x0 = Fraction(x0)
    n = len(nodes)
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(order + 1)]
    c[0][0][0] = Fraction(1)
    c1 = Fraction(1)
    for i in range(1, n):
        c2 = Fraction(1)
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            for k in range(min(i, order), -1, -1):
                prev = c[k - 1][i - 1][j] if k else 0
                c[k][i][j] = ((nodes[i] - x0) * c[k][i - 1][j] - k * prev) / c3
        for k in range(min(i, order), -1, -1):
            prev = c[k - 1][i - 1][i - 1] if k else 0
            c[k][i][i] = c1 / c2 * (k * prev - (nodes[i - 1] - x0) * c[k][i - 1][i - 1])
        c1 = c2
    return [c[order][n - 1][j] for j in range(n)]


@lru_cache(maxsize=None)
def first_derivative_stencils(order=8, edge_order=None):
    """Centred and one-sided first-derivative weights of the given even order.

    Returns ``(central, left)``: ``central`` has ``order + 1`` weights for
    offsets ``-r..r``; ``left[i]`` are the weights on points
    ``0..edge_order`` for the derivative at point ``i`` (``i < r``).

    The edge closure defaults to two orders above the interior.  Operators
    such as [x, p] multiply edge derivatives by |p| ~ 1/h when rho_max is
    finite, and the extra order keeps the global rate at ``order``.
    """
    if order < 2 or order % 2:
        raise ValueError("stencil order must be an even integer >= 2")
    edge_order = order + 2 if edge_order is None else edge_order
    if edge_order < order:
        raise ValueError("edge_order must not be below order")
    r = order // 2
    central = np.array([float(w) for w in fornberg_weights(0, range(-r, r + 1), 1)])
    left = np.array([[float(w) for w in fornberg_weights(i, range(edge_order + 1), 1)]
                     for i in range(r)])
    central.setflags(write=False)
    left.setflags(write=False)
    return central, left


def derivative(values, h, order=8, dirichlet=False, backend=None):
    """d/du of samples on a uniform grid with spacing ``h``."""
    central, left = first_derivative_stencils(order)
    return kernels.stencil_derivative(values, central, left, h, dirichlet, backend)


def derivative_matrix(n, h, order=8, dirichlet=False):
    """Dense matrix of :func:`derivative` (real)."""
    central, left = first_derivative_stencils(order)
    r = order // 2
    mat = np.zeros((n, n))
    for k, w in enumerate(central):
        off = k - r
        if w:
            mat += np.diag(np.full(n - abs(off), w), off)
    if not dirichlet:
        wl = left.shape[1]
        mat[:r, :] = 0.0
        mat[-r:, :] = 0.0
        mat[:r, :wl] = left
        mat[n - r:, n - wl:] = -left[::-1, ::-1]
    return mat / h


def barycentric_derivative_matrix(x):
    """Spectral differentiation matrix on arbitrary distinct nodes."""
    x = np.asarray(x, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    # log-scaled barycentric weights avoid overflow for large n
    logw = -np.sum(np.log(np.abs(diff)), axis=1)
    sgn = np.prod(np.sign(diff), axis=1)
    w = sgn * np.exp(logw - logw.max())
    mat = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(mat, 0.0)
    np.fill_diagonal(mat, -mat.sum(axis=1))
    return mat
