"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the NumPy
versions are used.  Setting ``QUASIPOS_PURE_PYTHON=1`` forces the NumPy
backend.
"""

import os

import numpy as np

from . import _kernels_py

if os.environ.get("QUASIPOS_PURE_PYTHON", "") not in ("", "0"):
    _ext = None
else:
    try:
        from . import _kernels as _ext
    except ImportError:  # pragma: no cover - depends on the build
        _ext = None

BACKEND = "compiled" if _ext is not None else "python"
_impl = _ext if _ext is not None else _kernels_py


def _is_uniform(x):
    if x.size < 3:
        return x.size == 2
    d = np.diff(x)
    return bool(np.all(np.abs(d - d[0]) <= 1e-12 * max(abs(d[0]), 1e-300) * x.size))


def fourier_sum(src, coeff, dst, sign=1.0, backend=None):
    """Direct sum ``out[i] = sum_j coeff[j] exp(sign*1j*dst[i]*src[j])``.

    O(len(src) * len(dst)); no FFT.  ``backend`` overrides the module
    default ("compiled" or "python").
    """
    src = np.ascontiguousarray(src, dtype=float)
    coeff = np.ascontiguousarray(coeff, dtype=complex)
    dst = np.ascontiguousarray(dst, dtype=float)
    impl = _select(backend)
    return np.asarray(impl.fourier_sum(src, coeff, dst, float(sign), _is_uniform(dst)))


def stencil_derivative(values, central, left, h, dirichlet=False, backend=None):
    values = np.ascontiguousarray(values, dtype=complex)
    central = np.ascontiguousarray(central, dtype=float)
    left = np.ascontiguousarray(left, dtype=float)
    if values.size < max(central.size, left.shape[1]):
        raise ValueError("grid has fewer points than the stencil width")
    impl = _select(backend)
    return np.asarray(impl.stencil_derivative(values, central, left, float(h), bool(dirichlet)))


def _select(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _kernels_py
    if backend == "compiled":
        if _ext is None:
            raise RuntimeError("compiled kernels are not available")
        return _ext
    raise ValueError(f"unknown backend {backend!r}")
