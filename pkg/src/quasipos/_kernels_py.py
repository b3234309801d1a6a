"""NumPy implementations of the compiled kernels (import fallback)."""

import numpy as np

_CHUNK = 1 << 21


def fourier_sum(src, coeff, dst, sign, uniform_dst):
    src = np.asarray(src, dtype=float)
    coeff = np.asarray(coeff, dtype=complex)
    dst = np.asarray(dst, dtype=float)
    out = np.empty(dst.size, dtype=complex)
    rows = max(1, _CHUNK // max(src.size, 1))
    for start in range(0, dst.size, rows):
        block = dst[start:start + rows]
        out[start:start + rows] = np.exp((1j * sign) * np.outer(block, src)) @ coeff
    return out


def stencil_derivative(values, central, left, h, dirichlet):
    values = np.asarray(values, dtype=complex)
    central = np.asarray(central)
    left = np.asarray(left)
    n = values.size
    w = central.size
    r = (w - 1) // 2
    padded = np.concatenate([np.zeros(r, complex), values, np.zeros(r, complex)])
    out = np.zeros(n, dtype=complex)
    for k in range(w):
        out += central[k] * padded[k:k + n]
    if not dirichlet:
        m = min(r, n)
        wl = left.shape[1]
        out[:m] = left[:m] @ values[:wl]
        out[n - m:] = (-(left[:m] @ values[::-1][:wl]))[::-1]
    return out / h
