"""Compiled versus NumPy kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints the best wall time per backend and the speedup.  The compiled
columns are skipped when the extension is not built.
"""

import argparse
import timeit

import numpy as np

from quasipos import kernels
from quasipos.stencils import first_derivative_stencils


def cases():
    rng = np.random.default_rng(1)
    for n in (256, 1024, 4096):
        src = np.linspace(-1.5, 1.5, n)
        coeff = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        dst = np.linspace(-40, 40, 2 * n)
        yield f"fourier_sum n={n}", lambda b, s=src, c=coeff, d=dst: kernels.fourier_sum(
            s, c, d, backend=b)
    central, left = first_derivative_stencils(8)
    for n in (1024, 16384, 262144):
        vals = rng.standard_normal(n) + 0j
        yield f"stencil n={n}", lambda b, v=vals: kernels.stencil_derivative(
            v, central, left, 1e-3, backend=b)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])
    print(f"{'case':<24}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases():
        times = {}
        for b in backends:
            fn(b)
            times[b] = min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat))
        line = f"{name:<24}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
        if "compiled" in times:
            a, c = times["python"], times["compiled"]
            agree = "" if _agree(fn) else "  MISMATCH"
            line += f"{a / c:>9.1f}x{agree}"
        print(line)


def _agree(fn):
    a, b = fn("python"), fn("compiled")
    return np.allclose(a, b, rtol=1e-10, atol=1e-10 * np.max(np.abs(a)))


if __name__ == "__main__":
    main()
