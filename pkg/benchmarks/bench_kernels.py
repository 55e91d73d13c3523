"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from weisslab import _kernels_py

try:
    from weisslab import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def cases(rng):
    edges = np.linspace(-0.5, 1.5, 2049)
    mid = 0.5 * (edges[1:] + edges[:-1])
    z = rng.uniform(0, 0.999, 64) * np.exp(2j * np.pi * rng.uniform(size=64))
    w = rng.uniform(0.1, 1, 64)
    gz = rng.uniform(0, 0.99, 20000) * np.exp(2j * np.pi * rng.uniform(size=20000))
    gv = rng.uniform(size=20000)
    rho = np.full(20000, 5e-3)
    ga = rng.uniform(0, 0.9, 64) * np.exp(2j * np.pi * rng.uniform(size=64))
    wz = rng.uniform(-1, 2, 4000) + 1j * rng.uniform(1e-3, 2, 4000)
    jumps = rng.standard_normal(edges.size)
    return {
        "riesz_cell_matrix 2048x2048": ("riesz_cell_matrix", (mid, edges, 0.25)),
        "power_gram 64 atoms, N=4096": ("power_gram", (z, w, -0.5, 4096)),
        "green_potential 20000 cells x 64": ("green_potential", (gz, gv, rho, ga)),
        "witness_sum 4000 x 2049": ("witness_sum", (wz, edges, jumps, 0.25)),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':36s} {'python [s]':>11s} {'compiled [s]':>13s} {'speedup':>8s}")
    for label, (fname, fargs) in cases(rng).items():
        py = min(timeit.repeat(lambda: getattr(_kernels_py, fname)(*fargs), number=1, repeat=args.repeat))
        if _compiled is None:
            print(f"{label:36s} {py:11.4f} {'n/a':>13s} {'n/a':>8s}")
            continue
        cy = min(timeit.repeat(lambda: getattr(_compiled, fname)(*fargs), number=1, repeat=args.repeat))
        print(f"{label:36s} {py:11.4f} {cy:13.4f} {py / cy:8.2f}")


if __name__ == "__main__":
    main()
