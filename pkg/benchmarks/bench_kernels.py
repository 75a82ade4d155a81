"""Benchmark the jitted configuration kernels against the pure-Python path.

Run twice to compare:

    python benchmarks/bench_kernels.py
    TASEP2_NO_NUMBA=1 python benchmarks/bench_kernels.py

The numbers cover sector enumeration, generator assembly, and translation
orbit construction, which are the only interpreter-bound loops in the
package (eigen-solves are LAPACK/ARPACK either way).
"""

import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from tasep2 import _kernels  # noqa: E402


def timeit(fn, *args, repeat=3):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    mode = "numba" if _kernels.USE_NUMBA else "python"
    print(f"kernel path: {mode}")
    cases = [(9, 3, 3), (12, 4, 4), (13, 5, 4)]
    for length, n_a, n_b in cases:
        t_enum, packs = timeit(_kernels.enumerate_packed, length, n_a, n_b)
        t_asm, _ = timeit(_kernels.assemble_moves, length, packs, 1.0, 0.0)
        t_orb, _ = timeit(_kernels.orbit_table, length, packs)
        print(f"L={length:2d} sector ({n_a},{n_b}) dim={len(packs):6d}  "
              f"enumerate {t_enum*1e3:8.2f} ms  assemble {t_asm*1e3:8.2f} ms  "
              f"orbits {t_orb*1e3:8.2f} ms")


if __name__ == "__main__":
    main()
