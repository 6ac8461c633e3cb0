"""Time the numba and numpy versions of every accelerated kernel.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both versions are imported directly, so the environment flag does not
matter here. The numba column excludes compilation (one warm-up call).
"""
import argparse
import math
import time

import numpy as np

from entangler import _accel, dynamics, kernels, oracle


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    gen = -1j * dynamics.conditional_matrix(0.01)
    c0 = np.eye(6, dtype=complex)[0]
    tau = np.linspace(0, 8 * math.pi, 1000)
    h8 = np.ascontiguousarray(dynamics.build_secular_hamiltonian(1.0), dtype=complex)
    egg = dynamics.basis_state("egg").astype(complex)

    rng = np.random.default_rng(0)
    x = rng.normal(size=(2000, 4, 4)) + 1j * rng.normal(size=(2000, 4, 4))
    rhos = x @ np.conj(np.swapaxes(x, -1, -2))
    rhos /= np.trace(rhos, axis1=1, axis2=2).real[:, None, None]

    yield ("rk4_grid 6x6, 1000 pts to 8pi, h=1e-3",
           lambda: kernels._rk4_grid_numba(gen, c0, tau, 1e-3),
           lambda: kernels._rk4_grid_numpy(gen, c0, tau, 1e-3))
    yield ("flipped_roots, 2000 densities",
           lambda: kernels._flipped_sv_numba(rhos, 1e-12),
           lambda: kernels._flipped_sv_numpy(rhos, 1e-12))
    yield ("oracle rk4 8x8, t=2pi, h=1e-3",
           lambda: oracle._rk4_run_numba(h8, egg, 1e-3, 6283),
           lambda: oracle._rk4_run_numpy(h8, egg, 1e-3, 6283))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _accel.numba is None:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<42}{'numba [ms]':>12}{'numpy [ms]':>12}{'max |diff|':>12}")
    for name, fast, slow in cases():
        a, b = fast(), slow()  # warm-up, also compiles
        t_fast = best_of(fast, args.repeat)
        t_slow = best_of(slow, args.repeat)
        diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        print(f"{name:<42}{1e3 * t_fast:>12.2f}{1e3 * t_slow:>12.2f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
