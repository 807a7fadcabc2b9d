"""Timing comparison of the numba kernels against the pure-numpy fallback.

Usage:
    python3 benchmarks/compare_backends.py [--size 128] [--repeats 5]

Reports per-kernel wall time for both backends on identical inputs and
verifies that the results agree before trusting the timings.
"""

import argparse
import time

import numpy as np

from sparsepaint import kernels_numpy

try:
    from sparsepaint import kernels_numba
except ImportError:
    kernels_numba = None


def _time(fn, repeats):
    fn()  # warm up (JIT compile, caches)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=128)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--density", type=float, default=0.05)
    args = ap.parse_args()

    if kernels_numba is None:
        ap.error("numba backend unavailable; nothing to compare")

    n = args.size
    rng = np.random.default_rng(0)
    f = rng.random((n, n)) * 255
    known = rng.random((n, n)) < args.density
    known[0, 0] = True
    c = known.astype(np.float64)
    field = rng.random((n, n)) * 0.3
    u = rng.random((n, n)) * 255

    cases = [
        ("laplacian", lambda k: k.laplacian(f)),
        ("residual", lambda k: k.residual(u, f, c)),
        ("cg_inpaint tol=1e-6", lambda k: k.cg_inpaint(f, known, 1e-6, 10 * n * n)),
        ("jacobi_inpaint tol=1e-4", lambda k: k.jacobi_inpaint(f, c, 1e-4, 10 * n * n)),
        ("floyd_steinberg", lambda k: k.floyd_steinberg(field)),
    ]

    print(f"grid {n}x{n}, density {args.density}, best of {args.repeats}")
    print(f"{'kernel':<24}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for name, call in cases:
        r_np = call(kernels_numpy)
        r_nb = call(kernels_numba)
        a = r_np[0] if isinstance(r_np, tuple) else r_np
        b = r_nb[0] if isinstance(r_nb, tuple) else r_nb
        if a.dtype == np.bool_:
            assert np.array_equal(a, b), f"{name}: backend mismatch"
        else:
            assert np.allclose(a, b, atol=1e-9), f"{name}: backend mismatch"
        t_np = _time(lambda: call(kernels_numpy), args.repeats)
        t_nb = _time(lambda: call(kernels_numba), args.repeats)
        print(f"{name:<24}{t_np * 1e3:>10.2f}ms{t_nb * 1e3:>10.2f}ms{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
