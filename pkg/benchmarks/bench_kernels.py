"""Time the clustering kernels on both backends.

Run from the repo root:  python3 benchmarks/bench_kernels.py [n] [k] [reps]
"""

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fuzzydeck import _kernels  # noqa: E402


def one_pass(x, v, m):
    u = _kernels.membership_matrix(x, v, m)
    num, den = _kernels.center_sums(x, u, m)
    obj = _kernels.objective_value(x, u, v, m)
    return num / den, obj


def bench(backend: str, x, v, m, reps: int) -> tuple[float, float]:
    _kernels.set_backend(backend)
    one_pass(x, v, m)  # warm-up (includes JIT compile for numba)
    start = time.perf_counter()
    for _ in range(reps):
        centers, obj = one_pass(x, v, m)
    elapsed = (time.perf_counter() - start) / reps
    return elapsed, obj


def main() -> None:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    k = int(sys.argv[2]) if len(sys.argv) > 2 else 7
    reps = int(sys.argv[3]) if len(sys.argv) > 3 else 20
    m = 2.0

    rng = np.random.default_rng(0)
    x = np.sort(rng.uniform(0, 1, n))
    v = np.linspace(0, 1, k + 2)[1:-1].copy()

    print(f"n={n} k={k} m={m} reps={reps}")
    results = {}
    for backend in ("numpy", "numba"):
        try:
            elapsed, obj = bench(backend, x, v, m, reps)
        except ValueError as exc:
            print(f"{backend:>6}: skipped ({exc})")
            continue
        results[backend] = (elapsed, obj)
        print(f"{backend:>6}: {elapsed * 1e3:8.2f} ms/pass   J={obj:.6f}")
    if len(results) == 2:
        ratio = results["numpy"][0] / results["numba"][0]
        print(f"speedup (numpy/numba): {ratio:.2f}x")
        assert abs(results["numpy"][1] - results["numba"][1]) < 1e-9


if __name__ == "__main__":
    main()
