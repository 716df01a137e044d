"""Compare the compiled and numpy statevector kernels.

Usage: python benchmarks/bench_kernels.py [--qubits 14] [--repeat 20]

Times each kernel on a random state, then a full workload of swap-test
estimates with each implementation selected via QKMEANS_PURE_PYTHON.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from qkmeans.qsim import kernels

WORKLOAD = """
import numpy as np
from qkmeans.dist import EstimatorConfig, estimate_many
from qkmeans.embed import VectorPair
rng = np.random.default_rng(0)
pairs = [VectorPair(*rng.normal(size=(2, 16))) for _ in range(300)]
pairs += [VectorPair(*rng.normal(size=(2, 8))) for _ in range(300)]
"""
STMT = ("estimate_many(pairs, EstimatorConfig()); "
        "estimate_many(pairs, EstimatorConfig(embedding='angle'))")


def kernel_table(n: int, repeat: int) -> list[tuple[str, float, float]]:
    rng = np.random.default_rng(1)
    state = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    state /= np.linalg.norm(state)
    h = 1 / np.sqrt(2)
    perm = np.array([1, 0, *range(2, n)], dtype=np.int64)
    qubits = np.array([0, 1, 2], dtype=np.int64)
    amps = np.full(8, 1 / np.sqrt(8), dtype=complex)
    zero = np.zeros(1 << n, dtype=complex)
    zero[0] = 1
    cases = {
        "apply_1q": lambda m: m.apply_1q(state.copy(), n, n // 2, h, h, h, -h),
        "apply_cswap": lambda m: m.apply_cswap(state.copy(), n, 0, 1, n - 1),
        "apply_init": lambda m: m.apply_init(zero.copy(), n, qubits, amps),
        "prob_one": lambda m: m.prob_one(state, n, n - 1),
        "swap_overlap": lambda m: m.swap_overlap(state, n, perm),
    }
    rows = []
    for name, fn in cases.items():
        py = min(timeit.repeat(lambda: fn(kernels.python), number=1, repeat=repeat))
        cy = (min(timeit.repeat(lambda: fn(kernels.compiled), number=1, repeat=repeat))
              if kernels.compiled is not None else float("nan"))
        rows.append((name, py, cy))
    return rows


def workload_time(pure: bool) -> float:
    env = dict(os.environ)
    if pure:
        env["QKMEANS_PURE_PYTHON"] = "1"
    else:
        env.pop("QKMEANS_PURE_PYTHON", None)
    code = (f"import timeit\n{WORKLOAD}\n"
            f"print(min(timeit.repeat({STMT!r}, globals=globals(), number=1, repeat=3)))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    return float(out.stdout.strip())


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, default=14)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    print(f"active backend: {kernels.BACKEND}")
    print(f"\nkernels on a {args.qubits}-qubit state (best of {args.repeat}, ms)")
    print(f"{'kernel':<14}{'numpy':>10}{'cython':>10}{'speedup':>10}")
    for name, py, cy in kernel_table(args.qubits, args.repeat):
        print(f"{name:<14}{py * 1e3:>10.3f}{cy * 1e3:>10.3f}{py / cy:>10.2f}")

    print("\n1200 analytic swap-test estimates (s)")
    py = workload_time(pure=True)
    print(f"numpy   {py:.3f}")
    if kernels.compiled is not None:
        cy = workload_time(pure=False)
        print(f"cython  {cy:.3f}  ({py / cy:.2f}x)")


if __name__ == "__main__":
    main()
