"""Times the limit-set enumeration kernels (compiled vs pure Python) on one
workload and verifies the two clouds are bit-identical.

Usage: python benchmarks/bench_limitset.py [--traces 3,3,3] [--eps 2e-4]
"""

import argparse
import time

import numpy as np

from kleinnet import limitset

try:
    import kleinnet._kernel  # noqa: F401

    HAVE_C = True
except ImportError:
    HAVE_C = False


def parse_complex(token: str) -> complex:
    return complex(token.strip().replace("i", "j").replace("I", "j"))


def best_time(spec, eps, backend, repeats):
    cloud = None
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        cloud = limitset.enumerate_limit_set(spec, epsilon=eps, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, cloud


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--traces", default="3,3,3")
    parser.add_argument("--eps", type=float, default=2e-4)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    values = [parse_complex(p) for p in args.traces.split(",")]
    if len(values) == 2:
        spec = limitset.GroupSpec.from_traces(values[0], values[1])
    else:
        spec = limitset.GroupSpec.from_traces(*values[:3])

    py_time, py_cloud = best_time(spec, args.eps, "py", args.repeats)
    print(f"points: {len(py_cloud)}  (eps {args.eps:g})")
    print(f"python kernel: {py_time * 1000:9.2f} ms")

    if not HAVE_C:
        print("compiled kernel: not built (pip install -e . compiles it)")
        return 0

    c_time, c_cloud = best_time(spec, args.eps, "c", args.repeats)
    print(f"cython kernel: {c_time * 1000:9.2f} ms")
    identical = np.array_equal(py_cloud.values, c_cloud.values) and np.array_equal(
        py_cloud.charts, c_cloud.charts
    )
    print(f"clouds bit-identical: {identical}")
    print(f"speedup: {py_time / c_time:.1f}x")
    return 0 if identical else 1


if __name__ == "__main__":
    raise SystemExit(main())
