"""Compare the numba and pure-numpy kernel backends.

    python benchmarks/bench_backends.py [--repeat 3] [--size 60] [--depth 6]

Each workload runs under both values of HIGHER_AR_BACKEND in the same
process.  Results are checked for equality before timings are reported.
"""

import argparse
import os
import time

import numpy as np

from higher_ar import _kernels
from higher_ar.classify import classify
from higher_ar.exact_linalg import Matrix, rref
from higher_ar.quiver_core import compute_basis, load_algebra

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "higher_ar", "data")


def _rref_workload(size: int, count: int = 8, seed: int = 0):
    rng = np.random.default_rng(seed)
    mats = [rng.integers(-5, 6, size=(size, size + 7)).astype(np.int64) for _ in range(count)]

    def run():
        out = []
        for A in mats:
            R, piv = rref(Matrix(A))
            out.append((R.tolist(), tuple(piv)))
        return out

    return run


def _trajectory_workload(depth: int):
    def run():
        # a fresh basis each time, so no memoised resolutions carry over
        b = compute_basis(load_algebra(os.path.join(DATA, "beilinson2.alg")))
        v = classify(b, 2, depth)
        return [t.dim_vectors for t in v.trajectories]

    return run


def _time(fn, repeat: int):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench(name: str, fn, repeat: int) -> None:
    timings, results = {}, {}
    for backend in ("numba", "numpy"):
        os.environ["HIGHER_AR_BACKEND"] = backend
        fn()  # warm up (jit compilation for numba)
        timings[backend], results[backend] = _time(fn, repeat)
    os.environ.pop("HIGHER_AR_BACKEND", None)
    same = results["numba"] == results["numpy"]
    speedup = timings["numpy"] / timings["numba"] if timings["numba"] else float("nan")
    print(f"{name:<28} numba {timings['numba']:8.3f}s  numpy {timings['numpy']:8.3f}s  "
          f"speedup {speedup:5.2f}x  identical={same}")
    if not same:
        raise SystemExit(f"{name}: backends disagree")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--size", type=int, default=60)
    parser.add_argument("--depth", type=int, default=6)
    args = parser.parse_args()
    if not _kernels._HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    # small matrices stay inside int64; large ones overflow and fall back to numpy
    bench("rref 10x17 (x400)", _rref_workload(10, 400), args.repeat)
    bench(f"rref {args.size}x{args.size + 7} (x8)", _rref_workload(args.size), args.repeat)
    bench(f"Beilinson classify depth {args.depth}", _trajectory_workload(args.depth), args.repeat)


if __name__ == "__main__":
    main()
