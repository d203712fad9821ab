"""Time the compiled and pure-Python kernels on the same inputs.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--resolution 4096] [--depth 10]

Every kernel is run on both backends with identical arguments. The outputs are
compared before timings are reported, so a mismatch aborts the benchmark.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from potatopack import kernels
from potatopack.packing import GasketConfig, generate_gasket


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(resolution: int, depth: int):
    rng = np.random.default_rng(0)
    cells = (rng.random((resolution, resolution)) < 0.5).astype(np.uint8)
    other = (rng.random((resolution, resolution)) < 0.5).astype(np.uint8)
    fam = generate_gasket(GasketConfig(max_depth=depth))
    h = 2.0 / resolution

    def raster(k):
        mask = np.ones((resolution, resolution), dtype=np.uint8)
        kernels.clear_disks(mask, fam.x, fam.y, fam.r, -1.0, -1.0, h, backend=k)
        return mask

    return {
        "face_count": lambda k: k.face_count(cells),
        "shared_face_count": lambda k: k.shared_face_count(cells, other),
        "box_count(b=4)": lambda k: k.box_count(cells, 4),
        f"overlapping_pairs(n={len(fam)})": lambda k: k.overlapping_pairs(fam.x, fam.y, fam.r, 1e-9),
        f"clear_disks(n={len(fam)})": raster,
    }


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--resolution", type=int, default=4096)
    ap.add_argument("--depth", type=int, default=10)
    args = ap.parse_args(argv)
    try:
        fast = kernels.get_backend("cython")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return 1
    slow = kernels.get_backend("python")
    print(f"grid {args.resolution}^2, gasket depth {args.depth}, best of {args.repeat}, "
          f"threads {kernels.thread_count()}")
    print(f"{'kernel':<32}{'cython (s)':>12}{'python (s)':>12}{'speedup':>10}")
    for name, run in cases(args.resolution, args.depth).items():
        if not same(run(fast), run(slow)):
            raise SystemExit(f"{name}: backends disagree")
        tf = best_of(lambda: run(fast), args.repeat)
        ts = best_of(lambda: run(slow), args.repeat)
        print(f"{name:<32}{tf:>12.4f}{ts:>12.4f}{ts / tf:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
