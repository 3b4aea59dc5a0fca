"""Compare the compiled and numpy kernels on the thinning/folding hot loop.

    python benchmarks/bench_kernels.py [--events 2000000] [--repeat 5]
"""
import argparse
import time

import numpy as np

from ionphase import _backend
from ionphase.heterodyne import HeterodyneConfig, simulate_histogram


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--events", type=int, default=2_000_000, help="thinning candidates")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = ["python"] + (["cython"] if _backend.BACKEND == "cython" else [])
    rng = np.random.default_rng(0)
    times = rng.random(args.events) * 10.0
    uniforms = rng.random(args.events)
    thin = (2 * np.pi * 400e6, 0.3, 0.5, 0.0, 1e-7)
    cfg = HeterodyneConfig()  # one default acquisition, ~7.5e5 candidates

    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b in backends))
    rows = {
        "thin_fold": lambda k: k.thin_fold(times, uniforms, *thin, 1000, np.zeros(1000, np.int64)),
        "thin_mask": lambda k: k.thin_mask(times, uniforms, *thin),
        "fold_counts": lambda k: k.fold_counts(times, 1e-7, 1000, np.zeros(1000, np.int64)),
    }
    for name, fn in rows.items():
        cells = []
        for b in backends:
            k = _backend.get_kernels(b)
            cells.append(best_of(lambda: fn(k), args.repeat) / args.events * 1e9)
        print(f"{name + ' [ns/event]':<22}" + "".join(f"{c:>12.1f}" for c in cells))
    cells = [best_of(lambda: simulate_histogram(cfg, 0.3, 1, backend=b), args.repeat) * 1e3 for b in backends]
    print(f"{'acquisition [ms]':<22}" + "".join(f"{c:>12.1f}" for c in cells))


if __name__ == "__main__":
    main()
