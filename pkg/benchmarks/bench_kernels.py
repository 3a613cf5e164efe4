"""Time the numba and numpy backends of the F_p kernels on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat N] [--seed S]

JIT compilation is excluded: each kernel runs once before timing.
"""
import argparse
import time

import numpy as np

from gdbialg import kernels


def workloads(rng):
    p = 7
    yield "rref 160x160 mod 7", "rref_mod_p", (rng.integers(0, p, (160, 160)), p)
    p, n = 3, 8
    ops = rng.integers(0, p, (2, n, n))
    yield f"first_proper_closure n={n} mod {p} (full scan)", "first_proper_closure", (ops, n, p)
    p, n = 5, 24
    T = rng.integers(0, p, (n, n, n))
    yield f"compose {n}^3 tensors mod {p}", "compose_mod_p", (T, T, p)


def best_time(fn, args, backend, repeat):
    fn(*args, backend=backend)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':48s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for label, name, inputs in workloads(rng):
        fn = getattr(kernels, name)
        times = {b: best_time(fn, inputs, b, args.repeat) for b in backends}
        row = f"{label:48s}" + "".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
        if "numba" in times and "numpy" in times:
            row += f"{times['numpy'] / times['numba']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
