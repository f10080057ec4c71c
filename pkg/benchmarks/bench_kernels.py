"""Time the numba and numpy kernel paths against each other.

    python3 benchmarks/bench_kernels.py [--trials N] [--repeat R]

Compilation happens once in a warm-up call and is reported separately.
"""

import argparse
import time

import numpy as np

from teleport_sim import _kernels as k

CUMULATIVE = np.array([0.18, 0.36, 0.68, 1.0])


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    n = args.trials

    rng = np.random.default_rng(0)
    message = rng.integers(0, 2, n).astype(np.int8)
    lm = rng.integers(0, 2, (2 * n + 8, 2)).astype(np.int8)

    cases = {
        "sample_outcomes": (
            lambda: k.sample_outcomes_np(1, n, CUMULATIVE),
            (lambda: k.sample_outcomes_nb(1, n, CUMULATIVE)) if k.HAVE_NUMBA else None,
        ),
        "classical_stream": (
            lambda: k.classical_stream_np(message, lm),
            (lambda: k.classical_stream_nb(message, lm)) if k.HAVE_NUMBA else None,
        ),
    }
    print(f"n = {n}, best of {args.repeat}")
    print(f"{'kernel':<18} {'numpy s':>10} {'numba s':>10} {'speedup':>8} {'compile s':>10}")
    for name, (np_fn, nb_fn) in cases.items():
        t_np = best_of(np_fn, args.repeat)
        if nb_fn is None:
            print(f"{name:<18} {t_np:>10.4f} {'-':>10} {'-':>8} {'-':>10}")
            continue
        t0 = time.perf_counter()
        nb_fn()
        warm = time.perf_counter() - t0
        t_nb = best_of(nb_fn, args.repeat)
        print(f"{name:<18} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x {warm:>10.4f}")


if __name__ == "__main__":
    main()
