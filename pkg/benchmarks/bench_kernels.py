"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 20]

Both paths are imported explicitly, so the FAPARETO_DISABLE_NUMBA flag does
not matter here.
"""

import argparse
import time

import numpy as np

from fapareto import _kernels as K


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    cases = []
    for n in (100, 200, 500):
        F = np.round(rng.random((n, 2)), 2)
        cases.append((f"dominance ranks n={n}", lambda F=F: K.dominance_ranks_nb(F), lambda F=F: K.dominance_ranks_np(F)))
    for n in (30, 1000):
        P = rng.random((n, 2))
        cases.append((f"hv sweep n={n}", lambda P=P: K.hv2d_nb(P, 1.0, 1.0), lambda P=P: K.hv2d_np(P, 1.0, 1.0)))
    P, S = rng.random((30, 2)), rng.random((1_000_000, 2))
    cases.append(("MC count 30 pts x 1e6", lambda: K.count_dominated_nb(P, S), lambda: K.count_dominated_np(P, S)))

    print(f"{'kernel':<26}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, nb_fn, np_fn in cases:
        nb_fn()  # compile
        repeat = max(1, args.repeat // 10) if "MC" in name else args.repeat
        t_nb, t_np = best_of(nb_fn, repeat), best_of(np_fn, repeat)
        print(f"{name:<26}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
