"""Numba vs numpy timings for the truncated-series kernels.

    python benchmarks/bench_kernels.py [--orders 4 8 12 16] [--repeat 200]

Prints a TSV with one row per (kernel, order).  The numba column is absent
when numba is not importable.
"""

import argparse
import timeit

import numpy as np

from focusjet import _accel, sampling


def bench(fn, args, repeat):
    fn(*args)  # warm-up / JIT compile
    return min(timeit.repeat(lambda: fn(*args), number=repeat, repeat=3)) / repeat


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--orders", type=int, nargs="+", default=[4, 8, 12, 16])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    print("kernel\torder\tnumpy_us\tnumba_us\tspeedup")
    for k in args.orders:
        f = sampling.random_jet(k, rng).coeffs
        g = sampling.random_jet(k, rng, min_degree=1).coeffs
        gbar = np.conj(g.T).copy()
        cases = [
            ("mul_trunc", _accel.mul_trunc_numpy, _accel.mul_trunc_numba, (f, g, k)),
            ("compose", _accel.compose_numpy, _accel.compose_numba, (f, g, gbar, k)),
        ]
        for name, np_fn, nb_fn, fargs in cases:
            t_np = bench(np_fn, fargs, args.repeat)
            if nb_fn is None:
                print(f"{name}\t{k}\t{t_np * 1e6:.2f}\t-\t-")
                continue
            t_nb = bench(nb_fn, fargs, args.repeat)
            print(f"{name}\t{k}\t{t_np * 1e6:.2f}\t{t_nb * 1e6:.2f}\t{t_np / t_nb:.1f}x")


if __name__ == "__main__":
    main()
