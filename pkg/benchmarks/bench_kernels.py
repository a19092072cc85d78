#!/usr/bin/env python3
"""Benchmark the compiled jet kernels against the pure-numpy fallback.

The kernels dominate sketching cost (k batched truncated-series products
and gate recurrences per circuit node), so this is the speed story of the
whole package.  Run:

    python3 benchmarks/bench_kernels.py [--batch 8192] [--repeats 5]
"""

import argparse
import time

import numpy as np
import scipy.special

from jetsketch._kernels import py_backend

try:
    from jetsketch._kernels import _jetcore
except ImportError:
    _jetcore = None


def bench(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def series_inputs(rng, batch, width, center):
    u = rng.standard_normal((batch, width)) + 1j * rng.standard_normal(
        (batch, width)
    )
    u[:, 0] = center
    return np.ascontiguousarray(u)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--batch", type=int, default=8192)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--orders", type=int, nargs="+", default=[3, 7, 15, 31])
    args = parser.parse_args()

    rng = np.random.default_rng(1)
    if _jetcore is None:
        print("compiled backend unavailable; showing python backend only")

    header = f"{'kernel':<12} {'s':>3} {'python':>12} {'compiled':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for width in [s + 1 for s in args.orders]:
        a = series_inputs(rng, args.batch, width, 2.0)
        b = series_inputs(rng, args.batch, width, 1.5)
        v0 = {
            "mul_trunc": None,
            "exp_series": np.exp(a[:, 0]),
            "log_series": np.log(a[:, 0]),
            "reciprocal_series": 1.0 / a[:, 0],
            "sqrt_series": np.sqrt(a[:, 0]),
            "tanh_series": np.tanh(a[:, 0]),
        }
        erf_v0 = scipy.special.erf(a[:, 0])
        erf_g0 = np.exp(-a[:, 0] ** 2)
        cases = [
            ("mul_trunc", (a, b)),
            ("exp_series", (a, v0["exp_series"])),
            ("log_series", (a, v0["log_series"])),
            ("tanh_series", (a, v0["tanh_series"])),
            ("erf_series", (a, erf_v0, erf_g0)),
        ]
        for name, call_args in cases:
            t_py = bench(getattr(py_backend, name), call_args, args.repeats)
            if _jetcore is not None:
                t_c = bench(getattr(_jetcore, name), call_args, args.repeats)
                print(
                    f"{name:<12} {width - 1:>3} {t_py * 1e3:>10.2f}ms"
                    f" {t_c * 1e3:>10.2f}ms {t_py / t_c:>7.1f}x"
                )
            else:
                print(f"{name:<12} {width - 1:>3} {t_py * 1e3:>10.2f}ms")
    print(
        f"\nbatch={args.batch}; times are best of {args.repeats}."
        " Force a backend at import with JETSKETCH_BACKEND=python|compiled."
    )


if __name__ == "__main__":
    main()
