#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs every hot kernel on realistic working sizes (a 425x270 card frame)
under both backends and prints a comparison table. The numba side is
warmed before timing so compilation cost is excluded.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from docid.kernels import get_backend, numpy_impl


def time_call(fn, *args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def build_cases():
    rng = np.random.default_rng(99)
    img = rng.random((270, 425))
    dog = rng.standard_normal((5, 270, 425)) * 0.04
    kernel = numpy_impl.gaussian_kernel(1.6)
    sample = rng.random((300, 128))
    source = rng.random((400, 128))
    theta = 0.8
    return [
        ("gaussian_blur 425x270 s=1.6", "gaussian_blur", (img, kernel)),
        ("resize_bilinear 850x540->425x270", "resize_bilinear",
         (rng.random((540, 850)), 270, 425)),
        ("extrema_mask 5x270x425", "extrema_mask", (dog, 0.005, 5)),
        ("orientation_histogram r=12", "orientation_histogram",
         (img, 212, 135, 12, -0.02)),
        ("descriptor_histogram r=17", "descriptor_histogram",
         (img, 212, 135, np.cos(theta), np.sin(theta),
          np.rad2deg(theta), 4.8, 17)),
        ("match_count 300x400 desc", "match_count", (sample, source, 0.75)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = {"numpy": get_backend("numpy")}
    try:
        nb = get_backend("numba")
        nb.warmup()
        backends["numba"] = nb
    except ImportError:
        print("numba unavailable; timing the numpy path only")

    cases = build_cases()
    width = max(len(label) for label, _, _ in cases)
    header = f"{'kernel':<{width}}  " + "".join(f"{n:>12}" for n in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, name, call_args in cases:
        times = {}
        for bname, mod in backends.items():
            times[bname] = time_call(getattr(mod, name), *call_args,
                                     repeats=args.repeats)
        row = f"{label:<{width}}  " + "".join(
            f"{times[n] * 1e3:>10.2f}ms" for n in backends)
        if len(times) == 2:
            row += f"{times['numpy'] / times['numba']:>9.1f}x"
        print(row)

    # sanity: both paths agree on a match count
    if len(backends) == 2:
        s, src = cases[-1][2][0], cases[-1][2][1]
        a = backends["numpy"].match_count(s, src, 0.75)
        b = backends["numba"].match_count(s, src, 0.75)
        assert a == b, f"backend disagreement: {a} vs {b}"
        print(f"\nbackends agree (match_count={a})")


if __name__ == "__main__":
    main()
