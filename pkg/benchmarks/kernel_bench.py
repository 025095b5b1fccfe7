#!/usr/bin/env python3
"""Benchmark the SLIC assignment kernels (compiled extension vs numpy
fallback) and assert their outputs are bit-identical.

Usage: python benchmarks/kernel_bench.py [--size 256] [--k 100] [--repeats 5]
"""

import argparse
import time

import numpy as np

from evoxplain import RasterImage, slic
from evoxplain.slic import _backend


def run_once(img, k, assign_fn, repeats):
    """Segment `repeats` times with the given kernel; return (labels, ns, best_s)."""
    original = slic.assign_step
    slic.assign_step = assign_fn
    try:
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            spmap = slic.segment(img, slic.SlicParams(k=k))
            best = min(best, time.perf_counter() - t0)
        return spmap.labels, spmap.ns, best
    finally:
        slic.assign_step = original


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=256, help="square image side")
    parser.add_argument("--k", type=int, default=100, help="requested superpixels")
    parser.add_argument("--repeats", type=int, default=5, help="timed repeats (min taken)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    # smooth noise so the segmentation has actual structure to follow
    coarse = rng.integers(0, 256, size=(args.size // 8 + 1, args.size // 8 + 1, 3))
    idx = np.arange(args.size) // 8
    img = RasterImage(coarse[idx[:, None], idx[None, :]].astype(np.uint8))

    kernels = _backend.get_kernels()
    print(f"active backend: {_backend.BACKEND}; "
          f"available kernels: {', '.join(sorted(kernels))}")
    print(f"image {args.size}x{args.size}, k={args.k}, best of {args.repeats}\n")

    results = {}
    for name in sorted(kernels):
        labels, ns, best = run_once(img, args.k, kernels[name], args.repeats)
        results[name] = (labels, ns, best)
        print(f"  {name:8s} {best * 1e3:8.1f} ms   ns={ns}")

    if len(results) == 2:
        (la, na, ta), (lb, nb, tb) = results["cython"], results["numpy"]
        assert na == nb and (la == lb).all(), "kernel outputs differ!"
        print(f"\noutputs bit-identical; cython speedup: {tb / ta:.2f}x")
    else:
        print("\ncompiled extension not available; nothing to compare")


if __name__ == "__main__":
    main()
