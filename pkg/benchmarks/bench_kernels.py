#!/usr/bin/env python3
"""Benchmark the pure (numpy) kernel backend against the compiled one.

Times the three hot paths on representative workloads plus an end-to-end
keypoint sampling run, and prints a fixed-width comparison. Run with:

    python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import os
import sys
import time

import numpy as np


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_workloads(backend):
    rng = np.random.default_rng(0)
    pts = rng.random((600, 2))
    tris = rng.integers(0, 600, size=(1200, 3)).astype(np.int64)
    queries = rng.random((520, 2))
    verts = rng.random((43867, 2))
    residuals = rng.normal(0, 30, size=520 * 3 * 256)
    c = 15.0 - 15.0 * np.log(6.0)
    return {
        "incircle_dets (1200 tris x 600 pts)": lambda: [
            backend.incircle_dets(pts, tris, p[0], p[1]) for p in pts],
        "nearest_vertices (520 q x 43867 v)": lambda:
            backend.nearest_vertices(queries, verts),
        "wing_values (400k residuals)": lambda:
            backend.wing_values(residuals, 15.0, 3.0, c),
        "wing_grads (400k residuals)": lambda:
            backend.wing_grads(residuals, 15.0, 3.0),
    }


def sampling_run():
    from densemark.sampler import SamplerConfig, run_sampling
    from densemark.template import reference_landmarks68, reference_template

    mesh = reference_template()
    table = reference_landmarks68()
    run_sampling(mesh, table, SamplerConfig())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    from densemark import kernels

    backends = kernels.available_backends()
    if "fast" not in backends:
        print("note: compiled backend unavailable; timing pure only")

    rows = []
    impls = {name: kernels.get_backend(name) for name in backends}
    names = list(kernel_workloads(impls[backends[0]]))
    for label in names:
        row = {"workload": label}
        for bname, impl in impls.items():
            work = kernel_workloads(impl)[label]
            work()  # warm up
            row[bname] = best_of(work, args.repeats)
        rows.append(row)

    # end-to-end sampling per backend goes through the env switch:
    # re-exec would be heavy, so only time it under the active backend
    sampling_run()
    rows.append({"workload": f"run_sampling [{kernels.BACKEND} backend]",
                 kernels.BACKEND: best_of(sampling_run, args.repeats)})

    width = max(len(r["workload"]) for r in rows) + 2
    header = "workload".ljust(width) + "".join(
        b.rjust(12) for b in backends) + "     speedup"
    print(header)
    print("-" * len(header))
    for row in rows:
        line = row["workload"].ljust(width)
        for b in backends:
            line += (f"{row[b] * 1e3:9.2f} ms" if b in row
                     else "          --")
        if len(backends) == 2 and all(b in row for b in backends):
            line += f"{row['pure'] / row['fast']:10.1f}x"
        print(line)


if __name__ == "__main__":
    sys.exit(main())
