#!/usr/bin/env python3
"""Benchmark the compiled PSOR kernels against the numpy fallback.

Runs the same obstacle solve with both backends and reports sweep
throughput and end-to-end solve time. The iterates are identical, so
the check column must print 0.
"""

import argparse
import time

import numpy as np

from heleshaw._kernels import _compiled, numpy_backend
from heleshaw.grid import build_grid, ball_mask
from heleshaw.media import MediaSpec, sample_media
from heleshaw.obstacle import assemble, _color_masks


def solve_with(kern, prob, omega, sweeps):
    w = np.zeros(prob.shape)
    w[prob.pinned] = prob.pinned_values[prob.pinned]
    red, black = _color_masks(prob.free)
    h2 = prob.h * prob.h
    b = h2 * prob.f
    t0 = time.perf_counter()
    for _ in range(sweeps):
        kern.psor_halfsweep(w, b, red, omega, True)
        kern.psor_halfsweep(w, b, black, omega, True)
    elapsed = time.perf_counter() - t0
    return w, elapsed


def bench(n, N, extent, t, sweeps, omega=1.8):
    grid = build_grid(n, extent, N)
    core = ball_mask(grid, np.zeros(n), 1.0)
    init = ball_mask(grid, np.zeros(n), 1.5)
    med = sample_media(MediaSpec("checkerboard-iid", 1.0, 2.0, cell=0.5, seed=3), grid)
    prob = assemble(grid, core, init, med, t)

    backends = [("numpy", numpy_backend)]
    if _compiled is not None:
        backends.append(("cython", _compiled))
    results = {}
    for name, kern in backends:
        w, elapsed = solve_with(kern, prob, omega, sweeps)
        per_sweep = elapsed / sweeps * 1e3
        nodes = w.size
        results[name] = (w, elapsed, per_sweep, sweeps * nodes / elapsed / 1e6)
    print(f"\n{n}D grid {N}^{n} ({grid.num_nodes} nodes), {sweeps} sweeps:")
    for name, (_, elapsed, per_sweep, mnps) in results.items():
        print(f"  {name:7s}: {elapsed:8.3f} s total, {per_sweep:8.3f} ms/sweep, {mnps:8.1f} Mnode-updates/s")
    if len(results) == 2:
        dif = float(np.abs(results["numpy"][0] - results["cython"][0]).max())
        speedup = results["numpy"][1] / results["cython"][1]
        print(f"  speedup: {speedup:.2f}x, max |numpy - cython| = {dif:g}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sweeps", type=int, default=200)
    args = ap.parse_args()
    if _compiled is None:
        print("note: compiled backend unavailable; benchmarking numpy only")
    bench(2, 193, 10.0, 5.0, args.sweeps)
    bench(3, 97, 6.0, 3.0, args.sweeps)


if __name__ == "__main__":
    main()
