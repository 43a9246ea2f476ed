#!/usr/bin/env python3
"""Benchmark: compiled BDD kernel vs the pure-Python fallback.

Two workloads over a 150-BE random static tree:

  grid     voting gates with cross-block sharing; mid-size BDD, stresses
           the apply/minsol recursions and the vectorised curve pass
  layered  block-structured tree; small BDD, dominated by cut set
           enumeration (kernel-independent output cost shows up here)

    python bench/compare_kernels.py [--model grid|layered] [--bes 150]
                                    [--points 10000] [--seed 7]
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from ftakit.analysis import unreliability_curve
from ftakit.bdd import HAVE_COMPILED_KERNEL
from ftakit.ordering import dfs_order
from ftakit.translate import translate

from oracles import random_layered_sft, voting_grid_sft


def run_once(ft, order, times, kernel):
    timings = {}
    t0 = time.perf_counter()
    result = translate(ft, order=order, kernel=kernel)
    timings["translate"] = time.perf_counter() - t0
    manager = result.manager
    nodes = manager.internal_node_count(result.root)

    t0 = time.perf_counter()
    minimal = manager.minsol(result.root)
    timings["minsol"] = time.perf_counter() - t0
    minsol_nodes = manager.internal_node_count(minimal)

    t0 = time.perf_counter()
    curve = unreliability_curve(result.root, ft.distributions, times)
    timings["curve"] = time.perf_counter() - t0
    return timings, nodes, minsol_nodes, float(curve.values.sum())


def main() -> int:
    parser = argparse.ArgumentParser(
        description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--model", choices=["grid", "layered"], default="grid")
    parser.add_argument("--bes", type=int, default=150)
    parser.add_argument("--points", type=int, default=10_000)
    parser.add_argument("--horizon", type=float, default=10.0)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    if args.model == "grid":
        ft = voting_grid_sft(rng, args.bes)
    else:
        ft = random_layered_sft(rng, args.bes)
    order = dfs_order(ft)
    times = np.linspace(args.horizon / args.points, args.horizon, args.points)
    print(f"model '{args.model}': {args.bes} BEs, {len(ft.gates)} gates; "
          f"{args.points} time points on (0, {args.horizon}]")

    kernels = ["python"] + (["compiled"] if HAVE_COMPILED_KERNEL else [])
    if not HAVE_COMPILED_KERNEL:
        print("note: compiled kernel not built; showing pure Python only")

    results = {}
    for kernel in kernels:
        timings, nodes, minsol_nodes, checksum = run_once(ft, order, times, kernel)
        results[kernel] = (timings, checksum)
        print(f"\n[{kernel}] BDD nodes: {nodes}, minimal-solution BDD nodes: "
              f"{minsol_nodes}")
        for step, seconds in timings.items():
            print(f"  {step:<10} {seconds * 1000:10.1f} ms")

    if len(results) == 2:
        py, cy = results["python"], results["compiled"]
        assert py[1] == cy[1], "kernels disagree on the curve checksum"
        print("\nspeedup (python / compiled):")
        for step in py[0]:
            ratio = py[0][step] / max(cy[0][step], 1e-9)
            print(f"  {step:<10} {ratio:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
