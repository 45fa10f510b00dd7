#!/usr/bin/env python3
"""Time the quadtree velocity evaluation against direct summation.

Scatters particles uniformly in a disk and reports wall time and relative
accuracy for each backend over a range of particle counts.

Usage:
    python scripts/benchmark_tree.py [--sizes 1000,10000,100000] [--theta 0.5]
"""

import argparse
import json
import time

import numpy as np

from vortexlab.kernels import self_velocity
from vortexlab.tree import TreeParams, build_quadtree, tree_velocity


def scatter(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.random(n))
    th = 2.0 * np.pi * rng.random(n)
    return r * np.cos(th), r * np.sin(th), rng.random(n) - 0.5


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--theta", type=float, default=0.5)
    ap.add_argument("--order", type=int, default=4)
    args = ap.parse_args()

    params = TreeParams(opening_angle=args.theta, expansion_order=args.order)
    # JIT warm-up so compile time is excluded from the timings
    px, py, g = scatter(256)
    self_velocity(px, py, g, 0.0)
    tree_velocity(build_quadtree(px, py, g, params), px, py, 0.0, params)

    for n in (int(s) for s in args.sizes.split(",")):
        px, py, g = scatter(n)
        t0 = time.perf_counter()
        ud = self_velocity(px, py, g, 0.0)
        t_direct = time.perf_counter() - t0
        t0 = time.perf_counter()
        tree = build_quadtree(px, py, g, params)
        ut = tree_velocity(tree, px, py, 0.0, params)
        t_tree = time.perf_counter() - t0
        scale = float(np.hypot(*ud).max())
        dev = float(max(np.abs(ut[0] - ud[0]).max(), np.abs(ut[1] - ud[1]).max())) / scale
        print(json.dumps({
            "n": n,
            "t_direct_s": round(t_direct, 4),
            "t_tree_s": round(t_tree, 4),
            "speedup": round(t_direct / t_tree, 2),
            "rel_dev": dev,
        }))


if __name__ == "__main__":
    main()
