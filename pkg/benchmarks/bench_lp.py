#!/usr/bin/env python3
"""Benchmark the simplex pivot kernels: compiled extension vs numpy fallback.

Two workloads drawn from real package usage:
  membership      polytope membership LPs (conditional states of the
                  square-pair composite against its 24-vertex state space)
  discrimination  distinguishability feasibility LPs over effect vectors

Usage: python benchmarks/bench_lp.py [--repeat N] [--states N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gptlab.lp import _kernel, _pivot_py
from gptlab.convex import contains_state, extremal_effects, vertices_of
from gptlab.composites import compose, conditional_state, product_effect, sample_composite_state
from gptlab.discrimination import distinguishable
from gptlab.models import square_gbit

try:
    from gptlab.lp import _pivot_cy

    KERNELS = [("cython", _pivot_cy), ("python", _pivot_py)]
except ImportError:
    _pivot_cy = None
    KERNELS = [("python", _pivot_py)]


def workload_membership(n_states: int, seed: int) -> int:
    rng = np.random.default_rng(seed)
    sq = square_gbit()
    comp = compose(sq, sq, "max")
    effects = extremal_effects(sq)
    unit = np.array([1.0, 0.0, 0.0])
    checks = 0
    for _ in range(n_states):
        omega = sample_composite_state(comp, rng)
        for effect in effects:
            if product_effect(unit, effect) @ omega <= 1e-9:
                continue
            cond = conditional_state(comp, omega, effect, side="B")
            assert contains_state(sq, cond)
            checks += 1
    return checks


def workload_discrimination(n_pairs: int, seed: int) -> int:
    rng = np.random.default_rng(seed)
    sq = square_gbit()
    comp = compose(sq, sq, "max")
    verts = vertices_of(comp.space)
    hits = 0
    for _ in range(n_pairs):
        i, j = rng.choice(verts.shape[0], size=2, replace=False)
        if distinguishable(comp.space, verts[[i, j]]) is not None:
            hits += 1
    return hits


def run(kernel_name: str, impl, fn, *args) -> tuple[float, int]:
    previous = _kernel.run_pivots
    _kernel.run_pivots = impl.run_pivots
    try:
        start = time.perf_counter()
        result = fn(*args)
        elapsed = time.perf_counter() - start
    finally:
        _kernel.run_pivots = previous
    return elapsed, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--states", type=int, default=200)
    parser.add_argument("--pairs", type=int, default=60)
    args = parser.parse_args()

    workloads = [
        ("membership", workload_membership, args.states),
        ("discrimination", workload_discrimination, args.pairs),
    ]
    print(f"{'workload':16s} {'kernel':8s} {'best (s)':>10s} {'per call (ms)':>14s}")
    baselines: dict[str, float] = {}
    for wname, fn, size in workloads:
        for kname, impl in KERNELS:
            best, count = min(
                (run(kname, impl, fn, size, rep) for rep in range(args.repeat)),
                key=lambda t: t[0],
            )
            per_call = 1000.0 * best / max(count, 1)
            line = f"{wname:16s} {kname:8s} {best:10.3f} {per_call:14.3f}"
            if kname == "cython":
                baselines[wname] = best
            elif wname in baselines:
                line += f"   ({best / baselines[wname]:.1f}x slower)"
            print(line)
    if _pivot_cy is None:
        print("compiled kernel unavailable; showing the fallback only")


if __name__ == "__main__":
    main()
