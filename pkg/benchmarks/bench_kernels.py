#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the three hot operations on a representative desk-scale state, then a
full trial on each backend (the trial comparison spawns subprocesses so each
backend is selected at import).

Usage: python benchmarks/bench_kernels.py [--trials 3]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from congestsim.kernels import pure

try:
    from congestsim.kernels import _fast
except ImportError:
    _fast = None


def _state(n=40, nb=12, seed=0):
    rng = np.random.default_rng(seed)
    pos = np.ascontiguousarray(np.column_stack([
        rng.uniform(120, 170, n), rng.uniform(155, 200, n),
        rng.uniform(25, 50, n)]))
    active = np.ones(n, dtype=np.uint8)
    radius = np.ones(n)
    b = np.zeros((nb, 5))
    for i in range(nb):
        x0, y0 = rng.uniform(0, 270, 2)
        b[i] = (x0, y0, x0 + 10, y0 + 12, rng.uniform(4, 15))
    return pos, active, radius, b


def bench_op(label, fn, args, reps=20000):
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    dt = time.perf_counter() - t0
    per = dt / reps * 1e6
    print(f"  {label:24s} {per:9.2f} us/call")
    return per


def bench_backend(name, mod):
    print(f"{name} backend:")
    pos, active, radius, b = _state()
    out = {}
    out["move_ok"] = bench_op(
        "move_ok", mod.move_ok,
        (pos, active, radius, 3, 145.0, 170.0, 30.0, 5.0, 1.0, 1e-9))
    out["segment_ok"] = bench_op(
        "segment_ok", mod.segment_ok,
        (pos, active, radius, 3, 130.0, 160.0, 160.0, 195.0, 30.0, 5.0, 1.0,
         1e-9, b))
    out["min_separation"] = bench_op(
        "min_separation", mod.min_separation, (pos, active, radius, 5.0),
        reps=5000)
    return out


_TRIAL_SCRIPT = """
import time
from congestsim import kernels
from congestsim.maps import builtin_world, building_set
from congestsim.mission import build_mission_plan
from congestsim.experiments import uav_manifest
from congestsim.launchzone import generate_layout
from congestsim.sim import run_trial
w = builtin_world('cassidy-like')
ids = building_set('cassidy-desk')
plan = build_mission_plan(w, ids, 1)
layout = generate_layout(w, 'square', 2.0, uav_manifest(len(ids)), 5, 8)
t0 = time.perf_counter()
run_trial(w, layout, plan, seed=7, duration_after_last_wave_s=300.0)
print(f"{kernels.BACKEND} trial: {time.perf_counter() - t0:.2f} s")
"""


def bench_trials(trials):
    sys.stdout.flush()
    for backend in ("fast", "pure"):
        if backend == "fast" and _fast is None:
            print("fast backend unavailable; skipping trial benchmark",
                  flush=True)
            continue
        env = dict(os.environ, CONGESTSIM_KERNELS=backend)
        for _ in range(trials):
            subprocess.run([sys.executable, "-c", _TRIAL_SCRIPT], env=env,
                           check=True)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=2,
                        help="full-trial repetitions per backend")
    args = parser.parse_args()

    pure_times = bench_backend("pure", pure)
    if _fast is not None:
        fast_times = bench_backend("fast", _fast)
        print("speedup (pure / fast):")
        for key in pure_times:
            print(f"  {key:24s} {pure_times[key] / fast_times[key]:8.1f}x")
    else:
        print("compiled backend unavailable")

    print("full desk-scale trial (40 UAVs, 300 s):")
    bench_trials(args.trials)


if __name__ == "__main__":
    main()
