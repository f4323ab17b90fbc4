#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Run from the repository root:

    python benchmarks/bench_kernels.py [--steps N]

Each kernel is timed on identical inputs for every importable backend; the
walk kernels produce bit-identical states, so the comparison is purely
about speed.
"""

import argparse
import time

from cylwalk.backend import get_backends
from cylwalk.rng import stream_base
from cylwalk.state import WalkState


def time_call(fn, *args, repeat=3, **kw):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_walk(mod, steps, record):
    st = WalkState(2, 10, seed=1, replica=0, record=record)
    st.place((0, 0), 0)
    dt, _ = time_call(mod.run_steps, st, steps, repeat=1)
    return steps / dt


def bench_tau(mod, steps):
    st = WalkState(1, 4, seed=2, replica=0, record=False)
    st.tau_enabled = True
    st.place((0,), 0)
    dt, _ = time_call(mod.run_steps, st, steps, repeat=1)
    return steps / dt


def bench_plane(mod, steps):
    base = stream_base(3, 0)
    t0 = time.perf_counter()
    done = 0
    k = 0
    while done < steps:
        _, n, k = mod.walk_until_plane_or_exit(4, 16, base, k, [1, 0, 0, 0],
                                               0, [(1, 0), (2, 0), (3, 0)],
                                               -31, 31, steps - done)
        done += n
    return steps / (time.perf_counter() - t0)


def bench_exit(mod, replicas):
    t0 = time.perf_counter()
    tau1, texit = mod.z_exit_times(1, 16, 5, replicas)
    dt = time.perf_counter() - t0
    return int(texit.sum()) / dt


def bench_qmc(mod, replicas):
    t0 = time.perf_counter()
    mod.q_return_walks(3, 10 ** 4, replicas, 7)
    return replicas / (time.perf_counter() - t0)


def bench_saw(mod, n):
    dt, _ = time_call(mod.count_star_saws, n)
    return 1.0 / dt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=2 * 10 ** 6,
                    help="walk steps per kernel timing")
    args = ap.parse_args()

    rows = [
        ("plain walk (steps/s)", lambda m: bench_walk(m, args.steps, False)),
        ("recorded walk (steps/s)", lambda m: bench_walk(m, args.steps, True)),
        ("level-crossing walk (steps/s)", lambda m: bench_tau(m, args.steps)),
        ("plane-hit walk (steps/s)", lambda m: bench_plane(m, args.steps)),
        ("height exits (steps/s)", lambda m: bench_exit(m, 2000)),
        ("return-prob walks (walks/s)", lambda m: bench_qmc(m, 20000)),
        ("king-SAW count n=7 (runs/s)", lambda m: bench_saw(m, 7)),
    ]
    backends = get_backends()
    names = [m.IMPL for m in backends]
    print(f"{'kernel':34s}" + "".join(f"{n:>14s}" for n in names) +
          ("      speedup" if len(backends) == 2 else ""))
    for label, fn in rows:
        vals = [fn(m) for m in backends]
        line = f"{label:34s}" + "".join(f"{v:14.3g}" for v in vals)
        if len(vals) == 2:
            line += f"{vals[1] / vals[0]:12.1f}x"
        print(line)


if __name__ == "__main__":
    main()
