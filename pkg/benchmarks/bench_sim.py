"""Compare the compiled simulation kernel with the pure-Python fallback.

    python3 benchmarks/bench_sim.py [--repeat N]

Two workloads: the reference delay kernel integrated for 8000 ms at
δt = 0.01 ms (lags 1 and 3000, where the fallback uses blocked IIR
filtering), and a bivariate VAR(6) (short lags, row loop fallback).
"""
import argparse
import time

import numpy as np

from ctgranger import _simkernel_py
from ctgranger.minimal import MinimalCtvarParams
from ctgranger.ctvar_numeric import kernel_from_minimal
from ctgranger.sim import discretize_kernel, rng_for

try:
    from ctgranger._simkernel import recursion as compiled
except ImportError:
    compiled = None


def delay_workload():
    kernel = kernel_from_minimal(MinimalCtvarParams.reference())
    dt = 0.01
    lags, mats = discretize_kernel(kernel, dt)
    mats = dt * mats
    mats[0] += np.eye(2)
    rows = int(8000 / dt) + int(lags.max()) + 10000
    noise = rng_for(0).standard_normal((rows, 2)) * np.sqrt(dt)
    return lags, mats, noise, int(lags.max())


def var_workload():
    rng = np.random.default_rng(0)
    mats = rng.normal(scale=0.08, size=(6, 2, 2))
    mats[0] += 0.4 * np.eye(2)
    lags = np.arange(1, 7, dtype=np.intp)
    noise = rng_for(1).standard_normal((200_000, 2))
    return lags, mats, noise, 6


def best_time(fn, args, repeat):
    lags, mats, noise, start = args
    best, out = np.inf, None
    for _ in range(repeat):
        x = np.zeros_like(noise)
        t0 = time.perf_counter()
        fn(x, lags, mats, noise, start, 1e8)
        best = min(best, time.perf_counter() - t0)
        out = x
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    for name, work in (("delay kernel, 8000 ms", delay_workload()), ("VAR(6), 200k rows", var_workload())):
        rows = len(work[2])
        t_py, x_py = best_time(_simkernel_py.recursion, work, args.repeat)
        line = f"{name:24s} rows={rows:8d}  python {t_py * 1e3:9.1f} ms"
        if compiled is not None:
            t_c, x_c = best_time(compiled, work, args.repeat)
            diff = np.abs(x_c - x_py).max() / np.abs(x_c).max()
            line += f"  cython {t_c * 1e3:8.1f} ms  speedup {t_py / t_c:6.1f}x  max rel diff {diff:.1e}"
        else:
            line += "  (compiled extension not built)"
        print(line)


if __name__ == "__main__":
    main()
