"""Compare the numba and numpy RK4 backends on a default-sized run.

    python benchmarks/bench_kernels.py [--repeat 5] [--kappa-tau-p 100]
"""
import argparse
import statistics
import time

import numpy as np

from bdsplit import InputSuperposition, Pulse, SystemParams, TimeGrid
from bdsplit.kernels import rk4_drive
from bdsplit.model import drive_vector, system_matrix
from bdsplit._accel import HAVE_NUMBA


def _time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return out, statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--kappa-tau-p", type=float, default=100.0)
    ap.add_argument("--g", type=float, default=1.0)
    args = ap.parse_args(argv)

    params = SystemParams.symmetric(g=args.g, gamma=0.1)
    pulse = Pulse.from_duration(args.kappa_tau_p)
    grid = TimeGrid.for_run(params, pulse)
    a, b = system_matrix(params), drive_vector(params, InputSuperposition(0.6, 0.8, 1, 0))

    def run(backend):
        return lambda: rk4_drive(a, b, grid.t_start, grid.dt, grid.n_steps, pulse.t0, pulse.eta, backend=backend)

    print(f"grid: {grid.n_steps} steps of dt={grid.dt:.4g}, median of {args.repeat}")
    y_np, t_np = _time(run("numpy"), args.repeat)
    print(f"numpy : {t_np * 1e3:9.2f} ms")
    if not HAVE_NUMBA:
        print("numba : not installed")
        return
    t0 = time.perf_counter()
    run("numba")()
    print(f"numba : {(time.perf_counter() - t0) * 1e3:9.2f} ms first call (compile or cache load)")
    y_nb, t_nb = _time(run("numba"), args.repeat)
    print(f"numba : {t_nb * 1e3:9.2f} ms")
    print(f"speedup {t_np / t_nb:.1f}x, max |difference| {np.max(np.abs(y_nb - y_np)):.2e}")


if __name__ == "__main__":
    main()
