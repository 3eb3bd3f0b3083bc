"""Time the numba and numpy step kernels on the same mean-field problem.

Both backends run the same desk-scale dual-pump pulse in full mode for a few
grid sizes; the script prints wall time per run, the speedup, and the largest
difference between the two output series (they agree to rounding).

    python benchmarks/bench_kernels.py [--nz 10 20 40] [--repeat 3]
"""

import argparse
import time

import numpy as np

from slowsbs.params import DualPumpConfig, WaveguideParams
from slowsbs.propagator import Grid, PulseSpec, kernels, propagate_mean_field

PARAMS = WaveguideParams(g=1e6, gamma=1e8, v_g=1e8, length=1e-2, omega_phonon=5e10, n_bar=0.0)
PUMPS = DualPumpConfig.from_scaled(2.5e5, 0.5, 1e6, 2.0)
PULSE = PulseSpec(sigma_t=2e-8)


def best_time(backend, grid, mode, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = propagate_mean_field(PARAMS, PUMPS, PULSE, grid, mode, backend=backend)
        times.append(time.perf_counter() - t0)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nz", type=int, nargs="+", default=[10, 20, 40])
    ap.add_argument("--mode", choices=("full", "adiabatic"), default="full")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    # compile outside the timed region
    kernels.get_advance("numba")
    propagate_mean_field(PARAMS, PUMPS, PULSE, Grid.for_pulse(PARAMS, PULSE, 4), args.mode, backend="numba")

    print(f"{'nz':>5} {'steps':>8} {'numpy s':>9} {'numba s':>9} {'speedup':>8} {'max |diff|':>11}")
    for nz in args.nz:
        grid = Grid.for_pulse(PARAMS, PULSE, nz)
        t_np, r_np = best_time("numpy", grid, args.mode, args.repeat)
        t_nb, r_nb = best_time("numba", grid, args.mode, args.repeat)
        diff = np.max(np.abs(r_np.output - r_nb.output)) / np.max(np.abs(r_np.output))
        print(f"{nz:>5} {grid.nt:>8} {t_np:>9.3f} {t_nb:>9.3f} {t_np / t_nb:>8.1f} {diff:>11.2e}")


if __name__ == "__main__":
    main()
