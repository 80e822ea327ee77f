"""Compare the compiled and pure-Python RK4 kernels on the same forcing.

    python benchmarks/bench_kernels.py --steps 200000 --repeat 3
"""
import argparse
import time

import numpy as np

from optosqueeze import BASELINE_PARAMS, compute_modes, critical_modulation
from optosqueeze._core import compiled_integrate, python_integrate
from optosqueeze.oracle import SimulationConfig, synthesize_noise


def run(kernel, steps, nu1, nu2, args):
    out = np.empty((steps + 1, 4))
    start = time.perf_counter()
    kernel(np.zeros(4), 0.0, 0.04, steps, *args, nu1, nu2, out, 1e300)
    return time.perf_counter() - start, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    dp = BASELINE_PARAMS
    modes = compute_modes(dp)
    depth = 0.5 * critical_modulation(modes)[0]
    cfg = SimulationConfig(dp, dt=0.04, n_steps=args.steps)
    nu1, nu2, _ = synthesize_noise(cfg, np.random.default_rng(args.seed))
    params = (dp.A, dp.g, dp.alpha, depth, 2 * modes[0].omega, modes.squeezing_phase(0))

    kernels = {"python": python_integrate}
    if compiled_integrate is not None:
        kernels["cython"] = compiled_integrate
    else:
        print("compiled kernel not built; timing the fallback only")
    best, outputs = {}, {}
    for name, kernel in kernels.items():
        times = []
        for _ in range(args.repeat):
            elapsed, out = run(kernel, args.steps, nu1, nu2, params)
            times.append(elapsed)
        best[name], outputs[name] = min(times), out
        print(f"{name:>7}: {best[name]:.4f} s for {args.steps} steps "
              f"({1e9 * best[name] / args.steps:.1f} ns/step)")
    if len(kernels) == 2:
        diff = np.max(np.abs(outputs["cython"] - outputs["python"]))
        scale = np.max(np.abs(outputs["python"]))
        print(f"speed-up {best['python'] / best['cython']:.0f}x, "
              f"max |difference| {diff:.3g} (state scale {scale:.3g})")


if __name__ == "__main__":
    main()
