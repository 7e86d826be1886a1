"""Time the compiled and pure-Python simulation kernels on the same workload.

    python benchmarks/bench_kernels.py [--repeat N]

Reports nanoseconds per simulated step for ``run_to_exhaustion`` and for one
full objective evaluation (24 protocol simulations) per backend.
"""
import argparse
import importlib
import time

from hydfit import _kernels_py
from hydfit.config import REFERENCE_CONFIG
from hydfit.ground_truth import EXAMPLE_ATHLETE, power_for_tte


def backends():
    found = [("python", _kernels_py)]
    try:
        found.insert(0, ("cython", importlib.import_module("hydfit._kernels")))
    except ImportError:
        pass
    return found


def time_steps(mod, repeat: int) -> float:
    params = REFERENCE_CONFIG.as_tuple()
    p = power_for_tte(EXAMPLE_ATHLETE, 240.0)
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        n, *_ = mod.run_to_exhaustion(params, p, 0.1, 50_000, 0.0, 0.0)
        best = min(best, (time.perf_counter() - start) / n)
    return best * 1e9


def time_objective(mod, repeat: int) -> float:
    from hydfit import objectives

    original = objectives.kernels
    objectives.kernels = mod  # objective reads the kernel module at call time
    try:
        obj = objectives.Objective(EXAMPLE_ATHLETE)
        genome = REFERENCE_CONFIG.as_array()
        best = float("inf")
        for _ in range(repeat):
            start = time.perf_counter()
            obj(genome)
            best = min(best, time.perf_counter() - start)
    finally:
        objectives.kernels = original
    return best * 1e3


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rows = []
    for name, mod in backends():
        rows.append((name, time_steps(mod, args.repeat), time_objective(mod, max(1, args.repeat // 2))))
    print(f"{'backend':8s} {'ns/step':>10s} {'ms/evaluation':>14s}")
    for name, ns, ms in rows:
        print(f"{name:8s} {ns:10.1f} {ms:14.2f}")
    if len(rows) == 2:
        print(f"speedup  {rows[1][1] / rows[0][1]:10.0f}x {rows[1][2] / rows[0][2]:13.0f}x")


if __name__ == "__main__":
    main()
