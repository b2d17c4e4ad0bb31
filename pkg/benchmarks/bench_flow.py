"""Compare the compiled and pure-Python first-return kernels.

    python3 benchmarks/bench_flow.py [--samples 16] [--repeat 3]

Runs the same log-spaced displacement scan with each available backend,
checks that both give the same numbers and reports wall time per scan.
"""

import argparse
import time
from fractions import Fraction

import numpy as np

from nilcycles.cycles import displacement_scan
from nilcycles.families import builtin_family, evaluate
from nilcycles.flow import FlowConfig, available_backends

CASES = {
    "lienard(1,2)": ({"beta2": Fraction(-1, 100), "beta4": 1}, (0.02, 0.5)),
    "lienard(1,3)": ({"beta2": Fraction(1, 10**6), "beta4": Fraction(-1, 100), "beta6": 1}, (1e-3, 0.9)),
    "cubic_n3": ({"eps": Fraction(1, 10)}, (0.01, 0.6)),
}


def bench(samples: int, repeat: int, workers: int) -> None:
    backends = available_backends()
    print(f"backends: {', '.join(backends)}; {samples} radii per scan, best of {repeat}")
    print(f"{'system':<14}{'backend':<10}{'seconds':>10}{'steps':>10}{'speedup':>10}")
    for name, (point, annulus) in CASES.items():
        sys = evaluate(builtin_family(name), point)
        radii = np.geomspace(*annulus, samples)
        timings, results = {}, {}
        for backend in backends:
            cfg = FlowConfig(backend=backend, workers=workers)
            best = float("inf")
            for _ in range(repeat):
                t0 = time.perf_counter()
                scan = displacement_scan(sys, radii, cfg)
                best = min(best, time.perf_counter() - t0)
            timings[backend], results[backend] = best, scan
        ref = timings["python"]
        for backend in backends:
            steps = sum(s.steps for s in results[backend])
            print(f"{name:<14}{backend:<10}{timings[backend]:>10.3f}{steps:>10}{ref / timings[backend]:>9.1f}x")
        if len(backends) == 2:
            a, b = (results[k] for k in backends)
            assert [s.r_return for s in a] == [s.r_return for s in b], "backends disagree"


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    bench(args.samples, args.repeat, args.workers)


if __name__ == "__main__":
    main()
