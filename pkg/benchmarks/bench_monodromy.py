"""Time one monodromy integration with each available backend.

    python3 benchmarks/bench_monodromy.py [--repeat 20]
"""

import argparse
import time

import numpy as np

from pcband import _kernels
from pcband.hill1d import DEFAULT_TOL, MAX_STEP, HillProblem
from pcband.profiles import TrigPolynomial1D


def bench(backend, hp, lam, repeat):
    args = hp.kernel_args()[:6]
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        status, state, steps, _ = _kernels.integrate(lam, *args, 1.0, DEFAULT_TOL, MAX_STEP,
                                                     backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, steps, np.array(state[:4])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    hp = HillProblem(TrigPolynomial1D(2.0, (1.0, 0.3), (0.0, 0.2)))
    print(f"{'lambda':>8} {'backend':>9} {'steps':>6} {'best ms':>9} {'speedup':>8}")
    for lam in (5.0, 50.0, 500.0):
        rows = {b: bench(b, hp, lam, args.repeat if b == "compiled" else max(1, args.repeat // 10))
                for b in _kernels.available_backends()}
        base = rows["python"][0]
        for b, (t, steps, state) in rows.items():
            print(f"{lam:8.1f} {b:>9} {steps:6d} {1e3 * t:9.3f} {base / t:8.1f}")
        if len(rows) == 2:
            diff = np.abs(rows["compiled"][2] - rows["python"][2]).max()
            print(f"{'':8} max |state difference| = {diff:.2e}")


if __name__ == "__main__":
    main()
