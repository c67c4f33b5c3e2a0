"""Compare the compiled and numpy Bessel kernels.

    python3 benchmarks/bench_kernels.py [--points N] [--repeat R]

Times normj and jv on N points for each backend, then a 21 x 21 grid
solve of the jbessel datum (gamma = 2/3, k = 5/2) in a subprocess per backend.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from epdkit._backend import available_backends

SOLVE_SNIPPET = """
import time
import numpy as np
import epdkit
from epdkit.epd import InitialDatum, ProblemSpec, solve_direct
from epdkit.specfun import normalized_j
from epdkit.translation import EvenFunction
datum = InitialDatum(EvenFunction(lambda p: normalized_j(-1 / 6, p[:, 0])))
spec = ProblemSpec(1, (2 / 3,), 2.5, datum)
axis = np.linspace(0.0, 2.0, 21)
X, T = np.meshgrid(axis, axis, indexing="ij")
start = time.perf_counter()
solve_direct(spec, X.reshape(-1, 1), T.ravel())
print(epdkit.BACKEND, time.perf_counter() - start)
"""


def time_kernel(func, nu, t, repeat):
    return min(timeit.repeat(lambda: func(nu, t), number=1, repeat=repeat))


def time_solve(backend):
    env = dict(os.environ, EPD_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", SOLVE_SNIPPET], capture_output=True, text=True,
                         env=env, check=True)
    return float(out.stdout.split()[1])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = available_backends()
    t = np.random.default_rng(0).uniform(0.0, 60.0, args.points)
    print(f"{'kernel':<10}{'nu':>8}" + "".join(f"{name:>12}" for name in backends) + "   (seconds)")
    for kernel in ("normj", "jv"):
        for nu in (-1 / 6, 0.75, 3.5):
            times = [time_kernel(getattr(mod, kernel), nu, t, args.repeat) for mod in backends.values()]
            print(f"{kernel:<10}{nu:>8.3f}" + "".join(f"{s:>12.4f}" for s in times))
    print()
    for name in backends:
        print(f"jbessel grid solve, {name:<7} backend: {time_solve(name):.3f} s")


if __name__ == "__main__":
    main()
