"""Compare the compiled and pure-Python kernels.

Times the bordered band Cholesky plus one solve over a range of sizes, and a
full REML fit on simulated data, once per backend. Usage::

    python3 benchmarks/bench_backends.py [--dims 1000,10000,100000] [--repeats 5]
"""
import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from mmbspline import _backend
from mmbspline.bench import loglog_slope

FIT_SNIPPET = """
import statistics, time
from mmbspline import build_spec, fit, _backend
from mmbspline.data import simulate
x, y = simulate(1000, seed=1)
spec = build_spec(0, 10, 100)
runs = []
for _ in range({repeats}):
    start = time.perf_counter()
    fit(x, y, spec)
    runs.append(time.perf_counter() - start)
print(_backend.BACKEND, statistics.median(runs))
"""


def time_factor_solve(kernels, dim, repeats, rng):
    band = np.vstack((np.full(dim, 20.0), rng.uniform(-1, 1, (4, dim))))
    border = rng.uniform(-1, 1, (dim, 2))
    corner = np.eye(2) * 10.0 * dim
    rhs = rng.normal(size=(dim + 2, 1))
    runs = []
    for _ in range(repeats):
        start = time.perf_counter()
        low = kernels.bordered_cholesky(band, border, corner)
        kernels.bordered_solve(*low[:3], rhs)
        runs.append(time.perf_counter() - start)
    return statistics.median(runs)


def time_fit(backend, repeats):
    # a fresh interpreter so the backend choice at import takes effect
    out = subprocess.run(
        [sys.executable, "-c", FIT_SNIPPET.format(repeats=repeats)],
        env={**os.environ, "MMBSPLINE_BACKEND": backend}, capture_output=True, text=True, check=True,
    )
    label, seconds = out.stdout.split()
    return label, float(seconds)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", default="1000,10000,100000")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)
    dims = [int(v) for v in args.dims.split(",")]

    backends = [("python", _backend.python_kernels)]
    if _backend.compiled_kernels is not None:
        backends.insert(0, ("compiled", _backend.compiled_kernels))
    else:
        print("compiled extension not built; timing the python kernels only")

    print("cholesky + solve, band width 4, border 2 (median seconds)")
    print(f"{'dim':>8} " + " ".join(f"{name:>12}" for name, _ in backends))
    table = {name: [] for name, _ in backends}
    for dim in dims:
        for name, kernels in backends:
            table[name].append(time_factor_solve(kernels, dim, args.repeats, np.random.default_rng(dim)))
        print(f"{dim:>8} " + " ".join(f"{table[name][-1]:>12.3e}" for name, _ in backends))
    if len(dims) >= 2:
        print("log-log slope: " + ", ".join(f"{name} {loglog_slope(dims, table[name]):.2f}" for name, _ in backends))
    if len(backends) == 2:
        ratios = np.array(table["python"]) / np.array(table["compiled"])
        print("python / compiled: " + ", ".join(f"{r:.0f}x" for r in ratios))

    print("\nREML fit, n=1000, nseg=100 (median seconds)")
    for name, _ in backends:
        label, seconds = time_fit(name, args.repeats)
        print(f"{label:>10} {seconds:.4f}")


if __name__ == "__main__":
    main()
