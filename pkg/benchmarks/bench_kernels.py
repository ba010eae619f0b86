"""Compare the compiled and pure-Python loess/STL kernels.

    python benchmarks/bench_kernels.py [--repeats N] [--json out.json]

Reports the best-of-N wall time per call for each backend, the speed-up,
and the largest absolute difference between their outputs.
"""

import argparse
import json
import sys
import timeit

import numpy as np

from tsarm import _kernels_py

try:
    from tsarm import _kernels
except ImportError:
    _kernels = None

CASES = [
    ("loess_grid n=100 q=25 deg=1", "grid", 100, 25, 1),
    ("loess_grid n=1000 q=101 deg=2", "grid", 1000, 101, 2),
    ("stl n=100 period=25", "stl", 100, 25, None),
    ("stl n=1024 period=64", "stl", 1024, 64, None),
]


def _call(mod, kind, y, a, b):
    if kind == "grid":
        return (mod.loess_grid(y, a, b),)
    from tsarm.stl import stl_spans
    ns, nt, nl = stl_spans(a)
    return mod.stl_inner(y, a, ns, nt, nl, 1, 1, 1, 2)


def _best(fn, repeats):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeats)) / number


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--json")
    args = p.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the Python backend is available", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    rows = []
    print(f"{'case':34s} {'cython':>12s} {'python':>12s} {'speed-up':>9s} {'max |diff|':>11s}")
    for name, kind, n, a, b in CASES:
        y = np.sin(np.arange(n) * 2 * np.pi / 25) + rng.standard_normal(n) * 0.3
        fast = _call(_kernels, kind, y, a, b)
        slow = _call(_kernels_py, kind, y, a, b)
        diff = max(float(np.max(np.abs(f - s))) for f, s in zip(fast, slow))
        tc = _best(lambda: _call(_kernels, kind, y, a, b), args.repeats)
        tp = _best(lambda: _call(_kernels_py, kind, y, a, b), args.repeats)
        rows.append({"case": name, "cython_s": tc, "python_s": tp, "speedup": tp / tc, "max_abs_diff": diff})
        print(f"{name:34s} {tc * 1e3:10.3f}ms {tp * 1e3:10.3f}ms {tp / tc:8.1f}x {diff:11.2e}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
