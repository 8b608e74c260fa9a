"""Compiled vs pure-Python enumeration kernels.

Times ``enum_points`` and ``find_zeros`` on seeded positive definite Gram
matrices of growing dimension and radius, checks that both backends return
the same points and node counts, and prints a table.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--seed 0] [--json out.json]
"""

import argparse
import json
import random
import sys
import time

from wittheight import kernels
from wittheight.exact_linalg import det

CASES = [(2, 400), (3, 200), (3, 800), (4, 150), (4, 400), (5, 80), (6, 40)]


def random_gram(rng, n):
    while True:
        b = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        if det(b) != 0:
            return [[sum(b[k][i] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def random_form(rng, n):
    f = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            f[i][j] = f[j][i] = rng.randint(-3, 3)
    f[0][0] = 1
    f[-1][-1] = -1  # indefinite, so zeros exist
    return f


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)

    if "cython" not in kernels.AVAILABLE:
        print("compiled kernel not built; only the Python backend is available", file=sys.stderr)
        return 1
    rng = random.Random(args.seed)
    rows = []
    print(f"{'op':<12}{'n':>3}{'bound':>7}{'nodes':>10}{'python s':>11}{'cython s':>11}{'speedup':>9}")
    for n, bound in CASES:
        gram = random_gram(rng, n)
        form = random_form(rng, n)
        for op, call in (("enum_points", lambda b: kernels.enum_points(gram, bound, backend=b)),
                         ("find_zeros", lambda b: kernels.find_zeros(gram, form, bound, backend=b))):
            tp, rp = best_of(lambda: call("python"), args.repeat)
            tc, rc = best_of(lambda: call("cython"), args.repeat)
            if sorted(rp.points) != sorted(rc.points) or rp.nodes != rc.nodes:
                print(f"backend mismatch on {op} n={n} bound={bound}", file=sys.stderr)
                return 2
            speed = tp / tc if tc > 0 else float("inf")
            rows.append({"op": op, "n": n, "bound": bound, "nodes": rp.nodes,
                         "points": len(rp.points), "python_s": tp, "cython_s": tc,
                         "speedup": speed})
            print(f"{op:<12}{n:>3}{bound:>7}{rp.nodes:>10}{tp:>11.4f}{tc:>11.4f}{speed:>8.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
