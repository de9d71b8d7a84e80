"""Compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json FILE]

Times integer row reduction through the dispatcher (calls that overflow
64-bit arithmetic are redone in Python and counted), stabilizer search over
the hyperoctahedral groups, and one end-to-end stratification run under
each backend.
"""

import argparse
import itertools
import json
import os
import random
import subprocess
import sys
import timeit

from strata_lab import _kernels
from strata_lab._kernels import _pykernels


def random_rows(rng, nrows, ncols, bound=20):
    return [[rng.randint(-bound, bound) for _ in range(ncols)] for _ in range(nrows)]


def hyperoctahedral(n):
    nums = []
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            m = [0] * (n * n)
            for i, j in enumerate(perm):
                m[i * n + j] = signs[i]
            nums.append(m)
    return nums, [1] * len(nums)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_cases(rng):
    for size in (6, 10, 16):
        rows = [random_rows(rng, size, size, bound=3) for _ in range(20)]
        yield f"rref {size}x{size} (x20)", rows, size
    for n in (3, 4):
        nums, dens = hyperoctahedral(n)
        points = [[rng.choice((0, 0, 1, -1, 2)) for _ in range(n)] for _ in range(200)]
        yield f"stabilizer |G|={len(nums)} (x200)", (nums, dens, points), n


def run_kernels(repeat, seed):
    rng = random.Random(seed)
    out = []
    for label, data, n in kernel_cases(rng):
        if label.startswith("rref"):
            def py(data=data, n=n):
                return [_pykernels.rref_int(r, n) for r in data]

            def cy(data=data, n=n):
                # the dispatcher, so 64-bit overflows are redone in Python and counted
                return [_kernels.rref_int(r, n) for r in data]

            fallbacks = 0
            for r in data:
                try:
                    _kernels._compiled.rref_int(r, n)
                except OverflowError:
                    fallbacks += 1
            label += f" [{fallbacks} fallbacks]" if fallbacks else ""
        else:
            nums, dens, points = data
            pa = _pykernels.IntegerAction(nums, dens, n)
            ca = _kernels._compiled.IntegerAction(nums, dens, n)

            def py(pa=pa, points=points):
                return [pa.stabilizer(x) for x in points]

            def cy(ca=ca, points=points):
                return [ca.stabilizer(x) for x in points]
        assert py() == cy(), label
        out.append((label, best(py, repeat), best(cy, repeat)))
    return out


END_TO_END = ("from strata_lab.groups import close_generators\n"
              "from strata_lab.linalg import RationalMatrix\n"
              "from strata_lab.strata import loop_strata\n"
              "import time\n"
              "gens = [RationalMatrix.from_rows([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),\n"
              "        RationalMatrix.from_rows([[0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]),\n"
              "        RationalMatrix.from_rows([[-1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])]\n"
              "t = time.perf_counter()\n"
              "r = loop_strata(close_generators(gens, cap=400))\n"
              "print(time.perf_counter() - t, len(r.strata))\n")


def run_end_to_end():
    out = {}
    for backend, env in (("python", {"STRATA_LAB_PURE_PYTHON": "1"}), ("cython", {})):
        merged = {k: v for k, v in os.environ.items() if k != "STRATA_LAB_PURE_PYTHON"}
        merged.update(env)
        proc = subprocess.run([sys.executable, "-c", END_TO_END], capture_output=True, text=True,
                              env=merged, check=True)
        secs, count = proc.stdout.split()
        out[backend] = (float(secs), int(count))
    if out["python"][1] != out["cython"][1]:
        raise SystemExit("backends disagree on the stratum count")
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", metavar="FILE")
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args()
    if _kernels._compiled is None:
        raise SystemExit("compiled extension not built; run `pip install --no-build-isolation -e .`")
    rows = run_kernels(args.repeat, args.seed)
    print(f"{'case':34} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for label, py, cy in rows:
        print(f"{label:34} {py:10.4f} {cy:10.4f} {py / cy:8.1f}")
    e2e = None if args.skip_end_to_end else run_end_to_end()
    if e2e:
        py, cy = e2e["python"][0], e2e["cython"][0]
        print(f"{'loop strata, B4 (order 384)':34} {py:10.4f} {cy:10.4f} {py / cy:8.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"kernels": [{"case": c, "python": p, "cython": q} for c, p, q in rows],
                       "end_to_end": e2e}, fh, indent=2)


if __name__ == "__main__":
    main()
