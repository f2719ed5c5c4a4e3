"""Time the numba kernels against the numpy fallback on random series chunks.

    python3 benchmarks/bench_kernels.py [--length 512] [--repeat 20]

Also times one end-to-end workload (chi decisions) in a subprocess per backend,
since the backend is fixed at import time by VALDEF_NO_NUMBA.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from valdef import _kernels as K
from valdef.finite_field import parse_field_spec

FIELDS = ("2", "3^1", "2^3", "3^2")


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench_kernels(length, repeat):
    rng = np.random.default_rng(0)
    rows = []
    for spec in FIELDS:
        F = parse_field_spec(spec)
        p, mod = F.p, F.mod_array
        a = rng.integers(0, p, (length, F.k)).astype(np.int64)
        b = rng.integers(0, p, (length, F.k)).astype(np.int64)
        a[0] = 0
        a[0, 0] = 1  # unit constant term for the inverse
        inv0 = a[0].copy()
        cases = {
            "mul_full": (K.mul_full_nb, K.mul_full_np, (a, b, p, mod)),
            "mul_trunc": (K.mul_trunc_nb, K.mul_trunc_np, (a, b, length, p, mod)),
            "inv_trunc": (K.inv_trunc_nb, K.inv_trunc_np, (a, length, inv0, p, mod)),
        }
        for name, (nb, npf, args) in cases.items():
            nb(*args)  # compile / load from cache
            assert np.array_equal(nb(*args), npf(*args))
            t_nb, t_np = _best(lambda: nb(*args), repeat), _best(lambda: npf(*args), repeat)
            rows.append((str(F), name, t_nb, t_np))
    return rows


WORKLOAD = """
import time
from valdef.finite_field import parse_field_spec
from valdef.suites import run_suite
run_suite("chi", parse_field_spec("4"), 20, 99)
t = time.perf_counter()
run_suite("chi", parse_field_spec("4"), {n}, 1)
run_suite("folkloric", parse_field_spec("3"), {n}, 1)
print(time.perf_counter() - t)
"""


def bench_workload(n):
    out = {}
    for backend, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, VALDEF_NO_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", WORKLOAD.format(n=n)], env=env,
                             capture_output=True, text=True, check=True)
        out[backend] = float(res.stdout.strip().splitlines()[-1])
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=int, default=512)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--workload", type=int, default=200, help="samples per end-to-end suite (0 to skip)")
    args = ap.parse_args()
    if not K.NUMBA_AVAILABLE:
        sys.exit("numba is not importable; nothing to compare")
    print(f"{'field':8} {'kernel':10} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for field, name, t_nb, t_np in bench_kernels(args.length, args.repeat):
        print(f"{field:8} {name:10} {t_nb * 1e3:10.3f} {t_np * 1e3:10.3f} {t_np / t_nb:8.1f}")
    if args.workload:
        w = bench_workload(args.workload)
        print(f"end-to-end chi(F_4) + folkloric(F_3), {args.workload} samples each: "
              f"numba {w['numba']:.2f} s, numpy {w['numpy']:.2f} s")


if __name__ == "__main__":
    main()
