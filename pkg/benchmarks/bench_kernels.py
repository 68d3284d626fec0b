"""Compare the numba kernels with their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]

Kernel timings call both implementations directly in one process (after a
warm-up call so JIT compilation is excluded).  ``--end-to-end`` also times a
few library workloads in subprocesses with EXZEROS_NUMBA=1 and =0.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from exzeros import _kernels as K

WORKLOADS = {
    "compute_BN q=4 N=682": "from exzeros import bnpoly; from exzeros.gfq import field_from_q; bnpoly.compute_BN(682, field_from_q(4))",
    "digit principle q=3 N=43": "from exzeros import digits; from exzeros.gfq import field_from_q; digits.verify_digit_principle(43, 20, field_from_q(3))",
    "power sums q=5 d=3 N=200": "from exzeros import powersums as ps; from exzeros.gfq import field_from_q; F = field_from_q(5); ps.power_sums_bruteforce(3, 200, [(1, 2, 3)] * 20, F)",
}


def cases(rng):
    p = 3
    a = rng.integers(0, p, 4000)
    b = rng.integers(0, p, 4000)
    A = rng.integers(0, p, (60, 200))
    B = rng.integers(0, p, (60, 200))
    X = rng.integers(0, p, (400, 256))
    Y = rng.integers(0, p, (400, 256))
    idx = rng.integers(0, 5000, 200_000)
    vals = rng.integers(0, p, 200_000)
    num = rng.integers(0, p, 3000)
    den = rng.integers(0, p, 400)
    den[-1] = 1
    return {
        "conv_mod": ((a, b, p), {}),
        "conv2d_trunc_mod": ((A, B, p, 80), {}),
        "divmod_mod": ((num, den, p, 1), {}),
        "batch_conv_sum_mod": ((X, Y, p, 256), {}),
        "batch_series_mul_mod": ((X, Y, p, 256), {}),
        "scatter_add_mod": ((idx, vals, p, 5000), {}),
    }


def _equal(x, y):
    if isinstance(x, tuple):
        return all(np.array_equal(a, b) for a, b in zip(x, y))
    return np.array_equal(x, y)


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for name, (args, kw) in cases(rng).items():
        fnp = getattr(K, name + "_np")
        fnb = getattr(K, name + "_nb", None) if K.HAVE_NUMBA else None
        tn = min(timeit.repeat(lambda: fnp(*args, **kw), number=1, repeat=repeat))
        if fnb is not None:
            fnb(*args, **kw)  # compile
            tb = min(timeit.repeat(lambda: fnb(*args, **kw), number=1, repeat=repeat))
            same = _equal(fnp(*args, **kw), fnb(*args, **kw))
        else:
            tb, same = float("nan"), True
        rows.append((name, tn, tb, same))
    print(f"{'kernel':24s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}  equal")
    for name, tn, tb, same in rows:
        print(f"{name:24s} {tn * 1e3:10.2f} {tb * 1e3:10.2f} {tn / tb:8.1f}  {same}")


def bench_end_to_end():
    print(f"\n{'workload':28s} {'numba s':>8s} {'numpy s':>8s}")
    for label, code in WORKLOADS.items():
        times = []
        for flag in ("1", "0"):
            env = dict(os.environ, EXZEROS_NUMBA=flag)
            prog = f"import time; t = time.perf_counter(); {code}; print(time.perf_counter() - t)"
            out = subprocess.run([sys.executable, "-c", prog], env=env, capture_output=True, text=True, check=True)
            times.append(float(out.stdout.strip().splitlines()[-1]))
        print(f"{label:28s} {times[0]:8.2f} {times[1]:8.2f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args()
    print(f"backend selected by environment: {K.backend()}")
    bench_kernels(args.repeat)
    if args.end_to_end:
        bench_end_to_end()


if __name__ == "__main__":
    main()
