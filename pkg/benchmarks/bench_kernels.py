"""Timing comparison of the compiled and pure-python kernel backends.

Run as `python benchmarks/bench_kernels.py [max_exp]`; builds one shared
coefficient table, then times divisor_sieve and compensated_cumsum from
both backends at a few table lengths and prints a small table.  The sieve
outputs must agree bit-for-bit (same accumulation order by construction);
the cumsums agree to a 1e-12 relative envelope, each being ulp-accurate.
"""

import sys
import time

import numpy as np

from isobar3 import coeff_engine
from isobar3.kernels import _pure

try:
    from isobar3.kernels import _fast
except ImportError:
    _fast = None


def timed(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    max_exp = int(sys.argv[1]) if len(sys.argv) > 1 else 21
    sizes = [2 ** e for e in range(16, max_exp + 1, 2)]
    lam_full = coeff_engine.normalize(coeff_engine.build_tau_table(sizes[-1]))

    print(f"{'N':>10}  {'sieve pure':>11}  {'sieve fast':>11}  "
          f"{'cumsum pure':>12}  {'cumsum fast':>12}")
    for n in sizes:
        lam = lam_full.values[: n + 1]
        tp, out_p = timed(_pure.divisor_sieve, lam)
        row = [f"{n:>10}", f"{tp:>10.3f}s"]
        if _fast is not None:
            tf, out_f = timed(_fast.divisor_sieve, lam)
            assert np.array_equal(out_p, out_f), "backend sieve mismatch"
            row.append(f"{tf:>10.3f}s")
        else:
            row.append(f"{'n/a':>11}")
        tcp, cs_p = timed(_pure.compensated_cumsum, out_p)
        row.append(f"{tcp:>11.3f}s")
        if _fast is not None:
            tcf, cs_f = timed(_fast.compensated_cumsum, out_p)
            scale = np.max(np.abs(cs_p)) + 1.0
            assert np.max(np.abs(cs_p - cs_f)) < 1e-12 * scale, "cumsum mismatch"
            row.append(f"{tcf:>11.3f}s")
        else:
            row.append(f"{'n/a':>12}")
        print("  ".join(row))


if __name__ == "__main__":
    main()
