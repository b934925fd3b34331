"""Pure-Python kernels (numpy slicing plus exact block sums).

Both kernels reproduce the accumulation order of the compiled versions:
the sieve adds divisor contributions in ascending m per element, so the
two backends agree bit for bit; the cumulative sum is compensated at
block level with exactly rounded block totals.
"""

import math

import numpy as np


def divisor_sieve(lam):
    """out[n] = sum of lam[m] over divisors m of n, for n = 1..N.

    lam is a float64 array of length N+1 with lam[0] ignored.  Small m are
    handled one stride per divisor; large m are grouped by multiple count r
    (all m in (N//(r+1), N//r] have exactly r multiples), which keeps the
    number of numpy calls near N^(2/3) instead of N.
    """
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    N = lam.shape[0] - 1
    out = np.zeros_like(lam)
    if N < 1:
        return out
    cut = min(N, int(round(N ** (2.0 / 3.0))) + 1)
    for m in range(1, cut + 1):
        out[m::m] += lam[m]
    # blocks in ascending m, and t descending inside a block, preserve
    # ascending-divisor accumulation order for every element
    for r in range(N // (cut + 1), 0, -1):
        lo = max(N // (r + 1) + 1, cut + 1)
        hi = N // r
        if lo > hi:
            continue
        seg = lam[lo:hi + 1]
        for t in range(r, 0, -1):
            out[t * lo:t * hi + 1:t] += seg
    return out


def compensated_cumsum(x):
    """Running sums of x with block-level compensation.

    Block totals come from math.fsum (exactly rounded) and are carried in a
    two-term (high, low) accumulator, so the running offset stays within a
    few ulp of the true prefix regardless of length.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    block = 4096
    s = 0.0
    c = 0.0
    for i in range(0, n, block):
        seg = x[i:i + block]
        np.cumsum(seg, out=out[i:i + block])
        out[i:i + block] += s + c
        bs = math.fsum(seg)
        t = s + bs
        if abs(s) >= abs(bs):
            c += (s - t) + bs
        else:
            c += (bs - t) + s
        s = t
    return out
