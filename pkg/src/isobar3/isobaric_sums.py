"""Isobaric coefficients b(n) = sum of lam(m) over divisors m of n,
their partial sums A(X), the error against the linear main term, and
short-interval window statistics.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import DegenerateFit, GridOutOfRange
from .fileio import atomic_write_text


@dataclass(frozen=True)
class IsobaricTable:
    """values[n] = sum_{m | n} lam(m); values[0] = 0."""

    N: int
    weight: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.N + 1,):
            raise ValueError("values must have shape (N + 1,)")

    @cached_property
    def prefix(self):
        """prefix[X] = sum of values[1..X], compensated; prefix[0] = 0."""
        return kernels.compensated_cumsum(self.values)


@dataclass(frozen=True)
class PartialSumSeries:
    grid: np.ndarray
    A: np.ndarray
    E: np.ndarray
    L1: float


@dataclass(frozen=True)
class WindowAverage:
    X: int
    Y: float
    mean: float
    target: float


@dataclass(frozen=True)
class WindowScanReport:
    windows: list
    aggregate_mean: float
    std_error: float
    target: float
    z_score: float


def build_isobaric(lam):
    """Divisor-sieve convolution, O(N log N) additions, ascending-m order."""
    return IsobaricTable(N=lam.N, weight=lam.weight, values=kernels.divisor_sieve(lam.values))


def brute_force_isobaric(lam, n):
    """Per-n oracle: enumerate divisors of n by trial division and add lam."""
    total = 0.0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += lam.values[d]
            if d != n // d:
                total += lam.values[n // d]
        d += 1
    return total


def dyadic_grid(lo_exp, hi_exp):
    """Powers of two from 2^lo_exp through 2^hi_exp inclusive."""
    if hi_exp < lo_exp:
        raise ValueError("hi_exp must be >= lo_exp")
    return np.array([2 ** e for e in range(lo_exp, hi_exp + 1)], dtype=np.int64)


def partial_sums(tab, grid, l1):
    """A and E = A - l1*X on the given increasing integer grid."""
    grid = np.asarray(grid, dtype=np.int64)
    if grid.size == 0 or grid[0] < 1 or grid[-1] > tab.N:
        raise GridOutOfRange(f"grid must lie in [1, {tab.N}]")
    if np.any(np.diff(grid) <= 0):
        raise GridOutOfRange("grid must be strictly increasing")
    A = tab.prefix[grid]
    E = A - l1 * grid.astype(np.float64)
    return PartialSumSeries(grid=grid, A=A, E=E, L1=float(l1))


def fit_error_exponent(series, floor=1e-12):
    """Least-squares slope of log |E| against log X.

    Points with |E| below floor*X carry no exponent information and are
    dropped; fewer than three survivors is a degenerate fit.
    """
    if series.grid.size < 8:
        raise DegenerateFit("need at least 8 grid points")
    x = series.grid.astype(np.float64)
    absE = np.abs(series.E)
    mask = absE >= floor * x
    if int(mask.sum()) < 3:
        raise DegenerateFit("fewer than 3 usable points after the floor cut")
    lx = np.log(x[mask])
    ly = np.log(absE[mask])
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def sqrt_ratio_trend(series):
    """Quartile trend of |E(X)| / X^0.5 over the series grid.

    Returns (first_quartile_mean, last_quartile_mean, ratio); a ratio near
    or below 1 means no growth beyond the square-root envelope.
    """
    r = np.abs(series.E) / np.sqrt(series.grid.astype(np.float64))
    q = max(1, r.size // 4)
    first = float(np.mean(r[:q]))
    last = float(np.mean(r[-q:]))
    return first, last, last / first


def window_average(tab, x, y, target):
    """Mean of values over the window (x, x+y], normalized by real length y."""
    if y < 1.0:
        raise GridOutOfRange("window length must be at least 1")
    if x < 0 or x + y > tab.N:
        raise GridOutOfRange(f"window ({x}, {x + y}] does not fit in [1, {tab.N}]")
    hi = int(math.floor(x + y))
    total = tab.prefix[hi] - (tab.prefix[x] if x >= 1 else 0.0)
    return WindowAverage(X=int(x), Y=float(y), mean=total / y, target=float(target))


def short_interval_scan(tab, exponent, count, target, x_lo=None, x_hi=None, seed=0):
    """Window means at `count` random starts X with Y = X^exponent.

    Start points are drawn uniformly from [x_lo, x_hi]; the aggregate mean
    is compared to `target` in standard-error units.
    """
    if not 0.0 < exponent < 1.0:
        raise ValueError("exponent must be in (0, 1)")
    if x_lo is None:
        x_lo = tab.N // 4
    if x_hi is None:
        x_hi = tab.N // 2
    if not 1 <= x_lo <= x_hi:
        raise GridOutOfRange("bad start range")
    if x_hi + x_hi ** exponent > tab.N:
        raise GridOutOfRange("largest window would overrun the table")
    rng = np.random.default_rng(seed)
    starts = rng.integers(x_lo, x_hi + 1, size=count)
    windows = [window_average(tab, int(x), float(x) ** exponent, target) for x in starts]
    means = np.array([w.mean for w in windows])
    agg = float(means.mean())
    se = float(means.std(ddof=1) / math.sqrt(count)) if count > 1 else float("inf")
    z = (agg - target) / se if se > 0 else 0.0
    return WindowScanReport(
        windows=windows,
        aggregate_mean=agg,
        std_error=se,
        target=float(target),
        z_score=float(z),
    )


def write_series_csv(series, path):
    """Rows "X,A,E" with floats at 17 significant digits."""
    lines = ["X,A,E\n"]
    for x, a, e in zip(series.grid, series.A, series.E):
        lines.append(f"{int(x)},{a:.17g},{e:.17g}\n")
    atomic_write_text(path, "".join(lines))


def write_windows_csv(windows, path):
    """Rows "X,Y,mean" with floats at 17 significant digits."""
    lines = ["X,Y,mean\n"]
    for w in windows:
        lines.append(f"{w.X},{w.Y:.17g},{w.mean:.17g}\n")
    atomic_write_text(path, "".join(lines))
