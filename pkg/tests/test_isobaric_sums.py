"""Convolution table, partial sums, exponent fit, and window statistics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isobar3 import coeff_engine as ce
from isobar3 import isobaric_sums as iso
from isobar3.errors import DegenerateFit, GridOutOfRange


def test_convolution_matches_trial_division(lam_small, iso_small):
    rng = np.random.default_rng(0)
    for n in list(range(1, 64)) + list(rng.integers(64, lam_small.N, size=200)):
        n = int(n)
        brute = iso.brute_force_isobaric(lam_small, n)
        assert iso_small.values[n] == pytest.approx(brute, rel=1e-12, abs=1e-12)


def test_first_values_by_hand(lam_small, iso_small):
    v = lam_small.values
    assert iso_small.values[1] == v[1]
    assert iso_small.values[2] == pytest.approx(v[1] + v[2], rel=1e-15)
    assert iso_small.values[6] == pytest.approx(v[1] + v[2] + v[3] + v[6], rel=1e-14)


def test_prefix_matches_fsum(iso_small):
    upto = 3000
    oracle = [math.fsum(iso_small.values[1:i + 1]) for i in (1, 17, 256, upto)]
    for target, i in zip(oracle, (1, 17, 256, upto)):
        assert iso_small.prefix[i] == pytest.approx(target, rel=1e-13, abs=1e-13)


def test_partial_sums_definition(iso_small):
    grid = np.array([1, 10, 100, 1000], dtype=np.int64)
    series = iso.partial_sums(iso_small, grid, 0.8)
    assert np.array_equal(series.grid, grid)
    assert series.E == pytest.approx(series.A - 0.8 * grid)


def test_partial_sums_rejects_bad_grids(iso_small):
    with pytest.raises(GridOutOfRange):
        iso.partial_sums(iso_small, np.array([0, 10]), 0.8)
    with pytest.raises(GridOutOfRange):
        iso.partial_sums(iso_small, np.array([10, 10 ** 9]), 0.8)
    with pytest.raises(GridOutOfRange):
        iso.partial_sums(iso_small, np.array([10, 10]), 0.8)


def test_dyadic_grid():
    g = iso.dyadic_grid(3, 7)
    assert list(g) == [8, 16, 32, 64, 128]
    with pytest.raises(ValueError):
        iso.dyadic_grid(5, 4)


def test_fit_error_exponent_recovers_powers():
    # synthetic series |E| = X^0.37 must fit its own exponent
    grid = iso.dyadic_grid(4, 16)
    x = grid.astype(np.float64)
    series = iso.PartialSumSeries(grid=grid, A=x ** 0.37, E=x ** 0.37, L1=0.0)
    slope, _, r2 = iso.fit_error_exponent(series)
    assert slope == pytest.approx(0.37, abs=1e-9)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_fit_degenerate_paths():
    grid = iso.dyadic_grid(4, 8)
    x = grid.astype(np.float64)
    with pytest.raises(DegenerateFit, match="8 grid points"):
        iso.fit_error_exponent(
            iso.PartialSumSeries(grid=grid, A=x, E=x, L1=0.0)
        )
    grid = iso.dyadic_grid(4, 12)
    zeros = np.zeros(grid.size)
    with pytest.raises(DegenerateFit, match="usable points"):
        iso.fit_error_exponent(
            iso.PartialSumSeries(grid=grid, A=zeros, E=zeros, L1=0.0)
        )


def test_sqrt_ratio_trend_flags_growth():
    grid = iso.dyadic_grid(4, 15)
    x = grid.astype(np.float64)
    flat = iso.PartialSumSeries(grid=grid, A=x, E=np.sqrt(x), L1=0.0)
    first, last, ratio = iso.sqrt_ratio_trend(flat)
    assert ratio == pytest.approx(1.0, abs=1e-12)
    growing = iso.PartialSumSeries(grid=grid, A=x, E=x ** 0.8, L1=0.0)
    _, _, ratio_g = iso.sqrt_ratio_trend(growing)
    assert ratio_g > 2.0


def test_window_average_by_hand(iso_small):
    w = iso.window_average(iso_small, 100, 10.0, 0.8)
    direct = float(np.sum(iso_small.values[101:111])) / 10.0
    assert w.mean == pytest.approx(direct, rel=1e-12)
    assert w.X == 100 and w.Y == 10.0 and w.target == 0.8


def test_window_average_bounds(iso_small):
    with pytest.raises(GridOutOfRange):
        iso.window_average(iso_small, iso_small.N - 1, 5.0, 0.0)
    with pytest.raises(GridOutOfRange):
        iso.window_average(iso_small, 10, 0.5, 0.0)


def test_scan_is_reproducible(iso_small, golden_l1):
    a = iso.short_interval_scan(iso_small, 0.495, 40, golden_l1.value, seed=5)
    b = iso.short_interval_scan(iso_small, 0.495, 40, golden_l1.value, seed=5)
    assert a.aggregate_mean == b.aggregate_mean
    assert a.z_score == b.z_score
    c = iso.short_interval_scan(iso_small, 0.495, 40, golden_l1.value, seed=6)
    assert c.aggregate_mean != a.aggregate_mean


def test_scan_overrun_guard(iso_small):
    with pytest.raises(GridOutOfRange):
        iso.short_interval_scan(
            iso_small, 0.9, 10, 0.8, x_lo=iso_small.N - 10, x_hi=iso_small.N - 5
        )


def test_csv_writers(tmp_path, iso_small, golden_l1):
    grid = iso.dyadic_grid(4, 12)
    series = iso.partial_sums(iso_small, grid, golden_l1.value)
    p1 = str(tmp_path / "series.csv")
    iso.write_series_csv(series, p1)
    lines = open(p1).read().splitlines()
    assert lines[0] == "X,A,E"
    assert len(lines) == grid.size + 1
    x0, a0, e0 = lines[1].split(",")
    assert int(x0) == 16
    assert float(a0) == pytest.approx(series.A[0])

    rep = iso.short_interval_scan(iso_small, 0.495, 10, golden_l1.value, seed=0)
    p2 = str(tmp_path / "win.csv")
    iso.write_windows_csv(rep.windows, p2)
    lines = open(p2).read().splitlines()
    assert lines[0] == "X,Y,mean"
    assert len(lines) == 11


@given(st.integers(min_value=1, max_value=500), st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=150, deadline=None)
def test_convolution_property_small(n, seed):
    lam = _CACHE.setdefault("lam", ce.normalize(ce.build_tau_table(500)))
    tab = _CACHE.setdefault("tab", iso.build_isobaric(lam))
    assert tab.values[n] == pytest.approx(
        iso.brute_force_isobaric(lam, n), rel=1e-12, abs=1e-12
    )


_CACHE = {}
