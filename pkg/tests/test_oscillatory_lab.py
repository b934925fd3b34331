"""Smooth windows, Mellin decay, stationary phase, and bilinear probes."""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from isobar3 import exponent_calculus as ec
from isobar3 import oscillatory_lab as ol
from isobar3.errors import (
    BadGeometry,
    NoStationaryPoint,
    SelfCheckFailed,
    TableTooShort,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# bump and window

def test_bump_basics():
    assert ol.bump(0.0) == pytest.approx(math.exp(-1.0))
    assert ol.bump(1.0) == 0.0 and ol.bump(-1.0) == 0.0
    assert ol.bump(5.0) == 0.0
    assert 0.43 < ol.BUMP_MASS < 0.45


def test_bump_deriv_matches_finite_differences():
    # each order differentiates the previous one; worst case sits near the
    # support edge where the polynomial prefactor is largest
    h = 1e-5
    for m in range(1, 5):
        for u in (0.3, -0.62, 0.85, 0.05):
            fd = (ol.bump_deriv(u + h, m - 1) - ol.bump_deriv(u - h, m - 1)) / (2 * h)
            ex = float(ol.bump_deriv(np.array([u]), m)[0])
            assert abs(fd - ex) <= 1e-4 * max(1.0, abs(ex))


def test_bump_deriv_vanishes_at_edges():
    for m in range(1, 5):
        edge = ol.bump_deriv(np.array([-1.0, 1.0, 1.5, -0.999999]), m)
        assert np.max(np.abs(edge)) <= 1e-200


def test_bump_cdf_endpoints_and_monotonicity():
    u = np.linspace(-1.2, 1.2, 401)
    cdf = ol.bump_cdf(u)
    assert cdf[0] == 0.0 and cdf[-1] == 1.0
    assert float(ol.bump_cdf(0.0)) == pytest.approx(0.5, abs=1e-12)
    assert np.all(np.diff(cdf) >= -1e-15)


def test_make_window_geometry_guard():
    with pytest.raises(BadGeometry):
        ol.make_window(100.0, 25.0)
    with pytest.raises(BadGeometry):
        ol.make_window(100.0, 0.0)
    with pytest.raises(BadGeometry):
        ol.make_window(100.0, -1.0)


def test_window_values():
    w = ol.make_window(1e6, 1e3)
    assert w.ramp == 1e-3
    assert w.support == (0.5 - 1e-3, 1.0 + 1e-3)
    assert float(w.value(0.75)) == 1.0
    assert float(w.value(0.5)) == 1.0 and float(w.value(1.0)) == 1.0
    assert np.all(w.value(np.array([0.498, 1.002, 0.1, 3.0])) == 0.0)
    # ramp midpoints sit at half height by symmetry of the bump
    assert float(w.value(0.5 - w.ramp / 2)) == pytest.approx(0.5, abs=1e-9)
    assert float(w.value(1.0 + w.ramp / 2)) == pytest.approx(0.5, abs=1e-9)
    up = w.value(np.linspace(0.499, 0.5, 300))
    assert np.all(np.diff(up) >= 0.0)
    assert w(0.75) == w.value(0.75)


def test_window_derivative_bounds():
    # resampling the ramp cannot beat the recorded constants by more than
    # grid slack, and the first-order constant is of unit size
    w = ol.make_window(1e6, 1e3)
    xs = np.linspace(0.5 - w.ramp, 0.5, 30011)[1:-1]
    for j in range(1, 5):
        peak = float(np.max(np.abs(w.deriv(xs, j))))
        assert peak <= 1.01 * w.c[j - 1] * (w.X / w.Y) ** j
        assert peak >= 0.1 * (w.X / w.Y) ** j
    assert 0.5 <= w.c[0] <= 20.0
    with pytest.raises(ValueError):
        w.deriv(0.75, 5)


def test_window_derivative_sign_structure():
    w = ol.make_window(1e4, 100.0)
    assert float(w.deriv(0.5 - w.ramp / 2, 1)) > 0.0
    assert float(w.deriv(1.0 + w.ramp / 2, 1)) < 0.0
    assert float(w.deriv(0.75, 1)) == 0.0


# ---------------------------------------------------------------------------
# Mellin transform

def test_mellin_against_by_parts_oracle():
    w = ol.make_window(1e6, 1e3)
    for s in (2.0, 0.5 + 3.0j, -0.01 + 8.0j):
        a = ol.mellin(w, s)
        b = ol.mellin_by_parts(w, s)
        assert abs(a - b) / abs(b) <= 1e-9


def test_mellin_at_one_is_exact_plateau_plus_ramp():
    # each ramp integrates to half its width, so W-tilde(1) = 1/2 + Y/X
    for ratio in (1e-2, 1e-3):
        w = ol.make_window(1.0, ratio)
        w1 = ol.mellin(w, 1.0).real
        assert abs(w1 - 0.5 - ratio) <= 1e-12


def test_mellin_decay_check_report():
    w = ol.make_window(1.0, 1e-2)
    samples = [complex(-0.01, 4.0 * 2 ** j) for j in range(7)]
    rep = ol.mellin_decay_check(w, samples)
    assert abs(rep["w1"] - 0.5) <= 5.0 * w.ramp
    assert rep["ramp"] == w.ramp
    assert len(rep["samples"]) == 7
    assert rep["fitted_c"][1] <= 10.0
    assert rep["fitted_c"][2] <= 10.0


def test_mellin_octave_envelope_halves():
    # |W-tilde| oscillates through nodes, so pointwise doubling ratios are
    # meaningless; the octave envelope must drop by at least 1/sqrt(2)-ish
    # per octave (k=1 regime gives 1/2, k=2 a quarter)
    w = ol.make_window(1.0, 1e-2)
    envs = []
    for j in range(7):
        t0 = 8.0 * 2 ** j
        ts = t0 * 2 ** np.linspace(0.0, 1.0, 9, endpoint=False)
        envs.append(max(abs(ol.mellin(w, 1.0 + 1j * t)) for t in ts))
    for lo, hi in zip(envs, envs[1:]):
        assert hi <= 0.7 * lo


def test_mellin_by_parts_rejects_origin():
    w = ol.make_window(1.0, 1e-2)
    with pytest.raises(ValueError):
        ol.mellin_by_parts(w, 0.0)


# ---------------------------------------------------------------------------
# stationary phase

def test_stationary_point_unit_data():
    assert ol.stationary_point(1, 1.0, TWO_PI) == 1.0


def test_phase_derivative_is_logarithmic():
    n, X, T = 3, 50.0, 200.0
    xi0 = ol.stationary_point(n, X, T)
    h = 1e-6
    for xi in (0.4, 0.9, 1.6):
        fd = (ol.phase_h(xi + h, n, X, T) - ol.phase_h(xi - h, n, X, T)) / (2 * h)
        assert fd == pytest.approx(3.0 * T * math.log(xi0 / xi), rel=1e-6)


def test_stationary_phase_envelope_shrinks():
    prev = None
    for T in (100.0, 200.0, 400.0):
        X = (T / TWO_PI) ** 3  # puts xi0 = 1 for n = 1
        numeric, leading, rel_err = ol.stationary_phase_check(1, X, T)
        assert abs(leading) == pytest.approx(
            math.sqrt(TWO_PI / (3.0 * T)) * math.exp(-1.0), rel=1e-12
        )
        assert rel_err <= 2.0 / T
        if prev is not None:
            assert rel_err < prev
        prev = rel_err


def test_stationary_phase_density_doubling():
    T = 150.0
    X = (T / TWO_PI) ** 3
    base, _, _ = ol.stationary_phase_check(1, X, T)
    fine, _, _ = ol.stationary_phase_check(1, X, T, density=2.0)
    assert abs(fine - base) / abs(base) <= 1e-8


def test_stationary_phase_requires_asymptotic_T():
    with pytest.raises(ValueError):
        ol.stationary_phase_check(1, 1.0, 10.0)


def test_no_stationary_point_is_negligible():
    # xi0 = 2 pi / T = 0.063 sits far left of the support [1/4, 7/4]
    with pytest.raises(NoStationaryPoint) as exc:
        ol.stationary_phase_check(1, 1.0, 100.0)
    assert abs(exc.value.numeric) <= 1e-8 * exc.value.bump_mass


# ---------------------------------------------------------------------------
# bilinear probes

def test_inner_sum_single_term_is_unimodular():
    for m, X in ((1, 1.0), (17, 1e4), (123, 3.5)):
        assert abs(ol.inner_exp_sum(m, X, 1)) == pytest.approx(1.0)


def test_inner_sum_flat_control_counts_terms():
    for L in (1, 8, 57):
        assert ol.inner_exp_sum(5, 1e4, L, flat=True) == complex(L, 0.0)


def test_make_probe_guards():
    with pytest.raises(BadGeometry):
        ol.make_probe(1e4, 120.0, 0)
    with pytest.raises(BadGeometry):
        ol.make_probe(1e6, 100.0, 1)  # M = T^3/(X L) = 1 < 2
    probe = ol.make_probe(1e4, 120.0, 2)
    assert probe.M == pytest.approx(120.0 ** 3 / (1e4 * 2))
    m_lo, m_hi = probe.m_range
    assert m_lo == math.ceil(probe.M / 2) and m_hi == math.floor(1.5 * probe.M)
    assert probe.n_range == (2 * m_lo, 3 * m_hi)


def test_probe_rejects_inconsistent_forced_M(lam_small):
    pair = ec.a_process(ec.BOURGAIN)
    probe = ol.make_probe(1e4, 120.0, 1, M=1e4)  # LM is 58x off T^3/X
    with pytest.raises(BadGeometry, match="factor 8"):
        ol.exp_sum_probe(probe, lam_small, pair)


def test_probe_rejects_short_table(lam_small):
    pair = ec.a_process(ec.BOURGAIN)
    probe = ol.make_probe(1.0, 50.0, 1)  # M = 125000 beyond N = 16384
    with pytest.raises(TableTooShort):
        ol.exp_sum_probe(probe, lam_small, pair)


def test_probe_sweep_stays_under_prediction(lam_small):
    pair = ec.a_process(ec.BOURGAIN)
    X, T = 1e4, 120.0
    L_values = [2 ** j for j in range(7) if T ** 3 / (X * 2 ** j) >= 2.0]
    rep = ol.probe_sweep(X, T, L_values, lam_small, pair)
    assert rep["max_ratio"] <= 10.0
    assert len(rep["rows"]) == len(L_values)
    assert rep["advisory_slope"] == pytest.approx(float(pair.q - pair.p))
    assert rep["inner_slope"] is not None
    for row in rep["rows"]:
        assert row["measured"] >= 0.0 and row["predicted"] > 0.0


def test_probe_sweep_flags_absurd_prediction(lam_small):
    # a nonsense exponent pair drives the prediction to zero; the sweep
    # must refuse rather than report a silently huge ratio
    fake = SimpleNamespace(p=-5.0, q=-5.0)
    with pytest.raises(SelfCheckFailed):
        ol.probe_sweep(1e4, 120.0, [1, 2, 4], lam_small, fake)


def test_write_probe_csv(tmp_path, lam_small):
    pair = ec.a_process(ec.BOURGAIN)
    rep = ol.probe_sweep(1e4, 120.0, [1, 2, 4], lam_small, pair)
    path = tmp_path / "probe.csv"
    ol.write_probe_csv(path, rep["rows"])
    lines = path.read_text().splitlines()
    assert lines[0] == "L,measured,predicted,ratio"
    assert len(lines) == 4
    assert float(lines[1].split(",")[3]) == pytest.approx(rep["rows"][0]["ratio"])


# ---------------------------------------------------------------------------
# dyadic partition and truncation

def test_dyadic_partition_sums_to_one():
    assert ol.dyadic_partition_check(4.0, 1e6) <= 1e-12


def test_dyadic_partition_on_truncation_range():
    # the range the decomposition is actually used on: [Y^(2/3), X/Y]
    X, Y = 1e6, 1e3
    assert ol.dyadic_partition_check(Y ** (2.0 / 3.0), X / Y) <= 1e-12


def test_dyadic_piece_is_a_unit_bump():
    x = np.geomspace(0.5, 64.0, 500)
    piece = ol.dyadic_piece(x, 2)
    assert np.all(piece >= 0.0) and np.all(piece <= 1.0)
    # supported on (2^(j-1), 2^(j+1)) with its plateau point at 2^j
    assert float(ol.dyadic_piece(np.array([4.0]), 2)[0]) == 1.0
    assert float(ol.dyadic_piece(np.array([4.0 * 2 ** 0.5]), 2)[0]) == pytest.approx(0.5)
    assert float(ol.dyadic_piece(np.array([1.9]), 2)[0]) == 0.0
    assert float(ol.dyadic_piece(np.array([17.0]), 2)[0]) == 0.0


def test_dyadic_partition_check_rejects_bad_range():
    with pytest.raises(BadGeometry):
        ol.dyadic_partition_check(10.0, 2.0)


def test_truncation_emptiness_against_table():
    X, N = 1e8, 4096
    Y = X ** 0.495
    t_lo, t_hi = ol.truncation_range(X, Y)
    assert t_lo == pytest.approx(X ** (1.0 / 3.0 - 0.01))
    # above the upper cutoff the n-window has already left the table
    for f in (1.0, 2.0, 8.0):
        assert ol.n_window_empty(X, t_hi * f, N)
    # inside the range it is occupied
    assert not ol.n_window_empty(X, math.sqrt(t_lo * t_hi), N)
    # below the lower cutoff the window drops under n = 1; the epsilon
    # trim absorbs the spread constant only asymptotically, so desk scale
    # needs a factor-2 step while X = 1e30 is empty at the cutoff itself
    assert ol.n_window_empty(X, t_lo / 2.0, N)
    big = 1e30
    bt_lo, _ = ol.truncation_range(big, big ** 0.495)
    assert ol.n_window_empty(big, bt_lo, 2 ** 60)
