"""Archimedean factor, functional equation, and the L(1) constant."""

import dataclasses
import math

import numpy as np
import pytest

from isobar3 import coeff_engine as ce
from isobar3 import l_eval as le
from isobar3.errors import PoleEncountered, PrecisionUnreachable, SchemesDisagree


def test_gamma_factor_data():
    fac = le.gamma_factor(12)
    assert fac.m == 3 and fac.conductor == 1
    assert fac.kappas == (0.0, 5.5, 6.5)
    assert fac.Q == pytest.approx(1.0 / (2.0 * math.pi))
    assert abs(fac.omega) == pytest.approx(1.0)
    assert fac.w == 1.0  # i^12


def test_gamma_ratio_at_center_is_one():
    assert abs(le.gamma_ratio(0.5) - 1.0) <= 1e-10


def test_gamma_unimodular_on_critical_line():
    # true for any factor of this shape (conjugate pairing), so this only
    # guards the plumbing; the asymptotic check below probes the formula
    devs = le.gamma_critical_deviations([0.5, 3.0, 17.2, 100.0, 1000.0])
    assert max(devs) <= 1e-12


def test_gamma_two_forms_agree_ten_digits():
    rng = np.random.default_rng(7)
    for _ in range(20):
        s = complex(rng.uniform(-2, 3), rng.uniform(0.5, 30))
        a = le.gamma_ratio(s)
        b = le.gamma_product(s)
        assert abs(a - b) / abs(b) <= 1e-10


def test_gamma_asymptotic_modulus():
    # |gamma(sigma - it)| ~ (t / 2 pi)^(3 (sigma - 1/2)) with a 1/t correction
    ts = [10.0 * 2 ** j for j in range(7)]
    devs = le.gamma_asymptotic_deviations(ts, 0.75)
    assert all(devs[i + 1] < devs[i] for i in range(len(devs) - 1))
    assert max(d * t for d, t in zip(devs, ts)) <= 2.0


def test_gamma_pole_rejection():
    with pytest.raises(PoleEncountered):
        le.gamma_ratio(0.0)
    with pytest.raises(PoleEncountered):
        le.gamma_ratio(-2.0)
    with pytest.raises(PoleEncountered):
        le.gamma_completed(0.0)


def test_smooth_step_shape():
    xs = np.linspace(-0.5, 1.5, 201)
    ys = le._smooth_step(xs)
    assert ys[0] == 0.0 and ys[-1] == 1.0
    assert np.all(np.diff(ys) >= 0.0)
    # exp-flat construction is exactly symmetric about 1/2
    assert np.allclose(ys + le._smooth_step(1.0 - xs), 1.0, atol=1e-15)


def test_zeta_wrapper():
    assert abs(le.zeta(2.0) - math.pi ** 2 / 6.0) <= 1e-14
    assert abs(le.zeta(0.5 + 14.134725j)) <= 1e-5  # first zero, coarse


def test_direct_sum_needs_terms(lam_small):
    with pytest.raises(PrecisionUnreachable):
        le.l_phi_direct(2.0, lam_small, n_terms=8)


def test_completed_matches_direct_in_convergence_zone(lam_small):
    # at Re s = 3 the raw Dirichlet tail is ~1e-8; the continuation must
    # land inside that of the tapered direct sum
    for s in (3.0, 3.0 + 5.0j):
        direct = le.l_phi_direct(s, lam_small)
        cont = le.completed_l_phi(s, lam_small)
        assert abs(direct - cont) / abs(cont) <= 1e-9


def test_completed_pole_rejection(lam_small):
    with pytest.raises(PoleEncountered):
        le.completed_l_phi(-5.5, lam_small)


def test_functional_equation_three_points(lam_small):
    for s in (2.0, 1.5 + 10.0j, 3.0 - 4.0j):
        rep = le.check_functional_equation(s, lam_small)
        assert rep.residual <= 1e-6
    assert le.check_functional_equation(2.0, lam_small).residual <= 1e-8


def test_functional_equation_requires_right_half(lam_small):
    with pytest.raises(ValueError):
        le.check_functional_equation(0.8, lam_small)


def test_functional_equation_detects_short_table():
    tiny = ce.normalize(ce.build_tau_table(64))
    with pytest.raises(PrecisionUnreachable, match="drift"):
        le.check_functional_equation(2.0, tiny)


def test_fe_report_json(lam_small):
    rep = le.check_functional_equation(2.0, lam_small)
    j = le.fe_report_json(rep)
    assert j["s"] == [2.0, 0.0]
    assert j["residual"] == rep.residual
    assert len(j["lhs"]) == 2 and len(j["rhs"]) == 2


def test_completed_degree3_symmetry(lam_small):
    # Lambda(s) = i^k Lambda(1-s) for the completed zeta(s) L(s) product
    w = le.gamma_factor(12).w
    for s in (0.3 + 1.5j, 2.2 - 0.7j, -1.4 + 2.3j):
        lhs = le.lambda_isobaric(s, lam_small)
        rhs = w * le.lambda_isobaric(1 - s, lam_small)
        assert abs(lhs - rhs) / abs(rhs) <= 1e-9


def test_l1_schemes_agree(lam_small):
    res = le.l1_phi(lam_small, target_digits=10)
    assert abs(res.scheme_exp - res.scheme_completed) <= 1e-10
    assert res.value == res.scheme_completed
    # stable reference value, agreed by both schemes at every table size
    assert res.value == pytest.approx(0.8393455120319422, abs=1e-9)


def test_l1_detects_corruption(lam_small):
    bad = dataclasses.replace(lam_small, values=lam_small.values.copy())
    bad.values[100] += 0.01  # seen by the M sweep, not the 26-term scheme
    with pytest.raises(SchemesDisagree):
        le.l1_phi(bad, target_digits=10)


def test_l1_requires_long_table():
    short = ce.normalize(ce.build_tau_table(4096))
    with pytest.raises(PrecisionUnreachable):
        le.l1_phi(short)


def test_golden_l1_round_trip(tmp_path, lam_small):
    res = le.l1_phi(lam_small, target_digits=10)
    path = tmp_path / "golden_l1.txt"
    le.write_golden_l1(path, res)
    text = path.read_text()
    assert text.startswith("L1 = 0.839345512031942")
    assert text.count("\n") == 4
    assert le.read_golden_l1(path) == float(f"{res.value:.15g}")
