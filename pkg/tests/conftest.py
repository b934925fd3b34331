"""Shared fixtures.  Tables are session-scoped: the 2^22 build costs ~10 s
and feeds the fit, window, and functional-equation tests; everything else
runs on small tables."""

import pytest

from isobar3 import coeff_engine as ce
from isobar3 import isobaric_sums as iso
from isobar3 import l_eval


@pytest.fixture(scope="session")
def tau_small():
    return ce.build_tau_table(16384)


@pytest.fixture(scope="session")
def lam_small(tau_small):
    return ce.normalize(tau_small)


@pytest.fixture(scope="session")
def iso_small(lam_small):
    return iso.build_isobaric(lam_small)


@pytest.fixture(scope="session")
def tau_100k():
    return ce.build_tau_table(10 ** 5)


@pytest.fixture(scope="session")
def lam_fit():
    return ce.normalize(ce.build_tau_table(2 ** 22))


@pytest.fixture(scope="session")
def iso_fit(lam_fit):
    return iso.build_isobaric(lam_fit)


@pytest.fixture(scope="session")
def golden_l1(lam_fit):
    return l_eval.l1_phi(lam_fit, target_digits=10)
