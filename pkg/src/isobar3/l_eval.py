"""L-function evaluation: the archimedean factor of the degree-3 product,
the functional-equation check, and the constant L(1) of the main term.

Conventions.  lam(n) are the analytically normalized eigenvalues, so
L(s) = sum lam(n) n^(-s) converges for Re s > 1 and the degree-3 series
zeta(s) L(s) has a simple pole at s = 1 with residue L(1).  The reflection
factor gamma(s) relates the degree-3 function at 1-s to itself at s via
L(1-s) = w gamma(s) L(s) with w = i^k.
"""

import cmath
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import loggamma

from .errors import PoleEncountered, PrecisionUnreachable, SchemesDisagree
from .fileio import atomic_write_text

TWO_PI = 2.0 * math.pi
_LOG_PI = math.log(math.pi)
_LOG_2PI = math.log(TWO_PI)


@dataclass(frozen=True)
class GammaFactor:
    """Archimedean data of the degree-3 product: three half-integer shifts."""

    m: int
    conductor: int
    kappas: tuple
    Q: float
    omega: complex
    w: complex


def gamma_factor(weight=12):
    k = weight
    return GammaFactor(
        m=3,
        conductor=1,
        kappas=(0.0, (k - 1) / 2.0, (k + 1) / 2.0),
        Q=1.0 / TWO_PI,
        omega=cmath.exp(2j * math.pi * (2 * k - 3) / 8.0),
        w=complex((-1) ** (k // 2), 0.0),  # i^k for even k
    )


def _reject_pole(z):
    z = complex(z)
    if abs(z.imag) < 1e-12 and z.real < 0.5:
        r = round(z.real)
        if r <= 0 and abs(z.real - r) < 1e-12:
            raise PoleEncountered(f"gamma argument {z} is a nonpositive integer")


def gamma_ratio(s, weight=12):
    """Reflection factor as a ratio of four gamma values.

    gamma(s) = pi^(1/2-s) (2 pi)^(1-2s)
               * G(s/2) / G((1-s)/2) * G(s+(k-1)/2) / G(1-s+(k-1)/2),
    evaluated through log-gamma differences to keep the size balanced.
    """
    s = complex(s)
    a = (weight - 1) / 2.0
    _reject_pole(s / 2)
    _reject_pole(s + a)
    lg = (
        loggamma(s / 2)
        - loggamma((1 - s) / 2)
        + loggamma(s + a)
        - loggamma(1 - s + a)
    )
    pref = (0.5 - s) * _LOG_PI + (1 - 2 * s) * _LOG_2PI
    return complex(cmath.exp(pref + lg))


def gamma_product(s, weight=12):
    """Same factor in the three-shift product form.

    gamma(s) = (pi^-3)^(s-1/2) * prod_j G((s+kappa_j)/2) / G((1-s+kappa_j)/2)
    with kappa = (0, (k-1)/2, (k+1)/2).  Must agree with gamma_ratio to
    ten digits wherever both are finite.
    """
    s = complex(s)
    fac = gamma_factor(weight)
    lg = 0.0 + 0.0j
    for kap in fac.kappas:
        _reject_pole((s + kap) / 2)
        lg += loggamma((s + kap) / 2) - loggamma((1 - s + kap) / 2)
    pref = -3.0 * (s - 0.5) * _LOG_PI
    return complex(cmath.exp(pref + lg))


def gamma_completed(s, weight=12):
    """Unreflected archimedean factor pi^(-3s/2) prod_j G((s+kappa_j)/2)."""
    s = complex(s)
    fac = gamma_factor(weight)
    lg = 0.0 + 0.0j
    for kap in fac.kappas:
        _reject_pole((s + kap) / 2)
        lg += loggamma((s + kap) / 2)
    return complex(cmath.exp(-1.5 * s * _LOG_PI + lg))


def gamma_critical_deviations(ts, weight=12):
    """|gamma(1/2 - it)| - 1 in absolute value for each t.

    On the half line the factor is exactly unimodular (each gamma ratio
    pairs an argument with its conjugate), so anything here is rounding.
    """
    return [abs(abs(gamma_ratio(0.5 - 1j * t, weight)) - 1.0) for t in ts]


def gamma_asymptotic_deviations(ts, sigma, weight=12):
    """Deviation of |gamma(sigma - it)| from (Q t)^(3(sigma - 1/2)).

    The asymptotic modulus has a 1/t-size correction; the fitted constant
    max(dev * t) should stay small and the deviation should shrink in t.
    """
    q = 1.0 / TWO_PI
    devs = []
    for t in ts:
        mod = abs(gamma_ratio(sigma - 1j * t, weight))
        devs.append(abs(mod / (q * t) ** (3 * (sigma - 0.5)) - 1.0))
    return devs


# ---------------------------------------------------------------------------
# Dirichlet-series evaluations

def _smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, exp-flat at both ends."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    out[x >= 1.0] = 1.0
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    with np.errstate(over="ignore"):
        fa = np.exp(-1.0 / xi)
        fb = np.exp(-1.0 / (1.0 - xi))
    out[inner] = fa / (fa + fb)
    return out


def l_phi_direct(s, lam, n_terms=None):
    """Tapered Dirichlet sum of lam(n) n^(-s); honest only for Re s > 1.

    The second half of the range is damped by a smooth step so the
    truncation error rides on coefficient cancellation instead of the
    raw tail.
    """
    s = complex(s)
    N = lam.N if n_terms is None else min(n_terms, lam.N)
    if N < 16:
        raise PrecisionUnreachable("need at least 16 coefficients")
    n = np.arange(1, N + 1, dtype=np.float64)
    weights = _smooth_step((N - n) / (N / 2.0))
    terms = lam.values[1:N + 1] * weights * np.exp(-s * np.log(n))
    return complex(terms.sum())


def _auto_terms(dps):
    # upper incomplete gamma tails fall like exp(-2 pi n)
    return max(16, int(dps * math.log(10) / TWO_PI) + 8)


def completed_l_phi(s, lam, n_terms=None, dps=50):
    """L(s) of the degree-2 factor for any s, via incomplete-gamma sums.

    With s' = s + (k-1)/2 and a(n) = lam(n) n^((k-1)/2),

      (2 pi)^(-s') G(s') L_arith(s')
        = sum_n a(n) [ (2 pi n)^(-s') G(s', 2 pi n)
                       + i^k (2 pi n)^(s'-k) G(k - s', 2 pi n) ],

    both sides entire in s; exponential decay makes ~30 terms enough for
    fifty digits.  Returns L(s) = L_arith(s') as a complex float.
    """
    k = lam.weight
    wk = (-1) ** (k // 2)
    if n_terms is None:
        n_terms = _auto_terms(dps)
    n_terms = min(n_terms, lam.N)
    with mpmath.workdps(dps):
        sp = mpmath.mpc(s) + mpmath.mpf(k - 1) / 2
        _reject_pole(complex(sp))  # G(s') pole would sink the division below
        total = mpmath.mpc(0)
        for n in range(1, n_terms + 1):
            a_n = mpmath.mpf(float(lam.values[n])) * mpmath.mpf(n) ** (mpmath.mpf(k - 1) / 2)
            x = TWO_PI * n
            blk = mpmath.power(x, -sp) * mpmath.gammainc(sp, x)
            blk += wk * mpmath.power(x, sp - k) * mpmath.gammainc(k - sp, x)
            total += a_n * blk
        val = total * mpmath.power(TWO_PI, sp) / mpmath.gamma(sp)
        return complex(val)


def zeta(s, dps=40):
    with mpmath.workdps(dps):
        return complex(mpmath.zeta(mpmath.mpc(s)))


def l_isobaric_continued(s, lam, dps=50):
    """Degree-3 value zeta(s) L(s, degree-2) valid on the whole plane."""
    return zeta(s, dps) * completed_l_phi(s, lam, dps=dps)


def lambda_isobaric(s, lam, weight=12, dps=50):
    """Completed degree-3 function gamma_completed(s) zeta(s) L(s)."""
    return gamma_completed(s, weight) * l_isobaric_continued(s, lam, dps=dps)


@dataclass(frozen=True)
class FEReport:
    s: complex
    lhs: complex
    rhs: complex
    residual: float
    truncation_estimate: float


def check_functional_equation(s, lam, precision_target=1e-6):
    """Residual of L(1-s) = w gamma(s) L(s) for the degree-3 function.

    The right side converges by direct (tapered) summation since Re s > 1;
    the left side goes through the incomplete-gamma continuation, which
    never references gamma_ratio, so the two sides are independent.
    """
    s = complex(s)
    if s.real <= 1.0:
        raise ValueError("need Re s > 1 for the direct side")
    w = gamma_factor(lam.weight).w

    direct_full = l_phi_direct(s, lam)
    direct_half = l_phi_direct(s, lam, lam.N // 2)
    drift = abs(direct_full - direct_half)
    scale = max(abs(direct_full), 1e-30)
    if drift / scale > precision_target / 4.0:
        raise PrecisionUnreachable(
            f"direct-sum drift {drift / scale:.2e} exceeds a quarter of the "
            f"target {precision_target:.1e}; table length {lam.N} is too short"
        )

    rhs = w * gamma_ratio(s, lam.weight) * zeta(s) * direct_full
    lhs = zeta(1 - s) * completed_l_phi(1 - s, lam)
    residual = abs(lhs - rhs) / abs(rhs)
    return FEReport(
        s=s, lhs=lhs, rhs=rhs, residual=float(residual),
        truncation_estimate=float(drift / scale),
    )


def fe_report_json(report):
    return {
        "s": [report.s.real, report.s.imag],
        "lhs": [report.lhs.real, report.lhs.imag],
        "rhs": [report.rhs.real, report.rhs.imag],
        "residual": report.residual,
    }


# ---------------------------------------------------------------------------
# the constant of the main term

@dataclass(frozen=True)
class L1Result:
    value: float
    scheme_exp: float
    scheme_completed: float
    digits: int


def _exp_weighted_sums(lam, m_values):
    """S(M) = sum lam(n) exp(-n/M) / n over the table, one value per M."""
    out = []
    vals = lam.values
    for m in m_values:
        hi = min(lam.N, int(64 * m))  # exp(-64) is far below double rounding
        n = np.arange(1, hi + 1, dtype=np.float64)
        out.append(float(np.sum(vals[1:hi + 1] / n * np.exp(-n / m))))
    return out


def l1_phi(lam, target_digits=10):
    """L(1) by two independent schemes that must agree.

    Scheme (a): exponentially weighted sums S(M) = sum lam(n) e^(-n/M) / n
    approach L(1) with an error series in powers of 1/M; a Richardson
    tableau over doubling M removes the leading powers.  Scheme (b): the
    incomplete-gamma continuation at s = 1.  Disagreement beyond the
    requested digits is a hard failure.
    """
    if lam.N < 16384:
        raise PrecisionUnreachable("need at least 16384 coefficients for the M sweep")
    m_values = []
    m = 64.0
    while 32.0 * m <= lam.N:
        m_values.append(m)
        m *= 2.0
    depth = min(len(m_values) - 1, 10)
    tableau = [_exp_weighted_sums(lam, m_values)]
    for j in range(1, depth + 1):
        prev = tableau[-1]
        fac = 2.0 ** j
        tableau.append([
            (fac * prev[i + 1] - prev[i]) / (fac - 1.0)
            for i in range(len(prev) - 1)
        ])
    scheme_a = tableau[-1][-1]

    scheme_b = completed_l_phi(1.0, lam).real

    tol = 10.0 ** (-target_digits) * max(1.0, abs(scheme_b))
    if abs(scheme_a - scheme_b) > tol:
        raise SchemesDisagree(scheme_a, scheme_b, target_digits)
    return L1Result(
        value=scheme_b,
        scheme_exp=scheme_a,
        scheme_completed=scheme_b,
        digits=target_digits,
    )


def write_golden_l1(path, result):
    """Fifteen-digit record of the agreed constant and both scheme values."""
    text = (
        f"L1 = {result.value:.15g}\n"
        f"scheme_exp_richardson = {result.scheme_exp:.15g}\n"
        f"scheme_completed = {result.scheme_completed:.15g}\n"
        f"agreed_digits = {result.digits}\n"
    )
    atomic_write_text(path, text)


def read_golden_l1(path):
    with open(path, "r", encoding="ascii") as fh:
        first = fh.readline().split("=")
    return float(first[1])
