"""Oscillatory toolbox: smooth windows with Mellin decay, a stationary-phase
testbed for the cube-root phase h(xi) = T xi log(nX (T xi / 2 pi e)^-3),
and direct evaluation of the bilinear sums

    B(L, M) = sum_{l ~ L} sum_{m ~ M} lam(m) e(3 (l m X)^{1/3}) V(m / M)

against exponent-pair predictions M (T/L)^p L^q.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import quad

from .errors import (
    BadGeometry,
    NoStationaryPoint,
    QuadratureFailure,
    SelfCheckFailed,
    TableTooShort,
)
from .fileio import atomic_write_text

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# the C-infinity bump and its derivatives

def bump(u):
    """exp(-1/(1-u^2)) on (-1, 1), zero outside; peak value 1/e."""
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    inner = np.abs(u) < 1.0
    g = 1.0 - u[inner] ** 2
    out[inner] = np.exp(-1.0 / g)
    return out


@lru_cache(maxsize=None)
def _deriv_poly(m):
    """Coefficients of Q_m with bump^(m)(u) = Q_m(u) (1-u^2)^(-2m) bump(u).

    Q_0 = 1 and Q_{m+1} = g^2 Q_m' + 2u (2m g - 1) Q_m with g = 1 - u^2;
    the recurrence follows from differentiating the ansatz once.
    """
    if m == 0:
        return (1.0,)
    q = np.array(_deriv_poly(m - 1))
    g = np.array([1.0, 0.0, -1.0])
    mm = m - 1
    term1 = npoly.polymul(npoly.polymul(g, g), npoly.polyder(q))
    # 2u(2m g - 1) = (4m - 2)u - 4m u^3
    lin = np.array([0.0, 4.0 * mm - 2.0, 0.0, -4.0 * mm])
    term2 = npoly.polymul(lin, q)
    out = npoly.polyadd(term1, term2)
    return tuple(float(c) for c in out)


def bump_deriv(u, m):
    """m-th derivative of the bump, evaluated through the log of the
    magnitude so the (1-u^2)^(-2m) pole never overflows before the
    essential zero of exp(-1/(1-u^2)) wins."""
    if m == 0:
        return bump(u)
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    inner = np.abs(u) < 1.0
    ui = u[inner]
    g = 1.0 - ui ** 2
    expo = -1.0 / g - 2.0 * m * np.log(g)
    q = npoly.polyval(ui, np.array(_deriv_poly(m)))
    live = expo > -700.0
    vals = np.zeros_like(ui)
    vals[live] = q[live] * np.exp(expo[live])
    out[inner] = vals
    return out


_GL64_NODES, _GL64_WEIGHTS = np.polynomial.legendre.leggauss(64)

BUMP_MASS = float(np.sum(_GL64_WEIGHTS * bump(_GL64_NODES)))


def bump_cdf(u):
    """Normalized integral of the bump from -1 to u; 0 at -1, 1 at +1.

    One 64-node Gauss panel per requested point is exact to roundoff
    because the integrand is analytic inside the support.
    """
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    out[u >= 1.0] = 1.0
    inner = (u > -1.0) & (u < 1.0)
    ui = u[inner]
    # map [-1, ui] onto the reference panel
    half = (ui + 1.0) / 2.0
    mid = (ui - 1.0) / 2.0
    nodes = mid[:, None] + half[:, None] * _GL64_NODES[None, :]
    vals = bump(nodes.ravel()).reshape(nodes.shape)
    out[inner] = (half / BUMP_MASS) * np.sum(_GL64_WEIGHTS[None, :] * vals, axis=1)
    return out


# ---------------------------------------------------------------------------
# smooth window

@dataclass(frozen=True)
class SmoothWindow:
    """Plateau on [1/2, 1] with bump-profile ramps of width r = Y/X.

    Rises from 0 on [1/2 - r, 1/2], falls back to 0 on [1, 1 + r];
    derivative j scales like (X/Y)^j with the recorded constants c[j].
    """

    X: float
    Y: float
    c: tuple  # sampled sup |W^(j)| (Y/X)^j for j = 1..4

    @property
    def ramp(self):
        return self.Y / self.X

    @property
    def support(self):
        return (0.5 - self.ramp, 1.0 + self.ramp)

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        r = self.ramp
        out = np.zeros_like(x)
        out[(x >= 0.5) & (x <= 1.0)] = 1.0
        up = (x > 0.5 - r) & (x < 0.5)
        out[up] = bump_cdf((x[up] - (0.5 - r / 2.0)) * (2.0 / r))
        down = (x > 1.0) & (x < 1.0 + r)
        out[down] = 1.0 - bump_cdf((x[down] - (1.0 + r / 2.0)) * (2.0 / r))
        return out

    __call__ = value

    def deriv(self, x, j):
        if not 1 <= j <= 4:
            raise ValueError("derivative order must be in 1..4")
        x = np.asarray(x, dtype=np.float64)
        r = self.ramp
        scale = (2.0 / r) ** j / BUMP_MASS
        out = np.zeros_like(x)
        up = (x > 0.5 - r) & (x < 0.5)
        out[up] = scale * bump_deriv((x[up] - (0.5 - r / 2.0)) * (2.0 / r), j - 1)
        down = (x > 1.0) & (x < 1.0 + r)
        out[down] = -scale * bump_deriv((x[down] - (1.0 + r / 2.0)) * (2.0 / r), j - 1)
        return out


def make_window(X, Y):
    if not (0.0 < Y < X / 4.0):
        raise BadGeometry(f"need 0 < Y < X/4, got Y={Y}, X={X}")
    u = np.linspace(-1.0, 1.0, 4001)
    c = tuple(
        float(np.max(np.abs(bump_deriv(u, j - 1))) * 2.0 ** j / BUMP_MASS)
        for j in range(1, 5)
    )
    return SmoothWindow(X=float(X), Y=float(Y), c=c)


# ---------------------------------------------------------------------------
# Mellin transform and its decay

def mellin(w, s, rel_tol=1e-10):
    """W-tilde(s) = integral of W(x) x^(s-1) dx by adaptive quadrature."""
    s = complex(s)
    lo, hi = w.support
    kinks = [0.5, 1.0]

    def integrand(x, pick):
        v = w.value(x) * math.pow(x, s.real - 1.0)
        ph = s.imag * math.log(x)
        return v * (math.cos(ph) if pick == 0 else math.sin(ph))

    vals = []
    errs = []
    for pick in (0, 1):
        val, err = quad(
            integrand, lo, hi, args=(pick,), points=kinks,
            limit=400, epsabs=1e-13, epsrel=1e-12,
        )
        vals.append(val)
        errs.append(err)
    out = complex(vals[0], vals[1])
    err_total = math.hypot(errs[0], errs[1])
    # ten digits when the value is away from its oscillation nodes, an
    # absolute floor when it sits on one
    if err_total > max(1e-11, rel_tol * abs(out)):
        raise QuadratureFailure(
            f"Mellin quadrature error {err_total:.2e} at s={s} (|value| {abs(out):.3e})"
        )
    return out


def mellin_by_parts(w, s):
    """Oracle: same transform written as -(1/s) integral W'(x) x^s dx."""
    s = complex(s)
    if abs(s) < 1e-12:
        raise ValueError("by-parts form needs s != 0")
    lo, hi = w.support
    r = w.ramp

    def integrand(x, pick):
        v = float(w.deriv(x, 1)) * math.pow(x, s.real)
        ph = s.imag * math.log(x)
        return v * (math.cos(ph) if pick == 0 else math.sin(ph))

    parts = []
    for a, b in ((lo, 0.5), (1.0, hi)):
        for pick in (0, 1):
            val, _ = quad(integrand, a, b, args=(pick,), limit=400,
                          epsabs=1e-13, epsrel=1e-12)
            parts.append(val)
    total = complex(parts[0] + parts[2], parts[1] + parts[3])
    return -total / s


def mellin_decay_check(w, s_samples):
    """Fit decay constants C_k with |W(s)| <= C_k |s|^-k (X/Y)^(k-1).

    Also measures W-tilde(1), which equals 1/2 + Y/X exactly for this
    window family (each ramp integrates to half its width).
    """
    ratio = w.X / w.Y
    w1 = mellin(w, 1.0).real
    rows = []
    cks = {1: 0.0, 2: 0.0, 3: 0.0}
    for s in s_samples:
        s = complex(s)
        mag = abs(mellin(w, s))
        row = {"sigma": s.real, "t": s.imag, "abs": mag}
        for k in (1, 2, 3):
            ck = mag * abs(s) ** k / ratio ** (k - 1)
            row[f"c{k}"] = ck
            cks[k] = max(cks[k], ck)
        rows.append(row)
    return {
        "w1": w1,
        "w1_deviation": abs(w1 - 0.5),
        "ramp": w.ramp,
        "fitted_c": cks,
        "samples": rows,
    }


# ---------------------------------------------------------------------------
# stationary phase for the cube-root kernel

def default_profile():
    """V_1(xi) = bump((xi - 1) / (3/4)), supported on [1/4, 7/4]."""
    return (lambda xi: bump((np.asarray(xi) - 1.0) / 0.75), 0.25, 1.75, 0.75 * BUMP_MASS)


def phase_h(xi, n, X, T):
    """h(xi) = T xi (log(nX) - 3 log(T xi / 2 pi) + 3); h'(xi) = 3T log(xi0/xi)."""
    return T * xi * (math.log(n * X) - 3.0 * np.log(T * xi / TWO_PI) + 3.0)


def stationary_point(n, X, T):
    return TWO_PI * (n * X) ** (1.0 / 3.0) / T


def stationary_phase_check(n, X, T, profile=None, density=1.0):
    """Quadrature of int V_1(xi) e^{i h(xi)} dxi against its leading term.

    The leading term is e^{i h(xi0)} sqrt(2 pi / |h''(xi0)|) e^{-i pi/4}
    V_1(xi0), the sign of the phase shift following h''(xi0) = -3T/xi0 < 0.
    Node density stays at or above 20 nodes per oscillation at the fastest
    frequency inside the support; `density` scales that for convergence
    self-checks.
    """
    if T < 50:
        raise ValueError("need T >= 50 for the asymptotic regime")
    if profile is None:
        profile = default_profile()
    v1, lo, hi, mass = profile
    xi0 = stationary_point(n, X, T)

    # fastest frequency over the support, in cycles per unit length
    max_cycles = 3.0 * T * max(abs(math.log(xi0 / lo)), abs(math.log(xi0 / hi))) / TWO_PI
    max_cycles = max(max_cycles, 3.0 * T / TWO_PI)
    panels = max(64, int(math.ceil(1.25 * density * max_cycles * (hi - lo))))
    nodes16, weights16 = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(lo, hi, panels + 1)
    mid = (edges[1:] + edges[:-1]) / 2.0
    half = (edges[1:] - edges[:-1]) / 2.0
    xi = (mid[:, None] + half[:, None] * nodes16[None, :]).ravel()
    wq = (half[:, None] * weights16[None, :]).ravel()
    integrand = v1(xi) * np.exp(1j * phase_h(xi, n, X, T))
    numeric = complex(np.sum(wq * integrand))

    if not lo < xi0 < hi:
        if abs(numeric) > 1e-8 * mass:
            raise SelfCheckFailed(
                f"no stationary point in support but |integral| = {abs(numeric):.3e}"
            )
        raise NoStationaryPoint(numeric, mass)

    h2 = 3.0 * T / xi0  # |h''(xi0)|
    leading = (
        np.exp(1j * phase_h(xi0, n, X, T))
        * math.sqrt(TWO_PI / h2)
        * np.exp(-1j * math.pi / 4.0)
        * float(v1(xi0))
    )
    leading = complex(leading)
    rel_err = abs(numeric - leading) / abs(leading)
    return numeric, leading, rel_err


# ---------------------------------------------------------------------------
# bilinear exponential sums against exponent-pair predictions

@dataclass(frozen=True)
class OscProbe:
    """One B(L, M) configuration tied to a scale pair (X, T).

    M defaults to T^3 / (X L), the scale forced by l m = n with n around
    T^3/X; the constructor only stores numbers, validation happens at
    evaluation time against the actual table.
    """

    X: float
    T: float
    L: int
    M: float

    @property
    def m_range(self):
        return (int(math.ceil(self.M / 2.0)), int(math.floor(1.5 * self.M)))

    @property
    def n_range(self):
        m_lo, m_hi = self.m_range
        return (self.L * m_lo, (2 * self.L - 1) * m_hi)


def make_probe(X, T, L, M=None):
    if L < 1:
        raise BadGeometry("need L >= 1")
    if M is None:
        M = T ** 3 / (X * L)
    if M < 2.0:
        raise BadGeometry(f"M = {M:.3g} leaves no m-range")
    return OscProbe(X=float(X), T=float(T), L=int(L), M=float(M))


def inner_exp_sum(m, X, L, flat=False):
    """sum_{l ~ L} e(3 (l m X)^{1/3}); flat=True switches the phase off."""
    ls = np.arange(L, 2 * L, dtype=np.float64)
    if flat:
        return complex(len(ls), 0.0)
    return complex(np.sum(np.exp(2j * math.pi * 3.0 * np.cbrt(ls * m * X))))


def exp_sum_probe(probe, lam, pair):
    """Measured |B(L, M)| against the prediction M (T/L)^p L^q.

    Returns one report row; raises TableTooShort when the m-range runs
    off the coefficient table and BadGeometry when L M drifts from
    T^3/X by more than a factor of 8.
    """
    X, T, L = probe.X, probe.T, probe.L
    target = T ** 3 / X
    if not target / 8.0 <= L * probe.M <= target * 8.0:
        raise BadGeometry(
            f"L*M = {L * probe.M:.3g} vs T^3/X = {target:.3g} exceeds factor 8"
        )
    m_lo, m_hi = probe.m_range
    if m_hi > lam.N:
        raise TableTooShort(f"need lam up to {m_hi}, table has {lam.N}")
    if m_hi < m_lo:
        raise BadGeometry("empty m-range")

    ms = np.arange(m_lo, m_hi + 1, dtype=np.float64)
    weights = lam.values[m_lo:m_hi + 1] * bump((ms / probe.M - 1.0) * 2.0)
    ls = np.arange(L, 2 * L, dtype=np.float64)
    # phase matrix stays small at desk scale (L*M ~ T^3/X)
    phases = np.exp(2j * math.pi * 3.0 * np.cbrt(np.outer(ls, ms) * X))
    measured = abs(complex(weights @ phases.sum(axis=0)))

    p = float(pair.p)
    q = float(pair.q)
    predicted = probe.M * (T / L) ** p * L ** q
    inner = abs(inner_exp_sum(int(round(probe.M)), X, L))
    return {
        "L": L,
        "M": probe.M,
        "measured": measured,
        "predicted": predicted,
        "ratio": measured / predicted,
        "inner_abs": inner,
    }


def probe_sweep(X, T, L_values, lam, pair, map_fn=map):
    """Dyadic sweep of L at fixed (X, T); one row per L plus the fitted
    slope of log |inner l-sum| against log L, whose exponent-pair
    counterpart is q - p (advisory, reported not asserted).  `map_fn`
    accepts an executor map for parallel probes; rows stay in L order.
    """
    rows = list(map_fn(
        lambda L: exp_sum_probe(make_probe(X, T, L), lam, pair), L_values,
    ))
    for row in rows:
        if row["ratio"] > 10.0:
            raise SelfCheckFailed(
                f"measured/predicted = {row['ratio']:.3g} > 10 at L = {row['L']}"
            )
    slope = None
    usable = [r for r in rows if r["inner_abs"] > 1e-12 and r["L"] > 1]
    if len(usable) >= 3:
        xs = np.log([r["L"] for r in usable])
        ys = np.log([r["inner_abs"] for r in usable])
        slope = float(np.polyfit(xs, ys, 1)[0])
    return {
        "X": X,
        "T": T,
        "rows": rows,
        "max_ratio": max(r["ratio"] for r in rows),
        "inner_slope": slope,
        "advisory_slope": float(pair.q - pair.p),
    }


def write_probe_csv(path, rows):
    lines = ["L,measured,predicted,ratio"]
    for r in rows:
        lines.append(f"{r['L']},{r['measured']:.17g},{r['predicted']:.17g},{r['ratio']:.17g}")
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# dyadic partition of unity and the truncation window

def _smooth_step_scalar(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    out[x >= 1.0] = 1.0
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    fa = np.exp(-1.0 / xi)
    fb = np.exp(-1.0 / (1.0 - xi))
    out[inner] = fa / (fa + fb)
    return out


def dyadic_piece(x, j):
    """rho(x / 2^j) with rho(u) = S(log2 u) - S(log2 u - 1); the pieces
    telescope, so any sum over consecutive j collapses to a difference
    of two steps."""
    x = np.asarray(x, dtype=np.float64)
    u = np.log2(np.maximum(x, 1e-300)) - j
    return _smooth_step_scalar(u + 1.0) - _smooth_step_scalar(u)


def dyadic_partition_sum(x, j_lo, j_hi):
    x = np.asarray(x, dtype=np.float64)
    total = np.zeros_like(x)
    for j in range(j_lo, j_hi + 1):
        total += dyadic_piece(x, j)
    return total


def dyadic_partition_check(lo, hi, samples=2048):
    """Max pointwise deviation from 1 of the partition sum on [lo, hi]."""
    if not 0 < lo < hi:
        raise BadGeometry("need 0 < lo < hi")
    j_lo = int(math.floor(math.log2(lo))) - 2
    j_hi = int(math.ceil(math.log2(hi))) + 2
    x = np.exp(np.linspace(math.log(lo), math.log(hi), samples))
    dev = np.abs(dyadic_partition_sum(x, j_lo, j_hi) - 1.0)
    return float(np.max(dev))


def n_window_empty(X, T, N, spread=4.0):
    """True when [T^3/(spread X), spread T^3/X] misses [1, N] entirely."""
    center = T ** 3 / X
    return center * spread < 1.0 or center / spread > N


def truncation_range(X, Y, eps0=0.01):
    """T-range [X^(1/3 - eps0), X^(1 + eps0) / Y] outside which the
    n-window must be empty at the matching scale."""
    return (X ** (1.0 / 3.0 - eps0), X ** (1.0 + eps0) / Y)
