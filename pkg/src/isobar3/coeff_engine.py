"""Exact Fourier coefficients of the level-1 weight-k eigenform.

The default form is the weight-12 discriminant form, whose q-expansion is
q * prod_{m>=1} (1 - q^m)^24.  Coefficients are computed exactly: the cube
of the eta-type product has a sparse expansion with O(sqrt(N)) terms, the
24th power is then reached by three squarings, and each squaring is done
as one big-integer multiply via Kronecker substitution (fixed-width signed
slots packed into a single integer, GMP does the rest).
"""

import math
import os
import struct
from dataclasses import dataclass

import gmpy2
import numpy as np
from gmpy2 import mpz

from .errors import CapacityExceeded, IoError, SelfCheckFailed, UnsupportedForm
from .fileio import atomic_write_bytes, sha256_hex

DEFAULT_CAP = 10 ** 7

CACHE_MAGIC = b"IB3\x00"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sIIQ")


@dataclass(frozen=True)
class CuspFormSpec:
    """Identifies the form: even weight >= 12, level fixed to 1."""

    weight: int = 12
    level: int = 1
    label: str = "delta"

    def __post_init__(self):
        if self.weight < 12 or self.weight % 2 != 0:
            raise ValueError("weight must be an even integer >= 12")
        if self.level != 1:
            raise ValueError("level is fixed to 1")


DELTA = CuspFormSpec()


@dataclass(frozen=True)
class TauTable:
    """Exact integer coefficients; values[n] is the n-th coefficient, values[0] = 0."""

    N: int
    weight: int
    values: list

    def __post_init__(self):
        if len(self.values) != self.N + 1:
            raise ValueError("values must have length N + 1")


@dataclass(frozen=True)
class LambdaTable:
    """Normalized eigenvalues lam(n) = tau(n) / n^((k-1)/2) as float64."""

    N: int
    weight: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.N + 1,):
            raise ValueError("values must have shape (N + 1,)")


@dataclass(frozen=True)
class HeckeReport:
    prime_squares_checked: int
    coprime_pairs_checked: int
    max_deviation: float


# ---------------------------------------------------------------------------
# fast exact pipeline

def _cube_sparse(nslots):
    """Sparse expansion of prod (1-q^m)^3: exponents j(j+1)/2, signed odd coefficients."""
    js = np.arange(0, int((2 * nslots) ** 0.5) + 2, dtype=np.int64)
    exps = js * (js + 1) // 2
    keep = exps < nslots
    js, exps = js[keep], exps[keep]
    coeffs = np.where(js % 2 == 0, 2 * js + 1, -(2 * js + 1)).astype(np.int64)
    return exps, coeffs


def _sixth_power_dense(nslots):
    """Dense int64 coefficients of prod (1-q^m)^6 by squaring the sparse cube."""
    exps, coeffs = _cube_sparse(nslots)
    out = np.zeros(nslots, dtype=np.int64)
    for i in range(len(exps)):
        lim = nslots - exps[i]
        hi = int(np.searchsorted(exps, lim))
        if hi <= i:
            break
        # within fixed i the target exponents are distinct, so fancy += is safe
        tgt = exps[i] + exps[i:hi]
        val = coeffs[i] * coeffs[i:hi]
        out[tgt[0]] += val[0]
        if hi > i + 1:
            out[tgt[1:]] += 2 * val[1:]
    return out


def _bits_for(bound):
    """Slot width (multiple of 8) holding signed values with |v| <= bound."""
    b = int(mpz(bound).bit_length()) + 2
    return ((b + 7) // 8) * 8


def _repunit(width_bits, nslots):
    return ((mpz(1) << (width_bits * nslots)) - 1) // ((mpz(1) << width_bits) - 1)


def _pack_signed(vals, width_bits, offset_pow):
    """Pack an int64 array into one mpz with little-endian slots.

    Values are biased by 2^offset_pow so every slot is nonnegative during
    byte assembly; the bias is removed afterwards with a repunit multiple.
    Requires |vals| < 2^offset_pow and offset_pow < 63.
    """
    w = width_bits // 8
    n = len(vals)
    shifted = vals + np.int64(1 << offset_pow)
    mat = np.zeros((n, w), dtype=np.uint8)
    for j in range(min(w, 8)):
        mat[:, j] = ((shifted >> (8 * j)) & 0xFF).astype(np.uint8)
    packed = gmpy2.mpz.from_bytes(mat.tobytes(), "little")
    return packed - (mpz(1) << offset_pow) * _repunit(width_bits, n)


def _square_to_bytes(packed, width_bits, nslots):
    """Square the slotted integer; return slot bytes biased by 2^(width-1).

    The square has 2*nslots slots; only the first nslots are kept.  The
    bias keeps every slot nonnegative so the byte dump can be split.
    """
    sq = packed * packed
    biased = sq + (mpz(1) << (width_bits - 1)) * _repunit(width_bits, 2 * nslots)
    biased = biased & ((mpz(1) << (width_bits * nslots)) - 1)
    buf = biased.to_bytes(nslots * (width_bits // 8), "little")
    return np.frombuffer(buf, dtype=np.uint8).reshape(nslots, width_bits // 8)


def _repack(mat, old_bits, new_bits, nslots):
    """Widen biased little-endian slots and rebuild the signed slotted integer."""
    wide = np.zeros((nslots, new_bits // 8), dtype=np.uint8)
    wide[:, : old_bits // 8] = mat
    packed = gmpy2.mpz.from_bytes(wide.tobytes(), "little")
    return packed - (mpz(1) << (old_bits - 1)) * _repunit(new_bits, nslots)


def _tau_values_fast(N):
    """Exact coefficients 1..N of the weight-12 form, leading 0 prepended."""
    nslots = N  # slot e holds the degree-e coefficient of the 24th power
    a6 = _sixth_power_dense(nslots)

    # 12th-power slots are bounded by sum a6^2 (Cauchy-Schwarz); the float
    # dot is pairwise-summed, so a 1e-6 cushion plus the 2 spare bits in
    # _bits_for covers its rounding comfortably
    s2 = float(np.dot(a6.astype(np.float64), a6.astype(np.float64)))
    b12 = _bits_for(int(s2 * (1 + 1e-6)) + 1)
    off6 = int(np.max(np.abs(a6))).bit_length() + 1
    packed6 = _pack_signed(a6, b12, off6)
    mat12 = _square_to_bytes(packed6, b12, nslots)

    # bound sum a12^2 from the byte rows to size the final slots
    pow_vec = 256.0 ** np.arange(b12 // 8)
    u12 = mat12.astype(np.float64) @ pow_vec
    a12f = u12 - 2.0 ** (b12 - 1)
    bnd = np.abs(a12f) + np.abs(u12) * 1e-12 + 1.0
    s2_12 = float(np.dot(bnd, bnd))
    b24 = _bits_for(int(s2_12 * (1 + 1e-6)) + 1)

    packed12 = _repack(mat12, b12, b24, nslots)
    mat24 = _square_to_bytes(packed12, b24, nslots)

    w = b24 // 8
    off = 1 << (b24 - 1)
    buf = mat24.tobytes()
    values = [0] * (N + 1)
    for e in range(nslots):
        values[e + 1] = int.from_bytes(buf[e * w:(e + 1) * w], "little") - off
    return values


def naive_tau_table(N):
    """O(N^2) oracle: repeated (1 - q^m) multiplication, exact integers."""
    c = [0] * N
    c[0] = 1
    for m in range(1, N):
        for _ in range(24):
            for i in range(N - 1, m - 1, -1):
                c[i] -= c[i - m]
    return TauTable(N=N, weight=12, values=[0] + c)


def build_tau_table(N, spec=DELTA, cap=DEFAULT_CAP, coeff_file=None):
    """Exact coefficient table for 1..N.

    Only the default weight-12 form is computed natively; any other weight
    needs an external coefficient file (same text format as the golden
    file, one "n<TAB>value" line per n).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > cap:
        raise CapacityExceeded(f"N = {N} exceeds the table cap {cap}")
    if spec.weight != 12:
        if coeff_file is None:
            raise UnsupportedForm(
                f"no native expansion for weight {spec.weight}; "
                "supply a coefficient file"
            )
        values = read_coeff_file(coeff_file, N)
        return TauTable(N=N, weight=spec.weight, values=values)
    return TauTable(N=N, weight=12, values=_tau_values_fast(N))


def normalize(tau, spec=DELTA):
    """lam(n) = tau(n) / n^((k-1)/2), within a few ulp per entry.

    The exponent (k-1)/2 is a half-integer for even k, so the divisor is
    n^(k/2-1) * sqrt(n); each factor is correctly rounded or within 1 ulp.
    """
    if spec.weight != tau.weight:
        raise ValueError("table was built for a different weight")
    k = spec.weight
    nf = np.arange(tau.N + 1, dtype=np.float64)
    nf[0] = 1.0
    denom = nf ** (k // 2 - 1) * np.sqrt(nf)
    numer = np.array(tau.values, dtype=np.float64)
    vals = numer / denom
    vals[0] = 0.0
    return LambdaTable(N=tau.N, weight=k, values=vals)


# ---------------------------------------------------------------------------
# self-checks

def _primes_upto(limit):
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if mask[p]:
            mask[p * p::p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def hecke_selfcheck(tab, pairs=10 ** 4, seed=0, tol=1e-9):
    """Float-level Hecke checks on a normalized table.

    Verifies lam(p^2) = lam(p)^2 - 1 at every prime with p^2 <= N and
    multiplicativity on `pairs` random coprime pairs; raises SelfCheckFailed
    at the first violation beyond `tol`.
    """
    vals = tab.values
    max_dev = 0.0
    primes = _primes_upto(int(math.isqrt(tab.N)))
    for p in primes:
        dev = abs(vals[p * p] - (vals[p] ** 2 - 1.0))
        max_dev = max(max_dev, dev)
        if dev > tol:
            raise SelfCheckFailed(f"prime-square relation fails at n = {p * p}")
    rng = np.random.default_rng(seed)
    checked = 0
    while checked < pairs:
        m = int(rng.integers(2, tab.N // 2 + 1))
        n = int(rng.integers(2, tab.N // m + 1))
        if math.gcd(m, n) != 1:
            continue
        dev = abs(vals[m * n] - vals[m] * vals[n])
        max_dev = max(max_dev, dev)
        if dev > tol:
            raise SelfCheckFailed(f"multiplicativity fails at n = {m * n}")
        checked += 1
    return HeckeReport(
        prime_squares_checked=len(primes),
        coprime_pairs_checked=checked,
        max_deviation=max_dev,
    )


def divisor_counts(limit):
    """d(n) for n = 0..limit (d[0] = 0) by a straight multiple sieve."""
    d = np.zeros(limit + 1, dtype=np.int64)
    for m in range(1, limit + 1):
        d[m::m] += 1
    return d


def exact_bound_suite(tau, limit=None):
    """Zero-tolerance integer checks up to `limit`.

    Covers multiplicativity on all coprime ordered-down pairs, the
    prime-power recurrence, |lam(p)| <= 2 at primes (as tau(p)^2 <= 4 p^(k-1))
    and |lam(n)| <= d(n) (as tau(n)^2 <= d(n)^2 n^(k-1)).  Returns a dict of
    check counts; any violation raises SelfCheckFailed immediately.
    """
    if limit is None:
        limit = tau.N
    if limit > tau.N:
        raise ValueError("limit exceeds table length")
    v = tau.values
    k = tau.weight
    counts = {"multiplicative": 0, "prime_power": 0, "deligne_prime": 0, "divisor_bound": 0}

    for m in range(2, int(math.isqrt(limit)) + 1):
        for n in range(m, limit // m + 1):
            if math.gcd(m, n) != 1:
                continue
            if v[m * n] != v[m] * v[n]:
                raise SelfCheckFailed(f"multiplicativity fails at n = {m * n}")
            counts["multiplicative"] += 1

    primes = _primes_upto(limit)
    for p in primes:
        p = int(p)
        pk = p ** (k - 1)
        if v[p] * v[p] > 4 * pk:
            raise SelfCheckFailed(f"prime eigenvalue bound fails at p = {p}")
        counts["deligne_prime"] += 1
        pj_prev, pj = 1, p
        while pj * p <= limit:
            nxt = pj * p
            if v[nxt] != v[p] * v[pj] - pk * v[pj_prev]:
                raise SelfCheckFailed(f"prime-power recurrence fails at n = {nxt}")
            counts["prime_power"] += 1
            pj_prev, pj = pj, nxt

    d = divisor_counts(limit)
    for n in range(1, limit + 1):
        dn = int(d[n])
        if v[n] * v[n] > dn * dn * n ** (k - 1):
            raise SelfCheckFailed(f"divisor bound fails at n = {n}")
        counts["divisor_bound"] += 1
    return counts


# ---------------------------------------------------------------------------
# caches

def write_lambda_cache(path, tab):
    """Binary cache: magic, version, weight, N, then N little-endian float64."""
    header = _HEADER.pack(CACHE_MAGIC, CACHE_VERSION, tab.weight, tab.N)
    body = np.ascontiguousarray(tab.values[1:], dtype="<f8").tobytes()
    data = header + body
    atomic_write_bytes(path, data)
    digest = sha256_hex(data)
    atomic_write_bytes(
        f"{path}.sha256",
        f"{digest}  {os.path.basename(path)}\n".encode("ascii"),
    )


def read_cache_header(path):
    """(version, weight, N) from a cache file, or IoError if malformed."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read(_HEADER.size)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if len(raw) != _HEADER.size:
        raise IoError(f"{path}: truncated header")
    magic, version, weight, n = _HEADER.unpack(raw)
    if magic != CACHE_MAGIC:
        raise IoError(f"{path}: bad magic {magic!r}")
    if version != CACHE_VERSION:
        raise IoError(f"{path}: unsupported version {version}")
    return version, weight, n


def read_lambda_cache(path, verify_checksum=True):
    """Load a LambdaTable from a binary cache, verifying the sidecar checksum."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if len(data) < _HEADER.size:
        raise IoError(f"{path}: truncated header")
    magic, version, weight, n = _HEADER.unpack(data[:_HEADER.size])
    if magic != CACHE_MAGIC:
        raise IoError(f"{path}: bad magic {magic!r}")
    if version != CACHE_VERSION:
        raise IoError(f"{path}: unsupported version {version}")
    sidecar = f"{path}.sha256"
    if verify_checksum and os.path.exists(sidecar):
        try:
            with open(sidecar, "r", encoding="ascii") as fh:
                recorded = fh.read().split()[0]
        except (OSError, IndexError) as exc:
            raise IoError(f"cannot read {sidecar}: {exc}") from exc
        if recorded != sha256_hex(data):
            raise IoError(f"{path}: checksum mismatch against {sidecar}")
    body = data[_HEADER.size:]
    if len(body) != 8 * n:
        raise IoError(f"{path}: expected {8 * n} payload bytes, got {len(body)}")
    vals = np.empty(n + 1, dtype=np.float64)
    vals[0] = 0.0
    vals[1:] = np.frombuffer(body, dtype="<f8")
    return LambdaTable(N=n, weight=weight, values=vals)


def write_golden_tau(path, tau, limit=10 ** 4):
    """Decimal text of the exact coefficients, one "n<TAB>value" line per n."""
    limit = min(limit, tau.N)
    lines = [f"{n}\t{tau.values[n]}\n" for n in range(1, limit + 1)]
    atomic_write_bytes(path, "".join(lines).encode("ascii"))


def read_coeff_file(path, N):
    """Exact integer coefficients 1..N from golden-format text."""
    values = [0] * (N + 1)
    seen = 0
    try:
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                if not line.strip():
                    continue
                n_str, val_str = line.split("\t")
                n = int(n_str)
                if 1 <= n <= N:
                    values[n] = int(val_str)
                    seen += 1
    except (OSError, ValueError) as exc:
        raise IoError(f"bad coefficient file {path}: {exc}") from exc
    if seen < N:
        raise IoError(f"{path}: covers only {seen} of the first {N} indices")
    return values
