"""Exact van der Corput exponent-pair algebra and the bound budget.

Everything here is fractions.Fraction arithmetic; no floats.  A pair (p, q)
certifies sum_{l ~ L} e(f(l)) << (F/L)^p L^q for phases with derivative of
size F/L.  The A and B maps generate new pairs, theta(p, q) is the objective
the final error exponent depends on, and the budget verifier replays the
exponent bookkeeping that turns a pair into an admissible delta.
"""

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateDenominator, InfeasibleBudget, RegimeViolated

Rational = Fraction

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ExponentPair:
    p: Fraction
    q: Fraction
    word: str = ""
    seed: str = ""

    def __post_init__(self):
        if not (0 <= self.p <= HALF <= self.q <= 1):
            raise ValueError(f"({self.p}, {self.q}) is outside the valid region")
        if any(ch not in "AB" for ch in self.word):
            raise ValueError("word must be over the alphabet {A, B}")


TRIVIAL = ExponentPair(Fraction(0), Fraction(1), "", "trivial")
BOURGAIN = ExponentPair(Fraction(13, 84), Fraction(55, 84), "", "bourgain")

DEFAULT_SEEDS = (TRIVIAL, BOURGAIN)


def a_process(pair):
    """(p, q) -> (p/(2p+2), (p+q+1)/(2p+2))."""
    den = 2 * pair.p + 2
    return ExponentPair(pair.p / den, (pair.p + pair.q + 1) / den,
                        pair.word + "A", pair.seed)


def b_process(pair):
    """(p, q) -> (q - 1/2, p + 1/2); an involution."""
    return ExponentPair(pair.q - HALF, pair.p + HALF, pair.word + "B", pair.seed)


def replay(seed_pair, word):
    """Apply a word over {A, B} to a seed pair, left to right."""
    pair = seed_pair
    for ch in word:
        if ch == "A":
            pair = a_process(pair)
        elif ch == "B":
            pair = b_process(pair)
        else:
            raise ValueError(f"bad letter {ch!r} in word")
    return pair


def objective_theta(pair):
    """theta(p, q) = (5 + 5p - 2q) / (11 + 8p - 5q), exact."""
    den = 11 + 8 * pair.p - 5 * pair.q
    if den <= 0:
        raise DegenerateDenominator(f"11 + 8p - 5q = {den} at ({pair.p}, {pair.q})")
    return (5 + 5 * pair.p - 2 * pair.q) / den


def enumerate_pairs(max_word_length, seeds=DEFAULT_SEEDS):
    """All distinct (p, q) reachable by {A, B}-words up to the length
    bound, each held with its shortest (then lexicographically smallest)
    generating word."""
    best_by_pq = {}
    for seed in seeds:
        frontier = [seed]
        for _ in range(max_word_length + 1):
            nxt = []
            for pair in frontier:
                key = (pair.p, pair.q)
                held = best_by_pq.get(key)
                if held is None or (len(pair.word), pair.word, pair.seed) < (
                    len(held.word), held.word, held.seed
                ):
                    best_by_pq[key] = pair
                if len(pair.word) < max_word_length:
                    nxt.append(a_process(pair))
                    nxt.append(b_process(pair))
            frontier = nxt
            if not frontier:
                break
    return list(best_by_pq.values())


def search_pairs(max_word_length, seeds=DEFAULT_SEEDS):
    """Exhaustive word search minimizing theta.

    Enumerates all {A, B}-words up to the length bound from every seed,
    deduplicates by (p, q), and returns the exact minimizer with its
    theta.  Ties on theta break by word length, then word, then seed.
    """
    best = min(
        enumerate_pairs(max_word_length, seeds),
        key=lambda pr: (objective_theta(pr), len(pr.word), pr.word, pr.seed),
    )
    return best, objective_theta(best)


@dataclass(frozen=True)
class LinearForm:
    """Exponents (a, b, c, d) of a formal monomial X^a T^b L^c M^d."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def times(self, other):
        return LinearForm(self.a + other.a, self.b + other.b,
                          self.c + other.c, self.d + other.d)

    def power(self, r):
        r = Fraction(r)
        return LinearForm(self.a * r, self.b * r, self.c * r, self.d * r)

    def subst_m(self):
        """Substitute M = T^3 / (X L)."""
        return LinearForm(self.a - self.d, self.b + 3 * self.d, self.c - self.d,
                          Fraction(0))

    def subst_l(self, t_exp, x_exp):
        """Substitute L = T^t_exp X^x_exp."""
        return LinearForm(self.a + self.c * x_exp, self.b + self.c * t_exp,
                          Fraction(0), self.d)


X1 = LinearForm(a=Fraction(1))
T1 = LinearForm(b=Fraction(1))
L1F = LinearForm(c=Fraction(1))
M1 = LinearForm(d=Fraction(1))


@dataclass(frozen=True)
class BoundBudget:
    case1_T_exponent: Fraction
    case1_X_exponent: Fraction
    case2_T_exponent: Fraction
    case2_X_exponent: Fraction
    delta_max: Fraction


def crossover_threshold(pair):
    """Exponents (t, x) of the L threshold where the two case bounds meet.

    The long-L bound M (T/L)^p L^q falls in L, the short-L bound
    L T^(1/3) M^(1/2) rises, both after M = T^3/(XL); equating them gives
    L = T^t X^x with t = (7/6 + p)/(3/2 + p - q), x = -1/(2(3/2 + p - q)).
    """
    den = Fraction(3, 2) + pair.p - pair.q
    if den <= 0:
        raise DegenerateDenominator(f"3/2 + p - q = {den} at ({pair.p}, {pair.q})")
    return (Fraction(7, 6) + pair.p) / den, Fraction(-1, 2) / den


def verify_budget(pair):
    """Replay the split-range bookkeeping for a pair, exactly.

    Case 1 is M (T/L)^p L^q, case 2 is L T^(1/3) M^(1/2), both evaluated
    at the crossover threshold after M = T^3/(XL).  The admissible delta
    solves (X/T^2) T^t X^x <= X^(1/2 - delta) at T = X^(1/2 + delta).
    """
    lt, lx = crossover_threshold(pair)

    case1 = M1.times(T1.power(pair.p)).times(L1F.power(pair.q - pair.p))
    case1 = case1.subst_m().subst_l(lt, lx)
    case2 = L1F.times(T1.power(Fraction(1, 3))).times(M1.power(HALF))
    case2 = case2.subst_m().subst_l(lt, lx)
    if (case1.b, case1.a) != (case2.b, case2.a):
        raise AssertionError("case bounds fail to meet at their own threshold")

    t_e, x_e = case1.b, case1.a
    # X-exponent of (X/T^2) T^t_e X^x_e at T = X^(1/2+delta), versus 1/2 - delta
    if t_e <= 1:
        raise InfeasibleBudget(f"T-exponent {t_e} leaves no room for a supremum solve")
    delta_max = (HALF - t_e / 2 - x_e) / (t_e - 1)
    if delta_max <= 0:
        raise InfeasibleBudget(f"delta_max = {delta_max} <= 0 for ({pair.p}, {pair.q})")
    return BoundBudget(
        case1_T_exponent=t_e,
        case1_X_exponent=x_e,
        case2_T_exponent=case2.b,
        case2_X_exponent=case2.a,
        delta_max=delta_max,
    )


# the concrete threshold and T-range the delta = 4/739 budget runs over
THRESHOLD_T = Fraction(359, 228)
THRESHOLD_X = Fraction(-97, 152)
T_RANGE_LO = Fraction(165, 346)
T_RANGE_HI = Fraction(3, 5)


def jutila_regime_check(t_lo=T_RANGE_LO, t_hi=T_RANGE_HI,
                        threshold_t=THRESHOLD_T, threshold_x=THRESHOLD_X):
    """Exact corner check of the short-L regime conditions.

    Writing T = X^t, L = X^lam and M = T^3/(XL) = X^(3t - 1 - lam), the
    conditions M^(3/4) <= T and T <= M^(3/2) must hold on the whole region
    t in [t_lo, t_hi], 0 <= lam <= threshold_t * t + threshold_x.  Both
    slacks are linear in (t, lam), so the four corners decide; returns the
    corner table and which corners bind (zero slack).
    """
    corners = []
    for t in (Fraction(t_lo), Fraction(t_hi)):
        lam_max = threshold_t * t + threshold_x
        if lam_max < 0:
            raise RegimeViolated((t, Fraction(0)), "empty L-range (threshold below 1)")
        for lam in (Fraction(0), lam_max):
            mu = 3 * t - 1 - lam
            slack1 = t - Fraction(3, 4) * mu      # M^(3/4) <= T
            slack2 = Fraction(3, 2) * mu - t      # T <= M^(3/2)
            if slack1 < 0:
                raise RegimeViolated((t, lam), "M^(3/4) <= T")
            if slack2 < 0:
                raise RegimeViolated((t, lam), "T <= M^(3/2)")
            corners.append({"t": t, "lam": lam, "slack1": slack1, "slack2": slack2})
    binding = [(c["t"], c["lam"]) for c in corners
               if c["slack1"] == 0 or c["slack2"] == 0]
    return {"corners": corners, "binding": binding}


# ---------------------------------------------------------------------------
# JSON forms

def pair_to_json(pair):
    return {"p": str(pair.p), "q": str(pair.q), "word": pair.word, "seed": pair.seed}


def budget_to_json(budget):
    return {
        "case1_T_exponent": str(budget.case1_T_exponent),
        "case1_X_exponent": str(budget.case1_X_exponent),
        "case2_T_exponent": str(budget.case2_T_exponent),
        "case2_X_exponent": str(budget.case2_X_exponent),
        "delta_max": str(budget.delta_max),
    }


def regime_report_to_json(report):
    return {
        "corners": [
            {k: str(v) for k, v in c.items()} for c in report["corners"]
        ],
        "binding": [[str(t), str(lam)] for t, lam in report["binding"]],
    }


def dumps_report(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
