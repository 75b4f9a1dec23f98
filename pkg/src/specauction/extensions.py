"""Limited-access speculation with asymmetric sellers and the enhanced
return-and-refund scheme (second-price procurement)."""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .numerics import DEFAULT_TOL, integrate

_ENUM_BOUND = 20

# Probe points for the numerical small-value limit in the access condition.
_LIMIT_PROBES = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True, eq=False)
class AsymScenario:
    """Per-seller value laws, the access set, and per-seller cutoffs.

    dists has one distribution per seller; access lists the seller indices
    the speculator can make offers to; cutoffs is aligned with access.
    """

    n_sellers: int
    reserve: float
    dists: tuple
    access: tuple
    cutoffs: tuple

    def __post_init__(self):
        if self.n_sellers < 2:
            raise ValueError(f"need at least 2 sellers, got {self.n_sellers}")
        if not 0.0 < self.reserve <= 1.0:
            raise ValueError(f"reserve must be in (0, 1], got {self.reserve}")
        if len(self.dists) != self.n_sellers:
            raise ValueError("one distribution per seller is required")
        if not self.access:
            raise ValueError("access set must be nonempty")
        if sorted(set(self.access)) != sorted(self.access):
            raise ValueError("access indices must be distinct")
        if any(not 0 <= j < self.n_sellers for j in self.access):
            raise ValueError("access indices out of range")
        if len(self.cutoffs) != len(self.access):
            raise ValueError("one cutoff per accessible seller is required")
        if any(not 0.0 <= v <= self.reserve for v in self.cutoffs):
            raise ValueError(f"cutoffs must lie in [0, {self.reserve}]")

    @property
    def outside(self):
        return tuple(i for i in range(self.n_sellers) if i not in self.access)

    def cutoff_of(self, j):
        return self.cutoffs[self.access.index(j)]


@dataclass
class EnhancedOutcome:
    prices: np.ndarray
    profit: float
    refund_revenue_expectation: float
    knockout: bool

    def to_dict(self):
        return {"format": "enhanced", "prices": list(self.prices),
                "profit": self.profit,
                "refund_revenue_expectation": self.refund_revenue_expectation,
                "knockout": self.knockout}


def _outside_survival(scn, x):
    out = 1.0
    for i in scn.outside:
        out *= 1.0 - float(scn.dists[i].cdf(x))
    return out


def asym_prices(scn, tol=DEFAULT_TOL):
    """Acquisition price offered to each accessible seller (access order)."""
    prices = []
    for j in scn.access:
        vj = scn.cutoff_of(j)
        others = [s for s in scn.access if s != j]

        def integrand(x):
            out = _outside_survival(scn, x)
            for s in others:
                out *= 1.0 - float(scn.dists[s].cdf(max(x, scn.cutoff_of(s))))
            return out

        prices.append(vj + integrate(integrand, vj, scn.reserve, tol))
    return np.array(prices)


def _acceptance_probs(scn):
    return {j: float(scn.dists[j].cdf(scn.cutoff_of(j))) for j in scn.access}


def _receipt(scn, accepted, tol):
    """Expected auction receipt of the speculator given the acceptor set,
    i.e. E[min(lowest rival value, reserve)] with access rejectors
    conditioned above their cutoffs."""
    if not accepted:
        return 0.0
    rejectors = [j for j in scn.access if j not in accepted]

    def survival_all(x):
        out = _outside_survival(scn, x)
        for j in rejectors:
            vj = scn.cutoff_of(j)
            Fj = scn.dists[j].cdf
            out *= (1.0 - float(Fj(max(x, vj)))) / (1.0 - float(Fj(vj)))
        return out

    return integrate(survival_all, 0.0, scn.reserve, tol)


def _subsets(scn):
    """Acceptor subsets with their probabilities, skipping zero-probability
    ones (cutoff 0 forces rejection; F(cutoff) = 1 forces acceptance)."""
    probs = _acceptance_probs(scn)
    members = list(scn.access)
    if len(members) > _ENUM_BOUND:
        raise ValueError(
            f"access set of size {len(members)} exceeds the enumeration bound "
            f"{_ENUM_BOUND}; use the Monte Carlo simulator instead")
    for mask in range(1 << len(members)):
        pr = 1.0
        subset = []
        for bit, j in enumerate(members):
            if mask >> bit & 1:
                pr *= probs[j]
                subset.append(j)
            else:
                pr *= 1.0 - probs[j]
        if pr > 0.0:
            yield tuple(subset), pr


def asym_profit(scn, tol=DEFAULT_TOL):
    """Speculator's expected profit by exact enumeration of acceptor sets."""
    prices = asym_prices(scn, tol)
    probs = _acceptance_probs(scn)
    total = sum(pr * _receipt(scn, subset, tol) for subset, pr in _subsets(scn))
    total -= sum(probs[j] * prices[idx] for idx, j in enumerate(scn.access))
    return total


@dataclass
class Condition1Result:
    satisfied: bool
    witness: tuple | None
    conclusive: bool

    def __bool__(self):
        return self.satisfied


def _ratio_trend(dist_i, dist_k):
    """Classify the v -> 0 trend of v F_i(v) / F_k(v): True (vanishes),
    False (bounded away from 0 or diverging), or None (inconclusive)."""
    ratios = []
    for v in _LIMIT_PROBES:
        denom = float(dist_k.cdf(v))
        if denom <= 0.0:
            return None
        ratios.append(v * float(dist_i.cdf(v)) / denom)
    if all(b <= 0.7 * a for a, b in zip(ratios, ratios[1:])):
        return True
    if ratios[-1] >= 0.9 * ratios[-2]:
        return False
    return None


def check_condition1(scn):
    """Access-set competitiveness check behind asymmetric profitability.

    Looks for a pair of accessible sellers against which every outside
    seller's scaled value mass vanishes toward 0.  Numerically evaluated on
    a decreasing probe sequence; an unclear trend is reported as
    inconclusive rather than decided.
    """
    if len(scn.access) < 2:
        return Condition1Result(False, None, True)
    if not scn.outside:
        return Condition1Result(True, tuple(scn.access[:2]), True)
    saw_inconclusive = False
    for k, k2 in combinations(scn.access, 2):
        verdicts = [_ratio_trend(scn.dists[i], scn.dists[kk])
                    for i in scn.outside for kk in (k, k2)]
        if all(v is True for v in verdicts):
            return Condition1Result(True, (k, k2), True)
        if any(v is None for v in verdicts):
            saw_inconclusive = True
    return Condition1Result(False, None, not saw_inconclusive)


def enhanced_prices(scn, tol=DEFAULT_TOL):
    """Acquisition prices under the return-and-refund scheme (access order)."""
    prices = []
    for j in scn.access:
        vj = scn.cutoff_of(j)
        others = [s for s in scn.access if s != j]

        def below(x):
            out = 1.0
            for s in others:
                out *= 1.0 - float(scn.dists[s].cdf(min(x, scn.cutoff_of(s))))
            return out

        def above(x):
            out = _outside_survival(scn, x)
            for s in others:
                out *= 1.0 - float(scn.dists[s].cdf(max(x, scn.cutoff_of(s))))
            return out

        prices.append(integrate(below, 0.0, vj, tol)
                      + integrate(above, vj, scn.reserve, tol))
    return np.array(prices)


def _expected_min_accepted(scn, subset, tol):
    """E[min value among acceptors in subset | each below its own cutoff]."""
    hi = max(scn.cutoff_of(j) for j in subset)
    if hi == 0.0:
        return 0.0

    def survival(x):
        out = 1.0
        for j in subset:
            vj = scn.cutoff_of(j)
            Fj = scn.dists[j].cdf
            out *= 1.0 - float(Fj(min(x, vj))) / float(Fj(vj))
        return out

    return integrate(survival, 0.0, hi, tol)


def enhanced_profit(scn, tol=DEFAULT_TOL):
    """Expected profit of the enhanced scheme: auction receipt, plus revenue
    from selling the k-1 surplus items back at the lowest acceptor value,
    minus the (lower) acquisition prices."""
    prices = enhanced_prices(scn, tol)
    probs = _acceptance_probs(scn)
    total = 0.0
    refund_total = 0.0
    for subset, pr in _subsets(scn):
        contribution = _receipt(scn, subset, tol)
        if len(subset) >= 2:
            refund = (len(subset) - 1) * _expected_min_accepted(scn, subset, tol)
            contribution += refund
            refund_total += pr * refund
        total += pr * contribution
    total -= sum(probs[j] * prices[idx] for idx, j in enumerate(scn.access))
    knockout = (len(scn.access) == scn.n_sellers
                and all(v == scn.reserve for v in scn.cutoffs))
    return EnhancedOutcome(prices=prices, profit=total,
                           refund_revenue_expectation=refund_total,
                           knockout=knockout)


def fpa_knockout_deviation(env, value, tol=DEFAULT_TOL, epsilon=1e-6):
    """Payoff comparison showing complete knockout fails under the
    first-price rule: a seller with the given value gains by bidding just
    under the reserve instead of selling out."""
    if value >= env.reserve:
        raise ValueError(f"value must lie below the reserve, got {value}")
    if float(env.dist.cdf(env.reserve)) >= 1.0:
        raise ValueError(
            "F(reserve) = 1: rejection never happens on path and the "
            "knockout argument does not apply")
    F = env.dist.cdf
    equilibrium = integrate(lambda x: (1.0 - F(x)) ** (env.n_sellers - 1),
                            value, env.reserve, tol)
    deviation = env.reserve - epsilon - value
    return equilibrium, deviation
