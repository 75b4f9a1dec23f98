"""Second-price procurement auction speculation equilibrium."""

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from scipy.integrate import cumulative_simpson

from .numerics import DEFAULT_TOL, integrate, find_root, maximize_on_interval
from .valuedist import ValueDistribution


@dataclass(frozen=True, eq=False)
class AuctionEnv:
    """Game primitives: number of sellers, reserve price, symmetric value law."""

    n_sellers: int
    reserve: float
    dist: ValueDistribution

    def __post_init__(self):
        if self.n_sellers < 2:
            raise ValueError(f"need at least 2 sellers, got {self.n_sellers}")
        if not 0.0 < self.reserve <= 1.0:
            raise ValueError(f"reserve must be in (0, 1], got {self.reserve}")


@dataclass
class SpaEquilibrium:
    cutoff: float
    price: float
    profit: float
    pi0: float
    gain_withholding: float | None = None
    loss_overcompensation: float | None = None
    loss_value_destruction: float | None = None

    def to_dict(self):
        out = {"format": "spa", "cutoff": self.cutoff, "price": self.price,
               "profit": self.profit, "pi0": self.pi0}
        if self.gain_withholding is not None:
            out["gain_withholding"] = self.gain_withholding
            out["loss_overcompensation"] = self.loss_overcompensation
            out["loss_value_destruction"] = self.loss_value_destruction
        return out


@lru_cache(maxsize=512)
def _survival_power_table(env, m, tol):
    # Cumulative Simpson table of x -> int_0^x [1-F]^m, for vectorized tails.
    n = max(4 * tol.grid_points, 8192) + 1
    xs = np.linspace(0.0, env.reserve, n)
    w = env.dist.survival(xs) ** m
    cum = cumulative_simpson(w, x=xs, initial=0.0)
    return xs, cum


def survival_tail(env, m, v, tol=DEFAULT_TOL):
    """Vectorized int_v^reserve [1 - F(x)]^m dx via a cached cumulative table."""
    xs, cum = _survival_power_table(env, int(m), tol)
    v = np.clip(np.asarray(v, dtype=float), 0.0, env.reserve)
    return cum[-1] - np.interp(v, xs, cum)


def _tail_scalar(env, m, v, tol):
    if v >= env.reserve:
        return 0.0
    F = env.dist.cdf
    return integrate(lambda x: (1.0 - F(x)) ** m, v, env.reserve, tol)


def pi0(env, tol=DEFAULT_TOL):
    """Interim payoff of a zero-value seller in the speculator-free auction."""
    return _tail_scalar(env, env.n_sellers - 1, 0.0, tol)


def price_from_cutoff(env, cutoff, tol=DEFAULT_TOL):
    """Acquisition price sustaining a given acceptance cutoff (scalar or array)."""
    if np.ndim(cutoff) == 0:
        c = float(cutoff)
        if not 0.0 <= c <= env.reserve:
            raise ValueError(f"cutoff must be in [0, {env.reserve}], got {c}")
        return c + _tail_scalar(env, env.n_sellers - 1, c, tol)
    cutoff = np.asarray(cutoff, dtype=float)
    return cutoff + survival_tail(env, env.n_sellers - 1, cutoff, tol)


def cutoff_from_price(env, price, tol=DEFAULT_TOL):
    """Acceptance cutoff induced by an acquisition price offer in [0, reserve]."""
    if price > env.reserve:
        raise ValueError(
            f"price {price} exceeds the reserve {env.reserve}; such an offer is dominated")
    if price < 0.0:
        raise ValueError(f"price must be nonnegative, got {price}")
    if price <= pi0(env, tol):
        return 0.0
    return find_root(lambda v: price_from_cutoff(env, v, tol) - price,
                     0.0, env.reserve, tol)


def expected_payment(env, m, cutoff, tol=DEFAULT_TOL):
    """Speculator's expected receipt y(m, v*) from an auction against m sellers."""
    if not 0.0 <= cutoff < 1.0:
        raise ValueError(f"cutoff must be in [0, 1), got {cutoff}")
    if m == 0:
        return env.reserve
    tail = _tail_scalar(env, m, cutoff, tol)
    return cutoff + tail / float(env.dist.survival(cutoff)) ** m


def profit(env, cutoff, tol=DEFAULT_TOL):
    """Speculator's expected profit at a given cutoff (scalar or array).

    Computed in the division-free form sum_m C(N,m) F^(N-m) *
    [(1-F)^m v + int_v^r (1-F)^m] - N F p(v), which is exact at both
    endpoints of [0, reserve].
    """
    scalar = np.ndim(cutoff) == 0
    v = np.atleast_1d(np.asarray(cutoff, dtype=float))
    N = env.n_sellers
    F = env.dist.cdf(v)
    S = 1.0 - F
    if scalar:
        tails = [_tail_scalar(env, m, float(v[0]), tol) for m in range(N)]
    else:
        tails = [survival_tail(env, m, v, tol) for m in range(N)]
    total = np.zeros_like(v)
    for m in range(N):
        total += comb(N, m) * F ** (N - m) * (S ** m * v + tails[m])
    total -= N * F * (v + tails[N - 1])
    return float(total[0]) if scalar else total


def decompose_two_sellers(env, cutoff, tol=DEFAULT_TOL):
    """Split the two-seller profit into (gain from withholding,
    loss from overcompensation, loss from value destruction)."""
    if env.n_sellers != 2:
        raise ValueError("decomposition is defined for exactly 2 sellers")
    if cutoff == 0.0:
        return 0.0, 0.0, 0.0
    F, f = env.dist.cdf, env.dist.pdf
    destroyed = integrate(lambda x: 2.0 * x * F(x) * f(x), 0.0, cutoff, tol)
    gain = float(F(cutoff)) ** 2 * env.reserve - destroyed
    overcomp = 2.0 * integrate(lambda x: F(x) ** 2, 0.0, cutoff, tol)
    return gain, overcomp, destroyed


def limit_ratio(env, tol=DEFAULT_TOL):
    """Small-cutoff limit of profit / F(v*)^2."""
    return comb(env.n_sellers, 2) * _tail_scalar(env, env.n_sellers - 2, 0.0, tol)


def optimize(env, tol=DEFAULT_TOL):
    """Profit-maximizing cutoff over [0, reserve] and the induced equilibrium."""
    cutoff, best = maximize_on_interval(lambda v: profit(env, v, tol),
                                        0.0, env.reserve, tol)
    eq = SpaEquilibrium(cutoff=cutoff,
                        price=price_from_cutoff(env, cutoff, tol),
                        profit=best,
                        pi0=pi0(env, tol))
    if env.n_sellers == 2:
        gain, over, destr = decompose_two_sellers(env, cutoff, tol)
        eq.gain_withholding = gain
        eq.loss_overcompensation = over
        eq.loss_value_destruction = destr
    return eq
