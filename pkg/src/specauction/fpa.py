"""First-price procurement auction speculation equilibrium.

Solves the asymmetric auction subgames between the speculator and the
sellers whose values exceed the acceptance cutoff, then assembles the
price/cutoff maps, the speculator's profit, and the profitability region
scan over the power-family parameter grid.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, log

import numpy as np
from scipy.integrate import cumulative_simpson

from .numerics import DEFAULT_TOL, Tolerances, integrate, find_root, maximize_on_interval
from .spa import AuctionEnv, pi0, survival_tail, _tail_scalar
from .valuedist import make_power

# Mixing CDF is clamped to 1 once the exponent integral passes this cap,
# which bounds the clamped mass by 1e-6.
_PSI_EXP_CAP = -log(1e-6)
_PSI_GRID = 16384

# Region scans trade quadrature sharpness for throughput; the golden-section
# refinement keeps located maxima far more accurate than the cell margin.
REGION_TOL = Tolerances(quad_abs_tol=1e-10, root_tol=1e-12,
                        argmax_tol=1e-9, grid_points=256)


@dataclass
class FpaSubgameSolution:
    """Equilibrium of the subgame <reserve, m, G(.; cutoff)>.

    beta / beta_inv are the sellers' bid map and its inverse, psi /
    psi_quantile the speculator's mixing CDF and its quantile map.  All four
    accept scalars or arrays.
    """

    m: int
    cutoff: float
    b_low: float
    b_high: float
    degenerate: bool
    beta: object = field(repr=False)
    beta_inv: object = field(repr=False)
    psi: object = field(repr=False)
    psi_quantile: object = field(repr=False)


@dataclass
class FpaEquilibrium:
    cutoff: float
    price: float
    profit: float
    pi0: float
    subgames: list

    def to_dict(self):
        return {"format": "fpa", "cutoff": self.cutoff, "price": self.price,
                "profit": self.profit, "pi0": self.pi0,
                "subgames": [{"m": s.m, "b_low": s.b_low, "b_high": s.b_high,
                              "degenerate": s.degenerate} for s in self.subgames]}


@lru_cache(maxsize=200000)
def _bid_bounds(env, m, cutoff, tol):
    """(b_low, b_high): max and smallest maximizer of b [1 - G(b)]^m on
    [cutoff, reserve]."""
    Fc = float(env.dist.cdf(cutoff))
    if 1.0 - Fc <= 0.0 or cutoff >= env.reserve:
        return env.reserve if cutoff >= env.reserve else cutoff, cutoff

    def objective(b):
        surv = np.clip((1.0 - env.dist.cdf(b)) / (1.0 - Fc), 0.0, 1.0)
        return b * surv ** m

    b_high, b_low = maximize_on_interval(objective, cutoff, env.reserve, tol)
    return b_low, b_high


def solve_subgame(env, m, cutoff, tol=DEFAULT_TOL):
    """Solve the FPA subgame against m >= 1 sellers truncated below at cutoff."""
    if not 1 <= m <= env.n_sellers - 1:
        raise ValueError(f"m must be in [1, {env.n_sellers - 1}], got {m}")
    if not 0.0 <= cutoff <= env.reserve or cutoff >= 1.0:
        raise ValueError(f"cutoff must be in [0, min(reserve, 1)), got {cutoff}")
    dist = env.dist
    Fc = float(dist.cdf(cutoff))
    tail = 1.0 - Fc
    b_low, b_high = _bid_bounds(env, m, cutoff, tol)
    degenerate = (b_high - cutoff) <= max(10.0 * tol.argmax_tol, 1e-9)

    def surv(v):
        return np.clip((1.0 - dist.cdf(v)) / tail, 0.0, 1.0)

    if degenerate:
        # Mass point at b_low = cutoff; sellers bid their values.
        def beta(v):
            return np.maximum(np.asarray(v, dtype=float), cutoff)

        def beta_inv(b):
            return np.maximum(np.asarray(b, dtype=float), cutoff)

        def psi(b):
            return np.where(np.asarray(b, dtype=float) >= b_low, 1.0, 0.0)

        def psi_quantile(u):
            return np.full_like(np.asarray(u, dtype=float), b_low)

        return FpaSubgameSolution(m, cutoff, b_low, b_high, True,
                                  beta, beta_inv, psi, psi_quantile)

    def beta(v):
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            inner = b_low / surv(np.minimum(v, b_high)) ** m
        return np.where(v <= b_high, inner, v)

    def beta_inv(b):
        b = np.asarray(b, dtype=float)
        bc = np.clip(b, b_low, b_high)
        # Invert 1 - F(x) = (1 - F(cutoff)) (b_low / b)^(1/m) through the
        # base quantile; exact up to quantile accuracy.
        x = dist.quantile(1.0 - tail * (b_low / bc) ** (1.0 / m))
        x = np.clip(x, cutoff, b_high)
        return np.where(b > b_high, b, x)

    # Mixing CDF: exponent integral computed in G-space (u = G(x)), which
    # removes the density factor and its possible endpoint blowup.  The grid
    # clusters toward b_high, where beta(x) - x vanishes (quadratically at an
    # interior maximizer, so points closer than ~3e-6 of the range would
    # drown in floating-point cancellation).
    u_high = np.clip((float(dist.cdf(b_high)) - Fc) / tail, 0.0, 1.0)
    s = np.concatenate([
        np.geomspace(3e-6, 0.5, _PSI_GRID // 4),
        1.0 - np.geomspace(3e-6, 0.5, _PSI_GRID // 4),
        np.linspace(0.0, 1.0, _PSI_GRID // 2),
    ])
    ug = np.unique(np.clip(u_high * s, 0.0, u_high))
    xg = np.asarray(dist.quantile(Fc + ug * tail), dtype=float)
    xg = np.clip(xg, cutoff, b_high)
    bx = beta(xg)
    gap = np.maximum(bx - xg, 1e-30)
    integrand = (bx + (m - 1) * xg) / (gap * (1.0 - ug))
    exponent = np.maximum.accumulate(
        cumulative_simpson(integrand, x=ug, initial=0.0))
    hit = np.flatnonzero(exponent >= _PSI_EXP_CAP)
    if hit.size:
        cut = hit[0] + 1
        ug, exponent = ug[:cut], exponent[:cut]

    def psi(b):
        b = np.asarray(b, dtype=float)
        ub = (dist.cdf(beta_inv(np.clip(b, b_low, b_high))) - Fc) / tail
        expo = np.interp(np.clip(ub, 0.0, 1.0), ug, exponent)
        val = -np.expm1(-expo)
        val = np.where(expo >= exponent[-1], 1.0, val)
        return np.where(b < b_low, 0.0, np.where(b >= b_high, 1.0, val))

    def psi_quantile(u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        with np.errstate(divide="ignore"):
            target = -np.log1p(-u)
        uq = np.interp(target, exponent, ug)
        x = np.asarray(dist.quantile(Fc + uq * tail), dtype=float)
        return np.clip(beta(np.clip(x, cutoff, b_high)), b_low, b_high)

    return FpaSubgameSolution(m, cutoff, b_low, b_high, False,
                              beta, beta_inv, psi, psi_quantile)


def benchmark_bid(env, m, cutoff, v, tol=DEFAULT_TOL):
    """Symmetric-opponents bid: the seller treats the speculator as a peer."""
    if v < cutoff:
        raise ValueError(f"value {v} lies below the truncation point {cutoff}")
    if v > env.reserve:
        return float(v)
    tail = float(env.dist.survival(cutoff))
    sv = float(env.dist.survival(v)) / tail
    inner = integrate(lambda x: (np.clip((1.0 - env.dist.cdf(x)) / tail, 0.0, 1.0)) ** m,
                      v, env.reserve, tol)
    return v + inner / sv ** m


def price_from_cutoff(env, cutoff, tol=DEFAULT_TOL):
    """Acquisition price sustaining a given cutoff under the first-price rule."""
    if not 0.0 <= cutoff <= env.reserve:
        raise ValueError(f"cutoff must be in [0, {env.reserve}], got {cutoff}")
    N = env.n_sellers
    F = float(env.dist.cdf(cutoff))
    S = 1.0 - F
    total = cutoff + _tail_scalar(env, N - 1, cutoff, tol)
    for m in range(N - 1):
        if F == 0.0:
            break  # every term carries a positive power of F
        b_low, _ = _bid_bounds(env, m + 1, cutoff, tol)
        total += comb(N - 1, m) * S ** m * F ** (N - 1 - m) * (b_low - cutoff)
    return total


def cutoff_from_price(env, price, tol=DEFAULT_TOL):
    """Inverse of the (strictly increasing) price map."""
    if price > env.reserve:
        raise ValueError(
            f"price {price} exceeds the reserve {env.reserve}; such an offer is dominated")
    if price < 0.0:
        raise ValueError(f"price must be nonnegative, got {price}")
    if price <= pi0(env, tol):
        return 0.0
    return find_root(lambda v: price_from_cutoff(env, v, tol) - price,
                     0.0, env.reserve, tol)


def profit(env, cutoff, tol=DEFAULT_TOL):
    """Speculator's expected profit at a given cutoff (scalar or array)."""
    if np.ndim(cutoff) != 0:
        return np.array([profit(env, float(v), tol) for v in np.asarray(cutoff)])
    N = env.n_sellers
    F = float(env.dist.cdf(cutoff))
    if F == 0.0:
        return 0.0
    S = 1.0 - F
    total = F ** N * env.reserve
    for m in range(1, N):
        b_low, _ = _bid_bounds(env, m, cutoff, tol)
        total += comb(N, m) * S ** m * F ** (N - m) * b_low
    return total - N * F * price_from_cutoff(env, cutoff, tol)


def optimize(env, tol=DEFAULT_TOL):
    """Global profit maximum over cutoffs in [0, reserve].

    The maximizer can be 0 with zero profit, meaning speculation is abandoned.
    """
    cutoff, best = maximize_on_interval(lambda v: profit(env, v, tol),
                                        0.0, env.reserve, tol)
    if best <= 0.0:
        cutoff, best = 0.0, 0.0
    subgames = [solve_subgame(env, m, cutoff, tol) for m in range(1, env.n_sellers)]
    return FpaEquilibrium(cutoff=cutoff,
                          price=price_from_cutoff(env, cutoff, tol),
                          profit=best,
                          pi0=pi0(env, tol),
                          subgames=subgames)


def region_scan(n_sellers, eta_grid, r_grid, sign_margin=1e-6, tol=REGION_TOL):
    """Profitability classification over the power-family (eta, reserve) grid.

    Returns a row-major list of dicts with keys eta, r, profit, profitable.
    profit is the best profit over interior cutoffs (abandoning at cutoff 0
    always yields exactly 0, so the sign of the interior maximum is what
    separates the two regions).  Near cutoff 0 the profit behaves like
    N F(v) [b_low(N-1, 0) - pi0], so when the interior maximum is too small
    to sign reliably the slope term settles the cell; profitable is
    True/False, or None for cells within sign_margin of the boundary.
    """
    rows = []
    for eta in eta_grid:
        env_dist = make_power(eta)
        for r in r_grid:
            env = AuctionEnv(n_sellers, float(r), env_dist)
            _, best = maximize_on_interval(lambda v: profit(env, v, tol),
                                           1e-3 * env.reserve, env.reserve, tol)
            if best > sign_margin:
                flag = True
            else:
                b_low, _ = _bid_bounds(env, n_sellers - 1, 0.0, tol)
                slope = b_low - pi0(env, tol)
                if slope > sign_margin:
                    flag = True
                elif slope < -sign_margin and best < sign_margin:
                    flag = False
                else:
                    flag = None
            rows.append({"eta": float(eta), "r": float(r),
                         "profit": float(best), "profitable": flag})
    return rows
