"""Monte Carlo validation of the analytic equilibria.

Plays the full speculation game replication by replication under the
characterized strategies and aggregates payoff and welfare estimates with
standard errors.  The simulator only validates: it never solves for
equilibrium objects itself.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from . import extensions, fpa, spa
from .valuedist import TruncatedBelow

_CHUNK = 1 << 17

FORMATS = ("spa", "fpa", "enhanced")


@dataclass
class SimConfig:
    format: str
    replications: int
    seed: int
    env: spa.AuctionEnv | None = None            # symmetric game
    cutoff: float | None = None
    scenario: extensions.AsymScenario | None = None  # asymmetric game
    auctioneer_value: float | None = None        # defaults to the reserve
    trace_path: str | None = None

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.format == "fpa" and self.scenario is not None:
            raise ValueError("the first-price simulator only supports symmetric sellers")
        if self.scenario is None:
            if self.env is None or self.cutoff is None:
                raise ValueError("symmetric runs need env and cutoff")
            if not 0.0 <= self.cutoff <= self.env.reserve:
                raise ValueError(
                    f"cutoff must be in [0, {self.env.reserve}], got {self.cutoff}")

    @property
    def reserve(self):
        return self.scenario.reserve if self.scenario is not None else self.env.reserve

    @property
    def v0(self):
        return self.reserve if self.auctioneer_value is None else self.auctioneer_value


@dataclass
class Estimate:
    mean: float
    std_error: float

    def as_tuple(self):
        return (self.mean, self.std_error)


@dataclass
class SimReport:
    format: str
    replications: int
    seed: int
    speculator_profit: Estimate
    seller_surplus_total: Estimate
    auctioneer_cost: Estimate
    efficiency_loss: Estimate
    counterfactual_seller_surplus: Estimate
    counterfactual_auctioneer_cost: Estimate
    trade_frequency: float
    interim_payoff_at_cutoff: Estimate | None = None

    def to_dict(self):
        out = {"format": self.format, "replications": self.replications,
               "seed": self.seed, "trade_frequency": self.trade_frequency}
        for name in ("speculator_profit", "seller_surplus_total", "auctioneer_cost",
                     "efficiency_loss", "counterfactual_seller_surplus",
                     "counterfactual_auctioneer_cost"):
            est = getattr(self, name)
            out[name] = {"mean": est.mean, "std_error": est.std_error}
        if self.interim_payoff_at_cutoff is not None:
            out["interim_payoff_at_cutoff"] = {
                "mean": self.interim_payoff_at_cutoff.mean,
                "std_error": self.interim_payoff_at_cutoff.std_error}
        return out


class _Accumulator:
    def __init__(self, names):
        self.n = 0
        self.sums = {k: 0.0 for k in names}
        self.sq = {k: 0.0 for k in names}

    def add(self, **arrays):
        counted = False
        for k, arr in arrays.items():
            self.sums[k] += float(arr.sum())
            self.sq[k] += float((arr * arr).sum())
            if not counted:
                self.n += arr.size
                counted = True

    def estimate(self, name):
        mean = self.sums[name] / self.n
        var = max(self.sq[name] / self.n - mean * mean, 0.0)
        return Estimate(mean, float(np.sqrt(var / self.n)))


def _chunks(total):
    done = 0
    while done < total:
        size = min(_CHUNK, total - done)
        yield size
        done += size


def _rng_streams(seed, n):
    return [np.random.default_rng(child)
            for child in np.random.SeedSequence(seed).spawn(n)]


def _standard_spa_outcome(values, reserve):
    """Speculator-free second-price auction on each row of values."""
    part = np.partition(values, 1, axis=1)
    vmin, v2 = part[:, 0], part[:, 1]
    trade = vmin <= reserve
    price = np.where(trade, np.minimum(v2, reserve), 0.0)
    surplus = np.where(trade, price - vmin, 0.0)
    return trade, price, surplus, vmin


def _simulate_spa_chunk(env, cutoff, price, v0, values, acc):
    reserve = env.reserve
    accept = values < cutoff
    k = accept.sum(axis=1)
    spec_in = k >= 1
    rival_min = np.where(accept, np.inf, values).min(axis=1)
    received = np.minimum(rival_min, reserve)

    trade0, cf_price, cf_surplus, vmin = _standard_spa_outcome(values, reserve)

    profit = np.where(spec_in, received - k * price, 0.0)
    cost = np.where(spec_in, received, cf_price)
    trade = spec_in | trade0

    surplus = ((price - values) * accept).sum(axis=1)
    surplus += np.where(~spec_in, cf_surplus, 0.0)

    sum_accepted = (values * accept).sum(axis=1)
    bench = np.where(trade0, vmin, v0 - reserve)
    realized = np.where(spec_in, sum_accepted, bench)
    acc.add(profit=profit, surplus=surplus, cost=cost,
            eff=realized - bench, cf_surplus=cf_surplus, cf_cost=cf_price,
            trade=trade.astype(float))
    return profit, cost


def _standard_fpa_bid(env, values):
    """Symmetric speculator-free first-price bid for values <= reserve."""
    surv = env.dist.survival(values) ** (env.n_sellers - 1)
    tail = spa.survival_tail(env, env.n_sellers - 1, values)
    with np.errstate(divide="ignore", invalid="ignore"):
        bid = values + tail / surv
    return np.where(surv > 0.0, bid, values)


def _standard_fpa_outcome(env, values):
    reserve = env.reserve
    vmin = values.min(axis=1)
    trade = vmin <= reserve
    bid = _standard_fpa_bid(env, np.minimum(vmin, reserve))
    price = np.where(trade, bid, 0.0)
    surplus = np.where(trade, price - vmin, 0.0)
    return trade, price, surplus, vmin


def _simulate_fpa_chunk(env, cutoff, price, subgames, v0, values, spec_u, acc):
    reserve = env.reserve
    N = env.n_sellers
    accept = values < cutoff
    k = accept.sum(axis=1)
    spec_in = k >= 1

    trade0, cf_price, cf_surplus, vmin = _standard_fpa_outcome(env, values)

    profit = np.zeros(len(values))
    surplus = ((price - values) * accept).sum(axis=1)
    cost = np.zeros(len(values))
    realized = np.zeros(len(values))
    sum_accepted = (values * accept).sum(axis=1)
    rej_min = np.where(accept, np.inf, values).min(axis=1)

    rows0 = k == 0
    cost[rows0] = cf_price[rows0]
    surplus[rows0] += cf_surplus[rows0]
    realized[rows0] = np.where(trade0[rows0], vmin[rows0], v0 - reserve)

    for kk in range(1, N):
        rows = k == kk
        if not rows.any():
            continue
        sol = subgames[N - kk]
        seller_bid = sol.beta(rej_min[rows])
        spec_bid = sol.psi_quantile(spec_u[rows])
        seller_wins = seller_bid < spec_bid  # ties go to the speculator
        paid = np.where(seller_wins, seller_bid, spec_bid)
        profit[rows] = np.where(seller_wins, 0.0, spec_bid) - kk * price
        surplus[rows] += np.where(seller_wins, seller_bid - rej_min[rows], 0.0)
        cost[rows] = paid
        realized[rows] = sum_accepted[rows] + np.where(seller_wins, rej_min[rows], 0.0)

    rowsN = k == N
    profit[rowsN] = reserve - N * price
    cost[rowsN] = reserve
    realized[rowsN] = sum_accepted[rowsN]

    bench = np.where(trade0, vmin, v0 - reserve)
    trade = spec_in | trade0
    acc.add(profit=profit, surplus=surplus, cost=cost,
            eff=realized - bench, cf_surplus=cf_surplus, cf_cost=cf_price,
            trade=trade.astype(float))
    return profit, cost


def _simulate_enhanced_chunk(scn, prices, refund_on, v0, values, acc):
    """Asymmetric second-price stage with an optional return-and-refund stage."""
    reserve = scn.reserve
    n_rows = len(values)
    cutvec = np.zeros(scn.n_sellers)
    price_vec = np.zeros(scn.n_sellers)
    in_access = np.zeros(scn.n_sellers, dtype=bool)
    for idx, j in enumerate(scn.access):
        cutvec[j] = scn.cutoffs[idx]
        price_vec[j] = prices[idx]
        in_access[j] = True

    accept = (values < cutvec[None, :]) & in_access[None, :]
    k = accept.sum(axis=1)
    spec_in = k >= 1
    rival_min = np.where(accept, np.inf, values).min(axis=1)
    received = np.minimum(rival_min, reserve)

    trade0, cf_price, cf_surplus, vmin = _standard_spa_outcome(values, reserve)

    acc_values = np.where(accept, values, np.inf)
    acc_min = np.where(spec_in, acc_values.min(axis=1), 0.0)
    paid_out = (accept * price_vec[None, :]).sum(axis=1)

    if refund_on:
        refund = np.where(k >= 2, (k - 1) * acc_min, 0.0)
        # every acceptor either delivers (the minimum) or buys back at acc_min
        surplus_acc = paid_out - k * acc_min
        realized_spec = acc_min
    else:
        refund = np.zeros(n_rows)
        surplus_acc = paid_out - (np.where(accept, values, 0.0)).sum(axis=1)
        realized_spec = (np.where(accept, values, 0.0)).sum(axis=1)

    profit = np.where(spec_in, received + refund - paid_out, 0.0)
    cost = np.where(spec_in, received, cf_price)
    surplus = np.where(spec_in, surplus_acc, cf_surplus)
    bench = np.where(trade0, vmin, v0 - reserve)
    realized = np.where(spec_in, realized_spec, bench)
    trade = spec_in | trade0
    acc.add(profit=profit, surplus=surplus, cost=cost,
            eff=realized - bench, cf_surplus=cf_surplus, cf_cost=cf_price,
            trade=trade.astype(float))
    return profit, cost


def _draw_symmetric(env, rng, size):
    u = rng.random((size, env.n_sellers + 1))
    return env.dist.quantile(u[:, :env.n_sellers]), u[:, env.n_sellers]


def simulate(config):
    """Run the configured game and return estimates with standard errors.

    Bit-identical output for identical configs including the seed.
    """
    names = ("profit", "surplus", "cost", "eff", "cf_surplus", "cf_cost", "trade")
    acc = _Accumulator(names)
    sizes = list(_chunks(config.replications))
    rngs = _rng_streams(config.seed, len(sizes))
    tracer = _Tracer(config.trace_path) if config.trace_path else None

    if config.scenario is not None:
        scn = config.scenario
        if config.format == "enhanced":
            prices = extensions.enhanced_prices(scn)
        else:
            prices = extensions.asym_prices(scn)
        for size, rng in zip(sizes, rngs):
            u = rng.random((size, scn.n_sellers + 1))
            values = np.column_stack([scn.dists[j].quantile(u[:, j])
                                      for j in range(scn.n_sellers)])
            profit, cost = _simulate_enhanced_chunk(
                scn, prices, config.format == "enhanced", config.v0, values, acc)
            if tracer:
                tracer.write(values, profit, cost)
    elif config.format == "spa":
        price = spa.price_from_cutoff(config.env, config.cutoff)
        for size, rng in zip(sizes, rngs):
            values, _ = _draw_symmetric(config.env, rng, size)
            profit, cost = _simulate_spa_chunk(
                config.env, config.cutoff, price, config.v0, values, acc)
            if tracer:
                tracer.write(values, profit, cost)
    else:
        env = config.env
        price = fpa.price_from_cutoff(env, config.cutoff)
        subgames = {m: fpa.solve_subgame(env, m, config.cutoff)
                    for m in range(1, env.n_sellers)}
        for size, rng in zip(sizes, rngs):
            values, spec_u = _draw_symmetric(env, rng, size)
            profit, cost = _simulate_fpa_chunk(
                env, config.cutoff, price, subgames, config.v0, values, spec_u, acc)
            if tracer:
                tracer.write(values, profit, cost)
    if tracer:
        tracer.close()

    return SimReport(
        format=config.format,
        replications=config.replications,
        seed=config.seed,
        speculator_profit=acc.estimate("profit"),
        seller_surplus_total=acc.estimate("surplus"),
        auctioneer_cost=acc.estimate("cost"),
        efficiency_loss=acc.estimate("eff"),
        counterfactual_seller_surplus=acc.estimate("cf_surplus"),
        counterfactual_auctioneer_cost=acc.estimate("cf_cost"),
        trade_frequency=acc.sums["trade"] / acc.n,
    )


def welfare_accounts(config):
    """Simulate and return just the welfare-side estimates."""
    report = simulate(config)
    return {"efficiency_loss": report.efficiency_loss,
            "seller_surplus_total": report.seller_surplus_total,
            "auctioneer_cost": report.auctioneer_cost,
            "counterfactual_seller_surplus": report.counterfactual_seller_surplus,
            "counterfactual_auctioneer_cost": report.counterfactual_auctioneer_cost,
            "trade_frequency": report.trade_frequency}


class _Tracer:
    def __init__(self, path):
        self._fh = open(path, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._header_done = False
        self._rep = 0

    def write(self, values, profit, cost):
        if not self._header_done:
            cols = [f"v{i}" for i in range(values.shape[1])]
            self._writer.writerow(["rep"] + cols + ["speculator_profit", "auction_price"])
            self._header_done = True
        for row, p, c in zip(values, profit, cost):
            self._writer.writerow([self._rep] + [f"{x:.12g}" for x in row]
                                  + [f"{p:.12g}", f"{c:.12g}"])
            self._rep += 1

    def close(self):
        self._fh.close()


def interim_payoff_probe(config, value):
    """Expected payoff of one seller with a pinned value, under both the
    accept and the reject branch, with the rest of the game in equilibrium.

    Returns (accept, reject) Estimates.  Symmetric SPA and FPA only.
    """
    if config.scenario is not None:
        raise ValueError("probe supports the symmetric formats only")
    env, cutoff = config.env, config.cutoff
    N, reserve = env.n_sellers, env.reserve
    if config.format == "spa":
        price = spa.price_from_cutoff(env, cutoff)
        subgames = None
    else:
        price = fpa.price_from_cutoff(env, cutoff)
        subgames = {m: fpa.solve_subgame(env, m, cutoff) for m in range(1, N)}

    acc = _Accumulator(("accept", "reject"))
    sizes = list(_chunks(config.replications))
    for size, rng in zip(sizes, _rng_streams(config.seed, len(sizes))):
        u = rng.random((size, N))
        others = env.dist.quantile(u[:, :N - 1])
        spec_u = u[:, N - 1]
        other_accept = others < cutoff
        ka = other_accept.sum(axis=1)
        others_min = others.min(axis=1)
        rej_min = np.where(other_accept, np.inf, others).min(axis=1)

        accept_payoff = np.full(size, price - value)

        reject_payoff = np.zeros(size)
        if config.format == "spa":
            win = (ka == 0) & (value < others_min) & (value <= reserve)
            reject_payoff[win] = np.minimum(others_min[win], reserve) - value
        else:
            rows0 = ka == 0
            if value <= reserve:
                bid0 = float(_standard_fpa_bid(env, np.array([value]))[0])
                win0 = rows0 & (value < others_min)
                reject_payoff[win0] = bid0 - value
            for kk in range(1, N):
                rows = ka == kk
                if not rows.any():
                    continue
                sol = subgames[N - kk]
                my_bid = float(sol.beta(value))
                spec_bid = sol.psi_quantile(spec_u[rows])
                rival_bid = (sol.beta(rej_min[rows]) if kk < N - 1
                             else np.full(rows.sum(), np.inf))
                win = (my_bid < spec_bid) & (my_bid < rival_bid)
                reject_payoff[rows] = np.where(win, my_bid - value, 0.0)
        acc.add(accept=accept_payoff, reject=reject_payoff)
    return acc.estimate("accept"), acc.estimate("reject")


def simulate_decomposition(env, cutoff, replications, seed):
    """Monte Carlo estimates of the two-seller profit decomposition:
    gain from withholding, overcompensation loss, value destruction loss."""
    if env.n_sellers != 2:
        raise ValueError("decomposition is defined for exactly 2 sellers")
    price = spa.price_from_cutoff(env, cutoff)
    acc = _Accumulator(("gain", "overcomp", "destroyed"))
    sizes = list(_chunks(replications))
    for size, rng in zip(sizes, _rng_streams(seed, len(sizes))):
        values = env.dist.quantile(rng.random((size, 2)))
        accept = values < cutoff
        both = accept.all(axis=1)
        vmax = values.max(axis=1)
        # overpayment to an acceptor over the speculator-free interim payment
        over = (accept * (price - values
                          - spa.survival_tail(env, 1, values))).sum(axis=1)
        acc.add(gain=np.where(both, env.reserve - vmax, 0.0),
                overcomp=over,
                destroyed=np.where(both, vmax, 0.0))
    return {k: acc.estimate(k) for k in ("gain", "overcomp", "destroyed")}


def subgame_interim_payoff(env, m, cutoff, value, replications, seed):
    """Simulated payoff of a seller with the given value inside the
    first-price subgame against m-1 peer sellers and the speculator."""
    sol = fpa.solve_subgame(env, m, cutoff)
    trunc = TruncatedBelow(env.dist, cutoff) if cutoff < 1.0 else None
    acc = _Accumulator(("payoff",))
    sizes = list(_chunks(replications))
    for size, rng in zip(sizes, _rng_streams(seed, len(sizes))):
        u = rng.random((size, m))
        spec_bid = sol.psi_quantile(u[:, 0])
        my_bid = float(sol.beta(value))
        if m > 1:
            peer_values = trunc.quantile(u[:, 1:])
            peer_bid = sol.beta(peer_values).min(axis=1)
            win = (my_bid < spec_bid) & (my_bid < peer_bid)
        else:
            win = my_bid < spec_bid
        acc.add(payoff=np.where(win, my_bid - value, 0.0))
    return acc.estimate("payoff")
