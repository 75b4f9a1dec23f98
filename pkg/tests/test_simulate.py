"""Monte Carlo simulator: determinism, agreement, probes, tracing."""

import csv

import numpy as np
import pytest

from specauction import extensions as ext
from specauction import fpa, spa
from specauction import simulate as sim
from specauction.valuedist import make_uniform

U = make_uniform()
ENV = spa.AuctionEnv(2, 1.0, U)
REPS = 200_000


def test_config_validation():
    with pytest.raises(ValueError):
        sim.SimConfig(format="vcg", replications=10, seed=0, env=ENV, cutoff=0.2)
    with pytest.raises(ValueError):
        sim.SimConfig(format="spa", replications=0, seed=0, env=ENV, cutoff=0.2)
    with pytest.raises(ValueError):
        sim.SimConfig(format="spa", replications=10, seed=0)
    with pytest.raises(ValueError):
        sim.SimConfig(format="spa", replications=10, seed=0, env=ENV, cutoff=1.5)
    scn = ext.AsymScenario(2, 1.0, (U, U), (0, 1), (0.5, 0.5))
    with pytest.raises(ValueError):
        sim.SimConfig(format="fpa", replications=10, seed=0, scenario=scn)


def test_seeded_runs_are_deterministic():
    cfg = sim.SimConfig(format="spa", replications=REPS, seed=5, env=ENV, cutoff=0.2)
    a = sim.simulate(cfg)
    b = sim.simulate(sim.SimConfig(format="spa", replications=REPS, seed=5,
                                   env=ENV, cutoff=0.2))
    assert a.to_dict() == b.to_dict()
    c = sim.simulate(sim.SimConfig(format="spa", replications=REPS, seed=6,
                                   env=ENV, cutoff=0.2))
    assert c.speculator_profit.mean != a.speculator_profit.mean


def _close(est, target, k=4.0):
    return abs(est.mean - target) <= max(k * est.std_error, 1e-12)


def test_spa_profit_and_welfare_match_analytics():
    rep = sim.simulate(sim.SimConfig(format="spa", replications=REPS, seed=1,
                                     env=ENV, cutoff=0.3))
    assert _close(rep.speculator_profit, spa.profit(ENV, 0.3))
    # uniform two-seller benchmark: E[min] = 1/3, speculator-free price
    # E[min(max, r)] = 2/3, so counterfactual surplus is 1/3
    assert _close(rep.counterfactual_auctioneer_cost, 2.0 / 3.0)
    assert _close(rep.counterfactual_seller_surplus, 1.0 / 3.0)
    assert rep.trade_frequency == 1.0
    # value destruction: both accept and the high item is wasted
    _, _, destroyed = spa.decompose_two_sellers(ENV, 0.3)
    assert _close(rep.efficiency_loss, destroyed)


def test_fpa_profit_matches_analytics():
    rep = sim.simulate(sim.SimConfig(format="fpa", replications=REPS, seed=2,
                                     env=ENV, cutoff=0.2))
    assert _close(rep.speculator_profit, fpa.profit(ENV, 0.2))


def test_enhanced_profit_matches_enumeration():
    scn = ext.AsymScenario(2, 1.0, (U, U), (0, 1), (0.5, 0.5))
    rep = sim.simulate(sim.SimConfig(format="enhanced", replications=REPS,
                                     seed=3, scenario=scn))
    assert _close(rep.speculator_profit, ext.enhanced_profit(scn).profit)


def test_asym_spa_profit_matches_enumeration():
    scn = ext.AsymScenario(3, 0.9, (U, U, make_uniform()), (0, 1), (0.3, 0.3))
    rep = sim.simulate(sim.SimConfig(format="spa", replications=REPS,
                                     seed=4, scenario=scn))
    assert _close(rep.speculator_profit, ext.asym_profit(scn))


def test_interim_probe_indifference_at_cutoff():
    cfg = sim.SimConfig(format="spa", replications=REPS, seed=7, env=ENV, cutoff=0.2)
    accept, reject = sim.interim_payoff_probe(cfg, 0.2)
    # the cutoff type is exactly indifferent
    assert abs(accept.mean - (spa.price_from_cutoff(ENV, 0.2) - 0.2)) < 1e-12
    assert _close(reject, accept.mean)
    # strictly below the cutoff, accepting is strictly better
    accept_lo, reject_lo = sim.interim_payoff_probe(cfg, 0.1)
    assert accept_lo.mean > reject_lo.mean + 3.0 * reject_lo.std_error


def test_subgame_interim_payoff_matches_support_bottom():
    sol = fpa.solve_subgame(ENV, 1, 0.2)
    est = sim.subgame_interim_payoff(ENV, 1, 0.2, 0.2, REPS, 8)
    assert _close(est, sol.b_low - 0.2)


def test_welfare_accounts_keys():
    out = sim.welfare_accounts(sim.SimConfig(format="spa", replications=10_000,
                                             seed=9, env=ENV, cutoff=0.2))
    assert set(out) == {"efficiency_loss", "seller_surplus_total",
                        "auctioneer_cost", "counterfactual_seller_surplus",
                        "counterfactual_auctioneer_cost", "trade_frequency"}


def test_trace_csv(tmp_path):
    path = tmp_path / "trace.csv"
    sim.simulate(sim.SimConfig(format="spa", replications=50, seed=10,
                               env=ENV, cutoff=0.2, trace_path=str(path)))
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["rep", "v0", "v1", "speculator_profit", "auction_price"]
    assert len(rows) == 51
    assert [int(r[0]) for r in rows[1:]] == list(range(50))
