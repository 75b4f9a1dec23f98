"""First-price speculation engine and auction subgames."""

import numpy as np
import pytest

from specauction import fpa, spa
from specauction.valuedist import make_power, make_uniform

ENV = spa.AuctionEnv(2, 1.0, make_uniform())


def test_subgame_argument_validation():
    with pytest.raises(ValueError):
        fpa.solve_subgame(ENV, 0, 0.2)
    with pytest.raises(ValueError):
        fpa.solve_subgame(ENV, 2, 0.2)
    with pytest.raises(ValueError):
        fpa.solve_subgame(ENV, 1, 1.5)


def test_subgame_uniform_closed_form():
    # max of b(1-b)/0.8 on [0.2, 1] is 0.3125 at b = 0.5
    sol = fpa.solve_subgame(ENV, 1, 0.2)
    assert abs(sol.b_low - 0.3125) < 1e-9
    assert abs(sol.b_high - 0.5) < 1e-7
    assert not sol.degenerate
    # bid map: beta(v) = b_low / [(1-v)/0.8] below b_high, identity above
    assert abs(float(sol.beta(0.3)) - 0.25 / 0.7) < 1e-9
    assert abs(float(sol.beta(0.8)) - 0.8) < 1e-12
    # inverse is exact through the quantile
    vs = np.linspace(0.2, sol.b_high - 1e-9, 50)
    assert np.abs(sol.beta_inv(sol.beta(vs)) - vs).max() < 1e-9


def test_subgame_degenerate_at_high_cutoff():
    # cutoff 0.5 >= interior maximizer, so the subgame collapses
    sol = fpa.solve_subgame(ENV, 1, 0.5)
    assert sol.degenerate
    assert abs(sol.b_low - 0.5) < 1e-9
    assert float(sol.psi(0.5)) == 1.0
    assert float(sol.psi(0.49)) == 0.0
    assert np.all(sol.psi_quantile(np.linspace(0, 1, 5)) == sol.b_low)


def test_psi_is_valid_mixing_cdf():
    sol = fpa.solve_subgame(ENV, 1, 0.2)
    bs = np.linspace(sol.b_low, sol.b_high, 400)
    psi = sol.psi(bs)
    assert psi[0] < 1e-9                       # no mass below b_low
    assert (np.diff(psi) >= -1e-12).all()
    assert 1.0 - psi[-1] <= 1.1e-6             # clamped tail mass
    u = np.linspace(1e-9, 1 - 1e-9, 500)
    assert np.abs(sol.psi(sol.psi_quantile(u)) - u).max() < 2e-6


def test_speculator_indifferent_on_support():
    for env, m, cutoff in [(ENV, 1, 0.2),
                           (spa.AuctionEnv(3, 0.9, make_power(2.0)), 2, 0.3)]:
        sol = fpa.solve_subgame(env, m, cutoff)
        Fc = float(env.dist.cdf(cutoff))
        bs = np.linspace(sol.b_low, sol.b_high, 100)
        surv = (1.0 - env.dist.cdf(sol.beta_inv(bs))) / (1.0 - Fc)
        assert np.abs(bs * surv ** m - sol.b_low).max() < 1e-9


def test_benchmark_bid_uniform():
    # v + int_v^1 [(1-x)/0.8] dx / [(1-v)/0.8]: 0.6 at v=0.2, 0.7 at v=0.4
    assert abs(fpa.benchmark_bid(ENV, 1, 0.2, 0.2) - 0.6) < 1e-9
    assert abs(fpa.benchmark_bid(ENV, 1, 0.2, 0.4) - 0.7) < 1e-9


def test_price_map_boundary_values():
    # price map runs from the speculator-free interim payoff to the reserve
    assert abs(fpa.price_from_cutoff(ENV, 0.0) - spa.pi0(ENV)) < 1e-10
    assert abs(fpa.price_from_cutoff(ENV, 1.0) - ENV.reserve) < 1e-9
    env = spa.AuctionEnv(3, 0.9, make_power(2.0))
    assert abs(fpa.price_from_cutoff(env, 0.9) - 0.9) < 1e-9


def test_price_map_strictly_increasing_and_invertible():
    vs = np.linspace(0.0, 1.0, 30)
    ps = np.array([fpa.price_from_cutoff(ENV, float(v)) for v in vs])
    assert (np.diff(ps) > 0).all()
    for cutoff in (0.1, 0.3, 0.6):
        p = fpa.price_from_cutoff(ENV, cutoff)
        assert abs(fpa.cutoff_from_price(ENV, p) - cutoff) < 1e-8


def test_fpa_price_exceeds_spa_price():
    # aggressive subgame bidding raises the sellers' outside option
    for cutoff in (0.1, 0.2, 0.4):
        assert (fpa.price_from_cutoff(ENV, cutoff)
                > spa.price_from_cutoff(ENV, cutoff) + 1e-6)


def test_profit_uniform_values():
    assert abs(fpa.profit(ENV, 0.2) - (-0.077)) < 1e-9
    assert abs(fpa.profit(ENV, 0.5) - (-0.125)) < 1e-9
    assert fpa.profit(ENV, 0.0) == 0.0


def test_optimize_abandons_when_unprofitable():
    eq = fpa.optimize(ENV)
    assert eq.cutoff == 0.0 and eq.profit == 0.0
    assert eq.to_dict()["format"] == "fpa"


def test_optimize_finds_profitable_cutoff_small_eta():
    env = spa.AuctionEnv(2, 1.0, make_power(0.2))
    eq = fpa.optimize(env)
    assert eq.profit > 0.15
    assert 0.0 < eq.cutoff < 1.0


def test_region_scan_rows_and_flags():
    rows = fpa.region_scan(2, [0.2, 2.0], [0.5, 1.0])
    assert len(rows) == 4
    assert set(rows[0]) == {"eta", "r", "profit", "profitable"}
    flags = {(row["eta"], row["r"]): row["profitable"] for row in rows}
    assert flags[(0.2, 1.0)] is True
    assert flags[(2.0, 1.0)] in (False, None)
