"""Command-line front end: scenario parsing, dispatch, CSV/JSON emission."""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import config as cfgmod
from . import extensions, fpa, spa
from .config import ConfigError
from .numerics import NumericsError
from .simulate import SimConfig, simulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _sig12(x):
    return float(f"{x:.12g}")


def _round_floats(obj):
    if isinstance(obj, float):
        return _sig12(obj)
    if isinstance(obj, (np.floating,)):
        return _sig12(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _emit_json(payload, out_path):
    _emit(json.dumps(_round_floats(payload), indent=2) + "\n", out_path)


def _add_common(parser, config_required=True):
    parser.add_argument("--config", required=config_required,
                        help="path to a JSON scenario file")
    parser.add_argument("--quad-tol", type=float, default=None,
                        help="absolute quadrature tolerance")
    parser.add_argument("--root-tol", type=float, default=None,
                        help="root-finding interval tolerance")
    parser.add_argument("--grid", type=int, default=None,
                        help="scan grid size for maximization")
    parser.add_argument("--out", default=None, help="write output to this file")


def _build_parser():
    top = argparse.ArgumentParser(
        prog="specauction",
        description="Speculation in procurement auctions: equilibrium engines, "
                    "profitability region scans, and a Monte Carlo validator.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spa", help="second-price speculation equilibrium")
    spa_sub = p.add_subparsers(dest="action", required=True)
    s = spa_sub.add_parser("solve", help="equilibrium at a fixed cutoff or price")
    _add_common(s)
    s.add_argument("--cutoff", type=float, default=None)
    s.add_argument("--price", type=float, default=None)
    o = spa_sub.add_parser("optimize", help="profit-maximizing equilibrium")
    _add_common(o)

    p = sub.add_parser("fpa", help="first-price speculation equilibrium")
    fpa_sub = p.add_subparsers(dest="action", required=True)
    s = fpa_sub.add_parser("solve", help="equilibrium at a fixed cutoff or price")
    _add_common(s)
    s.add_argument("--cutoff", type=float, default=None)
    s.add_argument("--price", type=float, default=None)
    o = fpa_sub.add_parser("optimize", help="profit-maximizing equilibrium")
    _add_common(o)
    r = fpa_sub.add_parser("region", help="profitability region over (eta, r)")
    _region_flags(r)

    r = sub.add_parser("region", help="alias of `fpa region`")
    _region_flags(r)

    p = sub.add_parser("asym", help="asymmetric sellers with limited access")
    asym_sub = p.add_subparsers(dest="action", required=True)
    s = asym_sub.add_parser("solve")
    _add_common(s)

    p = sub.add_parser("enhanced", help="return-and-refund scheme")
    enh_sub = p.add_subparsers(dest="action", required=True)
    s = enh_sub.add_parser("solve")
    _add_common(s)

    p = sub.add_parser("knockout", help="full-access knockout at the reserve")
    _add_common(p)
    p.add_argument("--deviation-value", type=float, default=None,
                   help="also report the first-price deviation payoffs at this value")

    p = sub.add_parser("simulate", help="Monte Carlo validation run")
    _add_common(p)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", dest="sim_format", default=None,
                   choices=["spa", "fpa", "enhanced"])
    p.add_argument("--cutoff", type=float, default=None)
    p.add_argument("--trace", default=None,
                   help="write a per-replication CSV trace (small runs only)")

    p = sub.add_parser("compare", help="second price vs first price side by side")
    _add_common(p)
    p.add_argument("--reps", type=int, default=200000,
                   help="replications for the simulated welfare columns")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fig", default=None,
                   help="render the profit-curve figure to this file")
    return top


def _region_flags(parser):
    parser.add_argument("--N", type=int, default=2, dest="n_sellers")
    parser.add_argument("--eta", required=True, help="grid start:stop:step")
    parser.add_argument("--r", required=True, help="grid start:stop:step")
    parser.add_argument("--sign-margin", type=float, default=1e-6)
    parser.add_argument("--out", default=None)
    parser.add_argument("--fig", default=None,
                        help="render the region heatmap to this file")


def _tol(args):
    return cfgmod.tolerances_from_args(args.quad_tol, args.root_tol, args.grid)


def _symmetric_solve(module, args):
    env = cfgmod.parse_env(cfgmod.load_file(args.config))
    tol = _tol(args)
    if args.action == "optimize":
        eq = module.optimize(env, tol)
        _emit_json(eq.to_dict(), args.out)
        return EXIT_OK
    if (args.cutoff is None) == (args.price is None):
        raise ConfigError("solve needs exactly one of --cutoff or --price")
    if args.cutoff is not None:
        cutoff = args.cutoff
        if not 0.0 <= cutoff <= env.reserve:
            raise ConfigError(f"cutoff must be in [0, {env.reserve}], got {cutoff}")
    else:
        try:
            cutoff = module.cutoff_from_price(env, args.price, tol)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    payload = {"format": "spa" if module is spa else "fpa",
               "cutoff": cutoff,
               "price": module.price_from_cutoff(env, cutoff, tol),
               "profit": module.profit(env, cutoff, tol),
               "pi0": spa.pi0(env, tol)}
    if module is spa and env.n_sellers == 2:
        gain, over, destr = spa.decompose_two_sellers(env, cutoff, tol)
        payload.update(gain_withholding=gain, loss_overcompensation=over,
                       loss_value_destruction=destr)
    _emit_json(payload, args.out)
    return EXIT_OK


def _region(args):
    try:
        eta_grid = cfgmod.parse_grid(args.eta)
        r_grid = [r for r in cfgmod.parse_grid(args.r) if 0.0 < r <= 1.0]
    except ConfigError:
        raise
    if not eta_grid or not r_grid:
        raise ConfigError("empty eta or r grid after validation")
    rows = fpa.region_scan(args.n_sellers, eta_grid, r_grid,
                           sign_margin=args.sign_margin)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["eta", "r", "profit", "profitable"])
    for row in rows:
        flag = row["profitable"]
        writer.writerow([f"{row['eta']:.12g}", f"{row['r']:.12g}",
                         f"{row['profit']:.12g}",
                         "indeterminate" if flag is None else str(flag)])
    _emit(buf.getvalue(), args.out)
    if args.fig:
        from .plotting import render_region
        render_region(rows, args.fig)
    return EXIT_OK


def _asym(args, enhanced):
    scn = cfgmod.parse_scenario(cfgmod.load_file(args.config))
    tol = _tol(args)
    if enhanced:
        payload = extensions.enhanced_profit(scn, tol).to_dict()
    else:
        cond = extensions.check_condition1(scn)
        payload = {"format": "asym",
                   "prices": list(extensions.asym_prices(scn, tol)),
                   "profit": extensions.asym_profit(scn, tol),
                   "condition1": {"satisfied": cond.satisfied,
                                  "witness": cond.witness,
                                  "conclusive": cond.conclusive}}
    _emit_json(payload, args.out)
    return EXIT_OK


def _knockout(args):
    obj = cfgmod.load_file(args.config)
    tol = _tol(args)
    if "dists" in obj:
        if not isinstance(obj["dists"], list):
            raise ConfigError("dists must be a list of distribution blocks")
        dists = tuple(cfgmod.parse_distribution(d) for d in obj["dists"])
        n = cfgmod._require(obj, "n_sellers", int, "knockout scenario")
        r = cfgmod._require(obj, "reserve", float, "knockout scenario")
    else:
        env = cfgmod.parse_env(obj)
        dists = (env.dist,) * env.n_sellers
        n, r = env.n_sellers, env.reserve
    try:
        scn = extensions.AsymScenario(n, r, dists, tuple(range(n)), (r,) * n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    payload = extensions.enhanced_profit(scn, tol).to_dict()
    if args.deviation_value is not None:
        env = spa.AuctionEnv(n, r, dists[0])
        try:
            eq_payoff, dev_payoff = extensions.fpa_knockout_deviation(
                env, args.deviation_value, tol)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        payload["fpa_deviation"] = {"value": args.deviation_value,
                                    "equilibrium_payoff": eq_payoff,
                                    "deviation_payoff": dev_payoff,
                                    "knockout_is_equilibrium": eq_payoff >= dev_payoff}
    _emit_json(payload, args.out)
    return EXIT_OK


def _sim_config(args):
    obj = cfgmod.load_file(args.config)
    fmt = args.sim_format or obj.get("format")
    if fmt not in ("spa", "fpa", "enhanced"):
        raise ConfigError("simulate needs --format or a format field "
                          "(spa, fpa, or enhanced)")
    reps = args.reps if args.reps is not None else obj.get("replications", 100000)
    seed = args.seed if args.seed is not None else obj.get("seed", 0)
    try:
        if "dists" in obj or "scenario" in obj:
            scn = cfgmod.parse_scenario(obj.get("scenario", obj))
            return SimConfig(format=fmt, replications=int(reps), seed=int(seed),
                             scenario=scn,
                             auctioneer_value=obj.get("auctioneer_value"),
                             trace_path=args.trace)
        env = cfgmod.parse_env(obj)
        cutoff = args.cutoff if args.cutoff is not None else obj.get("cutoff")
        if cutoff is None:
            raise ConfigError("symmetric simulation needs --cutoff or a cutoff field")
        return SimConfig(format=fmt, replications=int(reps), seed=int(seed),
                         env=env, cutoff=float(cutoff),
                         auctioneer_value=obj.get("auctioneer_value"),
                         trace_path=args.trace)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def _simulate(args):
    report = simulate(_sim_config(args))
    _emit_json(report.to_dict(), args.out)
    return EXIT_OK


def _compare(args):
    env = cfgmod.parse_env(cfgmod.load_file(args.config))
    tol = _tol(args)
    eq_spa = spa.optimize(env, tol)
    eq_fpa = fpa.optimize(env, tol)
    rows = []
    for fmt, eq in (("spa", eq_spa), ("fpa", eq_fpa)):
        rep = simulate(SimConfig(format=fmt, replications=args.reps,
                                 seed=args.seed, env=env, cutoff=eq.cutoff))
        rows.append({"format": fmt, "cutoff": eq.cutoff, "price": eq.price,
                     "profit": eq.profit,
                     "simulated_profit": rep.speculator_profit.mean,
                     "simulated_profit_se": rep.speculator_profit.std_error,
                     "seller_surplus": rep.seller_surplus_total.mean,
                     "auctioneer_cost": rep.auctioneer_cost.mean,
                     "efficiency_loss": rep.efficiency_loss.mean})

    buf = io.StringIO()
    writer = csv.writer(buf)
    cols = list(rows[0].keys())
    writer.writerow(cols)
    for row in rows:
        writer.writerow([row["format"]] + [f"{row[c]:.12g}" for c in cols[1:]])
    _emit(buf.getvalue(), args.out)

    if args.fig:
        from .plotting import render_compare
        cutoffs = np.linspace(0.0, env.reserve, 200)
        render_compare(cutoffs, spa.profit(env, cutoffs, tol),
                       fpa.profit(env, cutoffs, tol), args.fig,
                       spa_opt=(eq_spa.cutoff, eq_spa.profit),
                       fpa_opt=(eq_fpa.cutoff, eq_fpa.profit))

    # second price must dominate first price for the speculator
    if eq_spa.profit < eq_fpa.profit - 1e-9:
        print("self-check failed: first-price profit exceeds second-price profit",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "spa":
            return _symmetric_solve(spa, args)
        if args.command == "fpa":
            if args.action == "region":
                return _region(args)
            return _symmetric_solve(fpa, args)
        if args.command == "region":
            return _region(args)
        if args.command == "asym":
            return _asym(args, enhanced=False)
        if args.command == "enhanced":
            return _asym(args, enhanced=True)
        if args.command == "knockout":
            return _knockout(args)
        if args.command == "simulate":
            return _simulate(args)
        if args.command == "compare":
            return _compare(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
