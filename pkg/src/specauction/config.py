"""JSON scenario configuration: parsing, validation, object construction."""

import json

from . import valuedist
from .extensions import AsymScenario
from .numerics import Tolerances
from .spa import AuctionEnv


class ConfigError(ValueError):
    """Invalid configuration input (CLI maps these to exit code 2)."""


_DIST_FAMILIES = ("power", "uniform", "table")


def parse_distribution(obj):
    """Build a value distribution from {"family": ..., ...}."""
    if not isinstance(obj, dict):
        raise ConfigError(f"distribution must be an object, got {type(obj).__name__}")
    family = obj.get("family")
    if family not in _DIST_FAMILIES:
        raise ConfigError(f"family must be one of {_DIST_FAMILIES}, got {family!r}")
    try:
        if family == "uniform":
            return valuedist.make_uniform()
        if family == "power":
            if "eta" not in obj:
                raise ConfigError("power family requires eta")
            return valuedist.make_power(float(obj["eta"]))
        knots = obj.get("knots")
        if not isinstance(knots, list) or len(knots) < 2:
            raise ConfigError("table family requires a knots list of [v, F] pairs")
        return valuedist.make_table([(float(v), float(F)) for v, F in knots])
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad distribution: {exc}") from exc


def _require(obj, key, kind, what):
    if key not in obj:
        raise ConfigError(f"{what} requires {key!r}")
    try:
        return kind(obj[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {key!r} in {what}: {exc}") from exc


def parse_env(obj):
    """Symmetric game: {"n_sellers", "reserve", "dist"}."""
    if not isinstance(obj, dict):
        raise ConfigError("scenario must be a JSON object")
    n = _require(obj, "n_sellers", int, "symmetric scenario")
    r = _require(obj, "reserve", float, "symmetric scenario")
    dist = parse_distribution(obj.get("dist", {"family": "uniform"}))
    try:
        return AuctionEnv(n, r, dist)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_scenario(obj):
    """Asymmetric game: {"n_sellers", "reserve", "dists", "access", "cutoffs"}."""
    if not isinstance(obj, dict):
        raise ConfigError("scenario must be a JSON object")
    n = _require(obj, "n_sellers", int, "asymmetric scenario")
    r = _require(obj, "reserve", float, "asymmetric scenario")
    dists = obj.get("dists")
    if not isinstance(dists, list):
        raise ConfigError("asymmetric scenario requires a dists list")
    dists = tuple(parse_distribution(d) for d in dists)
    access = obj.get("access")
    if not isinstance(access, list):
        raise ConfigError("asymmetric scenario requires an access list")
    cutoffs = obj.get("cutoffs")
    if not isinstance(cutoffs, list):
        raise ConfigError("asymmetric scenario requires a cutoffs list")
    try:
        return AsymScenario(n, r, dists, tuple(int(j) for j in access),
                            tuple(float(v) for v in cutoffs))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_file(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def tolerances_from_args(quad_tol=None, root_tol=None, grid=None):
    """Tolerances overridden by optional CLI flags."""
    base = Tolerances()
    try:
        return Tolerances(
            quad_abs_tol=base.quad_abs_tol if quad_tol is None else float(quad_tol),
            root_tol=base.root_tol if root_tol is None else float(root_tol),
            argmax_tol=base.argmax_tol,
            grid_points=base.grid_points if grid is None else int(grid),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_grid(spec):
    """Parse "start:stop:step" into an inclusive float grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad grid {spec!r}: {exc}") from exc
    if step <= 0:
        raise ConfigError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ConfigError(f"grid stop {stop} is below start {start}")
    n = int(round((stop - start) / step))
    grid = [start + i * step for i in range(n + 1)]
    # guard against float drift past stop
    return [g for g in grid if g <= stop + 1e-12 * max(1.0, abs(stop))]
