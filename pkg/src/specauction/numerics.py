"""Deterministic numerical kernels: quadrature, root finding, maximization."""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq


class NumericsError(RuntimeError):
    """Base class for numerical failures (CLI maps these to exit code 3)."""


class IntegrationError(NumericsError):
    def __init__(self, message, worst_interval=None):
        super().__init__(message)
        self.worst_interval = worst_interval


class BracketError(NumericsError):
    """The supplied interval does not bracket a sign change."""


@dataclass(frozen=True)
class Tolerances:
    quad_abs_tol: float = 1e-10
    root_tol: float = 1e-12
    argmax_tol: float = 1e-9
    grid_points: int = 2048

    def __post_init__(self):
        if self.quad_abs_tol <= 0 or self.root_tol <= 0 or self.argmax_tol <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.grid_points < 64:
            raise ValueError(f"grid_points must be >= 64, got {self.grid_points}")


DEFAULT_TOL = Tolerances()

_QUAD_LIMIT = 400


def integrate(f, a, b, tol=DEFAULT_TOL):
    """Adaptive quadrature of f on [a, b] to absolute error quad_abs_tol.

    Endpoint singularities are handled by the adaptive subdivision (the
    Gauss-Kronrod nodes never touch the endpoints).  Non-convergence raises
    IntegrationError carrying the worst remaining subinterval.
    """
    if a > b:
        raise ValueError(f"integration bounds out of order: [{a}, {b}]")
    if a == b:
        return 0.0
    result = quad(f, a, b, epsabs=tol.quad_abs_tol, epsrel=0.0,
                  limit=_QUAD_LIMIT, full_output=1)
    value, abserr, info = result[0], result[1], result[2]
    if len(result) > 3 and abserr > max(100.0 * tol.quad_abs_tol, 1e-7 * abs(value)):
        last = info["last"]
        worst = int(np.argmax(info["elist"][:last]))
        raise IntegrationError(
            f"quadrature on [{a}, {b}] did not converge: {result[3]}",
            worst_interval=(info["alist"][worst], info["blist"][worst]),
        )
    return value


def find_root(f, lo, hi, tol=DEFAULT_TOL):
    """Bracketed root of a continuous f on [lo, hi] to width root_tol."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketError(
            f"f({lo}) = {flo} and f({hi}) = {fhi} have the same sign; "
            "no root is bracketed (a boundary case applies)"
        )
    return brentq(f, lo, hi, xtol=tol.root_tol, rtol=8.881784197001252e-16)


def _golden_section_max(f, a, b, tol):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = c if fc >= fd else d
    return x, f(x)


def _eval_grid(f, xs):
    # Prefer one vectorized call; fall back to a scalar loop.
    try:
        ys = np.asarray(f(xs), dtype=float)
        if ys.shape == xs.shape:
            return ys
    except (TypeError, ValueError, IndexError):
        pass
    return np.array([float(f(x)) for x in xs])


def maximize_on_interval(f, lo, hi, tol=DEFAULT_TOL):
    """Global maximum of continuous f on [lo, hi].

    Scans a dense grid, refines every local bracket by golden section, and
    returns the smallest maximizer among brackets whose refined values tie
    the global maximum within argmax_tol, together with the maximum value.
    """
    if lo > hi:
        raise ValueError(f"interval out of order: [{lo}, {hi}]")
    if hi - lo <= tol.argmax_tol:
        return lo, float(f(lo))
    xs = np.linspace(lo, hi, tol.grid_points)
    ys = _eval_grid(f, xs)
    if not np.all(np.isfinite(ys)):
        raise NumericsError("objective is not finite on the scan grid")

    n = len(xs)
    candidates = [(lo, float(ys[0])), (hi, float(ys[-1]))]
    interior = (ys[1:-1] >= ys[:-2]) & (ys[1:-1] >= ys[2:])
    for i in np.flatnonzero(interior) + 1:
        x, y = _golden_section_max(f, xs[max(i - 1, 0)], xs[min(i + 1, n - 1)],
                                   tol.argmax_tol)
        candidates.append((float(x), float(y)))
    # Endpoint brackets can hide a maximum between the first two grid points.
    if ys[0] >= ys[1]:
        candidates.append(_golden_section_max(f, xs[0], xs[1], tol.argmax_tol))
    if ys[-1] >= ys[-2]:
        candidates.append(_golden_section_max(f, xs[-2], xs[-1], tol.argmax_tol))

    best = max(y for _, y in candidates)
    argmax = min(x for x, y in candidates if y >= best - tol.argmax_tol)
    return float(argmax), float(best)


def invert_monotone(f, y, lo, hi, tol=DEFAULT_TOL):
    """Solve f(x) = y for a monotone f on [lo, hi] via bracketed root finding."""
    return find_root(lambda x: f(x) - y, lo, hi, tol)
