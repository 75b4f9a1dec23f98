"""Seller-value distributions on [0, 1] and their truncated views."""

import numpy as np
from scipy.interpolate import PchipInterpolator


class DistributionError(ValueError):
    """Raised when a distribution specification is invalid."""


class ValueDistribution:
    """A continuous, strictly increasing CDF on [0, 1] with F(0) = 0, F(1) = 1.

    Instances are immutable after construction and safe to share across
    workers.  All evaluation methods accept scalars or numpy arrays.
    """

    def __init__(self, family, cdf, pdf, quantile, params=None):
        self.family = family
        self.params = dict(params or {})
        self._cdf = cdf
        self._pdf = pdf
        self._quantile = quantile

    def cdf(self, v):
        return self._cdf(np.asarray(v, dtype=float))

    def pdf(self, v):
        return self._pdf(np.asarray(v, dtype=float))

    def quantile(self, u):
        return self._quantile(np.asarray(u, dtype=float))

    def survival(self, v):
        return 1.0 - self.cdf(v)

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"ValueDistribution({self.family}{', ' + args if args else ''})"


def make_power(eta):
    """Power-family distribution F(v) = v**eta on [0, 1], eta > 0."""
    eta = float(eta)
    if not eta > 0.0:
        raise DistributionError(f"power family needs eta > 0, got {eta}")

    def cdf(v):
        return np.clip(v, 0.0, 1.0) ** eta

    def pdf(v):
        v = np.clip(v, 0.0, 1.0)
        with np.errstate(divide="ignore"):
            out = eta * v ** (eta - 1.0)
        return out

    def quantile(u):
        return np.clip(u, 0.0, 1.0) ** (1.0 / eta)

    return ValueDistribution("power", cdf, pdf, quantile, {"eta": eta})


def make_uniform():
    """Uniform distribution on [0, 1]."""
    dist = make_power(1.0)
    return ValueDistribution("uniform", dist._cdf, dist._pdf, dist._quantile)


def make_table(knots):
    """Distribution interpolated through (v, F) knots with a monotone cubic.

    Knots are renormalized so the CDF reaches exactly 1 at v = 1.  The
    interpolant is shape preserving, so the CDF stays monotone between knots.
    """
    pts = sorted((float(v), float(F)) for v, F in knots)
    vs = np.array([p[0] for p in pts])
    Fs = np.array([p[1] for p in pts])
    if vs[0] != 0.0 or vs[-1] != 1.0:
        raise DistributionError("table knots must span v = 0 to v = 1")
    if Fs[0] != 0.0:
        raise DistributionError("table must have F(0) = 0")
    if np.any(np.diff(vs) <= 0) or np.any(np.diff(Fs) <= 0):
        raise DistributionError("table knots must be strictly increasing in v and F")
    Fs = Fs / Fs[-1]
    interp = PchipInterpolator(vs, Fs)
    deriv = interp.derivative()

    def cdf(v):
        return np.clip(interp(np.clip(v, 0.0, 1.0)), 0.0, 1.0)

    def pdf(v):
        return np.maximum(deriv(np.clip(v, 0.0, 1.0)), 0.0)

    # The PCHIP inverse of a monotone interpolant is itself monotone between
    # the swapped knots, but not the exact functional inverse; refine with
    # a few bisection sweeps so quantile(cdf(v)) = v holds to ~1e-12.
    def quantile(u):
        u = np.clip(u, 0.0, 1.0)
        lo = np.zeros_like(u, dtype=float)
        hi = np.ones_like(u, dtype=float)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            below = interp(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    return ValueDistribution("table", cdf, pdf, quantile, {"knots": tuple(map(tuple, pts))})


def sample(dist, rng, size=None):
    """Inverse-transform draws from dist using the caller-owned generator."""
    return dist.quantile(rng.random(size))


class TruncatedBelow:
    """View of a base distribution conditioned on v >= threshold.

    Evaluates G(v; t) = (F(v) - F(t)) / (1 - F(t)), exactly 0 at the
    threshold and exactly 1 at v = 1.
    """

    def __init__(self, base, threshold):
        if not 0.0 <= threshold < 1.0:
            raise DistributionError(f"truncation threshold must be in [0, 1), got {threshold}")
        self.base = base
        self.threshold = float(threshold)
        self._Ft = float(base.cdf(threshold))
        self._tail = 1.0 - self._Ft

    def cdf(self, v):
        v = np.asarray(v, dtype=float)
        return np.clip((self.base.cdf(v) - self._Ft) / self._tail, 0.0, 1.0)

    def survival(self, v):
        v = np.asarray(v, dtype=float)
        return np.clip((1.0 - self.base.cdf(v)) / self._tail, 0.0, 1.0)

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v >= self.threshold, self.base.pdf(v) / self._tail, 0.0)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        return self.base.quantile(self._Ft + self._tail * np.clip(u, 0.0, 1.0))


class TruncatedAbove:
    """View of a base distribution conditioned on v <= threshold: F(v)/F(t)."""

    def __init__(self, base, threshold):
        if not 0.0 < threshold <= 1.0:
            raise DistributionError(f"truncation threshold must be in (0, 1], got {threshold}")
        self.base = base
        self.threshold = float(threshold)
        self._Ft = float(base.cdf(threshold))

    def cdf(self, v):
        v = np.asarray(v, dtype=float)
        return np.clip(self.base.cdf(v) / self._Ft, 0.0, 1.0)

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v <= self.threshold, self.base.pdf(v) / self._Ft, 0.0)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        return self.base.quantile(self._Ft * np.clip(u, 0.0, 1.0))
