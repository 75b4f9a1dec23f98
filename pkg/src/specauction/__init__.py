"""Numerical engines for speculation in procurement auctions.

Equilibrium solvers for second-price and first-price procurement games with
a resale speculator, extensions to asymmetric sellers with limited access
and a return-and-refund acquisition scheme, and a Monte Carlo simulator
that validates the analytic results.
"""

from .numerics import (BracketError, IntegrationError, NumericsError,
                       Tolerances, DEFAULT_TOL)
from .spa import AuctionEnv
from .valuedist import (DistributionError, ValueDistribution, make_power,
                        make_table, make_uniform)

__all__ = [
    "AuctionEnv", "BracketError", "DEFAULT_TOL", "DistributionError",
    "IntegrationError", "NumericsError", "Tolerances", "ValueDistribution",
    "make_power", "make_table", "make_uniform",
]

__version__ = "1.0.0"
