"""Quadrature, root finding, and grid maximization kernels."""

import numpy as np
import pytest

from specauction.numerics import (BracketError, Tolerances, find_root,
                                  integrate, invert_monotone,
                                  maximize_on_interval)


def test_integrate_polynomial_exact():
    assert abs(integrate(lambda x: 3.0 * x * x, 0.0, 1.0) - 1.0) < 1e-12
    assert integrate(lambda x: x, 0.5, 0.5) == 0.0


def test_integrate_endpoint_singularity():
    # integrable singularity at 0: int_0^1 x^(-1/2) dx = 2
    got = integrate(lambda x: x ** -0.5, 0.0, 1.0)
    assert abs(got - 2.0) < 1e-8


def test_integrate_rejects_reversed_bounds():
    with pytest.raises(ValueError):
        integrate(lambda x: x, 1.0, 0.0)


def test_find_root_and_bracket_error():
    root = find_root(lambda x: x * x - 2.0, 0.0, 2.0)
    assert abs(root - np.sqrt(2.0)) < 1e-10
    with pytest.raises(BracketError):
        find_root(lambda x: x * x + 1.0, -1.0, 1.0)
    assert find_root(lambda x: x, 0.0, 1.0) == 0.0


def test_maximize_smooth():
    x, y = maximize_on_interval(lambda v: -(v - 0.3) ** 2, 0.0, 1.0)
    assert abs(x - 0.3) < 1e-8
    assert abs(y) < 1e-15


def test_maximize_prefers_smallest_tied_argmax():
    # two equal-height peaks; the smaller maximizer must be returned
    f = lambda v: -((v - 0.25) ** 2) * ((v - 0.75) ** 2)
    x, y = maximize_on_interval(f, 0.0, 1.0)
    assert abs(x - 0.25) < 1e-6
    assert abs(y) < 1e-18


def test_maximize_endpoint_maximum():
    x, y = maximize_on_interval(lambda v: v, 0.0, 1.0)
    assert abs(x - 1.0) < 1e-8 and abs(y - 1.0) < 1e-8
    x, _ = maximize_on_interval(lambda v: -v, 0.0, 1.0)
    assert x == 0.0


def test_maximize_degenerate_interval():
    x, y = maximize_on_interval(lambda v: v * v, 0.5, 0.5 + 1e-12)
    assert abs(x - 0.5) < 1e-9


def test_invert_monotone():
    x = invert_monotone(lambda v: v ** 3, 0.125, 0.0, 1.0)
    assert abs(x - 0.5) < 1e-10


def test_tolerances_validation():
    with pytest.raises(ValueError):
        Tolerances(quad_abs_tol=0.0)
    with pytest.raises(ValueError):
        Tolerances(grid_points=10)
