import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynmech.dist import DiscreteDistribution, price_curves
from dynmech.pwl import (PiecewiseLinearConcave, adaptive_fit, add_linear, argmax, evaluate,
                         max_concavity_violation, upper_concave_envelope)

F = PiecewiseLinearConcave


def test_evaluate_examples():
    f = F([0, 1], [0, 0])
    assert evaluate(f, -0.1) == -np.inf
    assert evaluate(f, 5) == 0.0
    assert evaluate(F([0, 1, 2], [0, 2, 3]), 0.5) == pytest.approx(1.0)


def test_evaluate_vectorized_and_tail():
    f = F([0, 1], [0, 1], right_slope=0.5)
    np.testing.assert_allclose(evaluate(f, [0.5, 1.0, 3.0]), [0.5, 1.0, 2.0])
    g = F([0, 1], [0, 1], right_slope=None)
    assert g.tail_slope == 1.0 and evaluate(g, 3.0) == 3.0
    assert f(0.25) == 0.25


def test_validation():
    with pytest.raises(ValueError):
        F([0, 1, 2], [0, 0, 1])  # convex kink
    with pytest.raises(ValueError):
        F([0, 0], [1, 1])
    with pytest.raises(ValueError):
        F([0, 1], [0, 1], right_slope=2.0)
    with pytest.raises(ValueError):
        F([], [])


def test_envelope_examples():
    h = upper_concave_envelope([(0, 0), (1, 1)])
    np.testing.assert_array_equal(h.cs, [0, 1])
    h = upper_concave_envelope([(0, 0), (0.5, 0.2), (1, 1)])
    np.testing.assert_array_equal(h.cs, [0, 1])
    assert evaluate(h, 0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        upper_concave_envelope([])


def test_envelope_of_price_curves():
    pts = [(u, S) for _, u, S in price_curves(DiscreteDistribution.uniform([1, 2]))]
    h = upper_concave_envelope(pts)
    assert evaluate(h, 0.25) == pytest.approx(1.25)


def test_argmax_examples():
    assert argmax(F([0, 1, 2], [0, 1, 0], right_slope=None)) == (1.0, 1.0)
    assert argmax(F.constant(3.0, lo=0.5)) == (0.5, 3.0)
    assert argmax(F([0, 1], [2, 1], right_slope=None)) == (0.0, 2.0)
    with pytest.raises(ValueError):
        argmax(F.linear(1.0))


def test_add_linear_examples():
    f = F([0, 1], [0, 0])
    g = add_linear(f, -1)
    np.testing.assert_array_equal(g.ys, [0, -1])
    assert g.right_slope == -1
    assert add_linear(f, 0) is f


def test_pieces_represent_function():
    f = F([0, 1, 3], [0, 2, 3], right_slope=0.0)
    a, b = f.pieces()
    xs = np.linspace(0, 6, 61)
    np.testing.assert_allclose(np.min(a[:, None] + b[:, None] * xs, axis=0), evaluate(f, xs), atol=1e-12)


def test_round_trip():
    f = F([0, 1, 3], [0, 2, 3], right_slope=None)
    assert F.from_dict(f.to_dict()).to_dict() == f.to_dict()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=30))
def test_envelope_majorizes_and_is_concave(points):
    h = upper_concave_envelope(points)
    assert max_concavity_violation(h) <= 1e-9
    for x, y in points:
        assert evaluate(h, x) >= y - 1e-9
    # every vertex is one of the input points
    pts = set(points)
    for x, y in zip(h.cs, h.ys):
        assert (x, y) in pts


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 3.0), st.floats(1e-4, 0.1))
def test_adaptive_fit_gap(scale, tol):
    fun = lambda c: -scale * (c - 1.0) ** 2  # noqa: E731
    env, xs, ys = adaptive_fit(fun, 0.0, 3.0, tol)
    grid = np.linspace(0, 3, 2001)
    gap = fun(grid) - evaluate(env, grid)
    assert gap.max() <= tol + 1e-12
    assert gap.min() >= -1e-12


def test_adaptive_fit_finds_kinks_exactly():
    # min of three lines with kinks at 0.7 and 2.3; a coarse tolerance alone would miss them
    fun = lambda c: min(1 + 2 * c, 2.4 + 0.0 * c, 4.7 - c)  # noqa: E731
    env, xs, _ = adaptive_fit(fun, 0.0, 4.0, tol=0.5)
    for kink in (0.7, 2.3):
        assert evaluate(env, kink) == pytest.approx(fun(kink), abs=1e-12)
    grid = np.linspace(0, 4, 401)
    np.testing.assert_allclose(evaluate(env, grid), [fun(c) for c in grid], atol=1e-12)
    assert len(xs) < 60
