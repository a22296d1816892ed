import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynmech.dist import DiscreteDistribution, equal_revenue_discrete, expected_value
from dynmech.statmech import (StaticMechanism, evaluate_mechanism, ic_violation, prices_in_mixture,
                              shift_payments, utility_constrained_surplus)
from independent import best_two_price_mixture

D = DiscreteDistribution


def test_mechanism_validation():
    with pytest.raises(ValueError):
        StaticMechanism([0.5], [1, 2])
    with pytest.raises(ValueError):
        StaticMechanism([1.5], [1])
    m = StaticMechanism([0.5, 1], [0.5, 1.5])
    assert StaticMechanism.from_dict(m.to_dict()).to_dict() == m.to_dict()
    with pytest.raises(ValueError):
        m.utilities(D.point_mass(1.0))


def test_evaluate_examples():
    er = equal_revenue_discrete(5)
    assert evaluate_mechanism(StaticMechanism.posted_price(er, 1.0), er).revenue == pytest.approx(1.0)
    d = D.uniform([1, 2])
    zero = evaluate_mechanism(StaticMechanism([0, 0], [0, 0]), d)
    assert (zero.revenue, zero.surplus, zero.expected_utility, zero.min_utility, zero.max_ic_violation) == (0,) * 5
    s = evaluate_mechanism(StaticMechanism([0.5, 1], [0.5, 1.5]), d)
    assert s.revenue == pytest.approx(1.0)
    assert s.surplus == pytest.approx(1.25)
    assert s.expected_utility == pytest.approx(0.25)
    assert s.min_utility == pytest.approx(0.0)
    assert s.max_ic_violation == pytest.approx(0.0)


def test_ic_violation_detects_misreport():
    d = D.uniform([1, 2])
    # high type pays 2 for the item but the low type's offer gives it for 0
    assert ic_violation(StaticMechanism([1, 1], [0, 2]), d) == pytest.approx(2.0)


def test_shift_payments_examples():
    d = D.uniform([1, 2])
    m = StaticMechanism.posted_price(d, 1.0)
    assert shift_payments(m, 0) is m
    assert evaluate_mechanism(shift_payments(m, -0.5), d).min_utility == pytest.approx(0.5)
    m2 = shift_payments(m, -0.5)
    umin = evaluate_mechanism(m2, d).min_utility
    assert evaluate_mechanism(shift_payments(m2, umin), d).min_utility == pytest.approx(0.0)


def test_utility_constrained_surplus_examples():
    d = D.uniform([1, 2])
    m, val = utility_constrained_surplus(d, 0.25)
    assert val == pytest.approx(1.25)
    np.testing.assert_allclose(m.alloc, [0.5, 1.0])
    np.testing.assert_allclose(m.pay, [0.5, 1.5])
    m, val = utility_constrained_surplus(d, 1.5)
    assert val == pytest.approx(1.5)
    np.testing.assert_allclose(m.pay, 0.0)
    m, val = utility_constrained_surplus(D.point_mass(1.0), 0.4)
    assert val == pytest.approx(1.0)
    np.testing.assert_allclose(m.alloc, [1.0])
    np.testing.assert_allclose(m.pay, [0.6])
    with pytest.raises(ValueError):
        utility_constrained_surplus(d, -0.1)


@st.composite
def dist_and_c(draw):
    n = draw(st.integers(1, 6))
    vals = sorted(draw(st.sets(st.integers(0, 20), min_size=n, max_size=n)))
    w = np.array(draw(st.lists(st.integers(1, 10), min_size=n, max_size=n)), float)
    d = D(np.array(vals, float) / 2, w / w.sum())
    c = draw(st.floats(0, 1.2)) * max(expected_value(d), 0.1)
    return d, c


@settings(max_examples=80, deadline=None)
@given(dist_and_c())
def test_matches_brute_force_mixtures(dc):
    d, c = dc
    m, val = utility_constrained_surplus(d, c)
    stats = evaluate_mechanism(m, d)
    assert stats.expected_utility == pytest.approx(c, abs=1e-9)
    assert stats.surplus == pytest.approx(val, abs=1e-9)
    assert stats.max_ic_violation <= 1e-9
    assert stats.min_utility >= -1e-9
    if c < expected_value(d) - d.support[0]:
        assert prices_in_mixture(m, d) <= 2
        assert val == pytest.approx(best_two_price_mixture(d.support, d.probs, c), abs=1e-9)
