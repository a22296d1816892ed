from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynmech.dist import (DiscreteDistribution, equal_revenue_discrete, expected_value, monopoly,
                          posted_price_revenues, price_curves, virtual_value)

D = DiscreteDistribution


def test_validation():
    for args in [([], []), ([1, 2], [1.0]), ([2, 1], [0.5, 0.5]), ([1, 1], [0.5, 0.5]),
                 ([-1], [1.0]), ([1, 2], [0.0, 1.0]), ([1, 2], [0.5, 0.6]), ([np.nan], [1.0])]:
        with pytest.raises(ValueError):
            D(*args)


def test_arrays_read_only_and_equality():
    d = D.uniform([1, 2])
    with pytest.raises(ValueError):
        d.support[0] = 5
    assert d == D([1.0, 2.0], [0.5, 0.5])
    assert hash(d) == hash(D([1.0, 2.0], [0.5, 0.5]))
    assert D.from_dict(d.to_dict()) == d


def test_equal_revenue():
    with pytest.raises(ValueError):
        equal_revenue_discrete(0)
    assert equal_revenue_discrete(1) == D.point_mass(1.0)
    d = equal_revenue_discrete(5)
    np.testing.assert_allclose(posted_price_revenues(d), np.ones(5), atol=1e-12)
    assert expected_value(d) == pytest.approx(137 / 60, abs=1e-12)


def test_expected_value_examples():
    assert expected_value(D.point_mass(1.0)) == 1.0
    assert expected_value(D.uniform([1, 2])) == 1.5


def test_monopoly_examples():
    assert monopoly(D.uniform([1, 3])) == (3.0, 1.5)
    price, rev = monopoly(equal_revenue_discrete(5))
    assert price == 1.0 and rev == pytest.approx(1.0, abs=1e-12)
    assert monopoly(D.point_mass(2.5)) == (2.5, 2.5)


def test_virtual_value_examples():
    assert virtual_value(D.point_mass(4.0), 0) == 4.0
    assert virtual_value(D.uniform([1, 3]), 0) == pytest.approx(-1.0)
    # second support point of ER(5): 2 - Pr[v > 2] (3 - 2) / f_2 = 2 - (1/3)/(1/6) = 0
    assert virtual_value(equal_revenue_discrete(5), 1) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(IndexError):
        virtual_value(D.uniform([1, 2]), 2)


def test_price_curves_examples():
    curves = price_curves(D.uniform([1, 2]))
    assert curves[0] == pytest.approx((1.0, 0.5, 1.5))
    assert curves[1] == pytest.approx((2.0, 0.0, 1.0))
    assert curves[-1][1:] == (0.0, 0.0)
    assert price_curves(D.point_mass(1.0))[0] == pytest.approx((1.0, 0.0, 1.0))


@st.composite
def distributions(draw, max_size=8):
    n = draw(st.integers(1, max_size))
    vals = sorted(draw(st.sets(st.integers(0, 40), min_size=n, max_size=n)))
    w = draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    w = np.array(w, float)
    return D(np.array(vals) / 4.0, w / w.sum())


@settings(max_examples=80, deadline=None)
@given(distributions())
def test_myerson_revenue_identity(d):
    # revenue of posting v_j equals the expected virtual value of the types served
    phi = np.array([virtual_value(d, j) for j in range(len(d))])
    rev = posted_price_revenues(d)
    for j in range(len(d)):
        assert rev[j] == pytest.approx(float(d.probs[j:] @ phi[j:]), abs=1e-9)
    assert monopoly(d)[1] == pytest.approx(rev.max(), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(distributions())
def test_price_curve_accounting(d):
    for p, u, S in price_curves(d):
        # surplus splits into utility plus revenue
        served = d.support >= p
        assert S == pytest.approx(u + p * d.probs[served].sum(), abs=1e-9)


def test_equal_revenue_exact_rational():
    # every price of ER(6) earns exactly 1 in rational arithmetic
    d = equal_revenue_discrete(6)
    f = [Fraction(1, j * (j + 1)) for j in range(1, 6)] + [Fraction(1, 6)]
    np.testing.assert_allclose(d.probs, [float(x) for x in f], atol=1e-15)
    for j in range(1, 7):
        assert j * sum(f[j - 1:]) == 1
