"""Single-period mechanisms over a discrete support."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import DiscreteDistribution, expected_value, price_curves
from .pwl import evaluate, upper_concave_envelope


@dataclass(frozen=True, eq=False)
class StaticMechanism:
    """Allocation probabilities and expected payments, one entry per support point."""

    alloc: np.ndarray
    pay: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.alloc, dtype=float).ravel()
        p = np.asarray(self.pay, dtype=float).ravel()
        if x.size != p.size:
            raise ValueError("alloc and pay must have equal length")
        if np.any(x < -1e-12) or np.any(x > 1 + 1e-12):
            raise ValueError("allocation probabilities must lie in [0, 1]")
        x = np.clip(x, 0.0, 1.0)
        x.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "alloc", x)
        object.__setattr__(self, "pay", p)

    def __len__(self) -> int:
        return self.alloc.size

    def __repr__(self) -> str:
        return f"StaticMechanism(alloc={self.alloc.tolist()}, pay={self.pay.tolist()})"

    def utilities(self, d: DiscreteDistribution) -> np.ndarray:
        _check_size(self, d)
        return d.support * self.alloc - self.pay

    @classmethod
    def posted_price(cls, d: DiscreteDistribution, price: float) -> StaticMechanism:
        x = (d.support >= price).astype(float)
        return cls(x, price * x)

    def to_dict(self) -> dict:
        return {"alloc": self.alloc.tolist(), "pay": self.pay.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> StaticMechanism:
        return cls(data["alloc"], data["pay"])


@dataclass(frozen=True)
class MechanismStats:
    revenue: float
    surplus: float
    expected_utility: float
    min_utility: float
    max_ic_violation: float


def _check_size(m: StaticMechanism, d: DiscreteDistribution) -> None:
    if len(m) != len(d):
        raise ValueError(f"mechanism has {len(m)} entries but the support has {len(d)}")


def ic_violation(m: StaticMechanism, d: DiscreteDistribution) -> float:
    """Largest gain from reporting ``v_l`` instead of the true ``v_j``, over all pairs."""
    _check_size(m, d)
    v = d.support
    # gain[j, l] = (v_j x_l - p_l) - (v_j x_j - p_j)
    dev = np.outer(v, m.alloc) - m.pay[None, :]
    gain = dev - np.diag(dev)[:, None]
    return float(max(0.0, gain.max()))


def evaluate_mechanism(m: StaticMechanism, d: DiscreteDistribution) -> MechanismStats:
    u = m.utilities(d)
    revenue = float(d.probs @ m.pay)
    surplus = float(d.probs @ (d.support * m.alloc))
    return MechanismStats(revenue, surplus, surplus - revenue, float(u.min()), ic_violation(m, d))


def shift_payments(m: StaticMechanism, delta: float) -> StaticMechanism:
    """Add ``delta`` to every payment; utilities drop by ``delta`` and IC is untouched."""
    if delta == 0:
        return m
    return StaticMechanism(m.alloc, m.pay + delta)


def utility_constrained_surplus(d: DiscreteDistribution, c: float) -> tuple[StaticMechanism, float]:
    """Max expected surplus of an IC, IR mechanism whose expected utility is exactly ``c``.

    The optimum mixes at most two posted prices. Once ``c`` is large enough
    that even the lowest type keeps a non-negative utility while everyone is
    served, the item goes to all and every type pays ``E[v] - c``.
    """
    if c < 0:
        raise ValueError(f"utility bound must be non-negative, got {c!r}")
    ev = expected_value(d)
    v = d.support
    if c >= ev - v[0]:
        return StaticMechanism(np.ones(len(d)), np.full(len(d), ev - c)), ev
    curves = price_curves(d)
    prices = np.array([p for p, _, _ in curves])
    pts = [(u, S) for _, u, S in curves]
    hull = upper_concave_envelope(pts, right_slope=0.0)
    value = float(evaluate(hull, c))
    # hull vertices are price points; find the bracketing pair
    k = int(np.searchsorted(hull.cs, c))
    if k < len(hull) and hull.cs[k] == c:
        price = _price_at(curves, prices, hull.cs[k], hull.ys[k])
        return StaticMechanism.posted_price(d, price), value
    lo_u, hi_u = hull.cs[k - 1], hull.cs[k]
    w = (c - lo_u) / (hi_u - lo_u)
    # weight w on the lower price (utility hi_u), 1-w on the higher one
    p_low = _price_at(curves, prices, hi_u, hull.ys[k])
    p_high = _price_at(curves, prices, lo_u, hull.ys[k - 1])
    m_low = StaticMechanism.posted_price(d, p_low)
    m_high = StaticMechanism.posted_price(d, p_high)
    mix = StaticMechanism(w * m_low.alloc + (1 - w) * m_high.alloc, w * m_low.pay + (1 - w) * m_high.pay)
    return mix, value


def _price_at(curves, prices, u, S) -> float:
    for p, pu, pS in curves:
        if pu == u and pS == S:
            return float(p)
    raise AssertionError("hull vertex does not correspond to a posted price")


def prices_in_mixture(m: StaticMechanism, d: DiscreteDistribution) -> int:
    """Number of distinct posted prices needed to express ``m`` as a lottery."""
    x = np.concatenate(([0.0], m.alloc))
    steps = np.diff(x)
    return int(np.count_nonzero(steps > 1e-12))
