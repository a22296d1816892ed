"""Finite-support value distributions and their single-period statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PROB_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Values ``support[j]`` drawn with probability ``probs[j]``.

    The support is strictly increasing and non-negative; every mass is
    positive and the masses sum to one within ``PROB_TOL``.
    """

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.support, dtype=float).ravel()
        f = np.asarray(self.probs, dtype=float).ravel()
        if v.size == 0 or v.size != f.size:
            raise ValueError("support and probs must be non-empty and of equal length")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("support values must be finite and non-negative")
        if np.any(np.diff(v) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(f <= 0):
            raise ValueError("every probability mass must be positive")
        if abs(f.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {f.sum()!r}, not 1")
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "support", v)
        object.__setattr__(self, "probs", f)

    def __len__(self) -> int:
        return self.support.size

    def __repr__(self) -> str:
        return f"DiscreteDistribution(support={self.support.tolist()}, probs={self.probs.tolist()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return np.array_equal(self.support, other.support) and np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash((self.support.tobytes(), self.probs.tobytes()))

    @classmethod
    def point_mass(cls, value: float) -> DiscreteDistribution:
        return cls([value], [1.0])

    @classmethod
    def uniform(cls, values) -> DiscreteDistribution:
        values = np.asarray(values, dtype=float)
        return cls(values, np.full(values.size, 1.0 / values.size))

    @property
    def survival(self) -> np.ndarray:
        """``Pr[v >= support[j]]`` for each support index."""
        return np.cumsum(self.probs[::-1])[::-1]

    def cdf(self) -> np.ndarray:
        """``F(support[j]) = Pr[v <= support[j]]``."""
        return np.cumsum(self.probs)

    def index_of(self, value: float) -> int:
        """Support index of ``value``; raises ``ValueError`` if absent."""
        j = int(np.searchsorted(self.support, value))
        for cand in (j - 1, j):
            if 0 <= cand < self.support.size and abs(self.support[cand] - value) <= 1e-12 * max(1.0, abs(value)):
                return cand
        raise ValueError(f"{value!r} is not in the support {self.support.tolist()}")

    def to_dict(self) -> dict:
        return {"support": self.support.tolist(), "probs": self.probs.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> DiscreteDistribution:
        return cls(data["support"], data["probs"])


def equal_revenue_discrete(T: int) -> DiscreteDistribution:
    """Values ``1..T`` with ``Pr[v >= j] = 1/j``, so every price in the support earns 1."""
    if int(T) != T or T < 1:
        raise ValueError(f"T must be a positive integer, got {T!r}")
    j = np.arange(1, T + 1, dtype=float)
    probs = 1.0 / j - 1.0 / (j + 1.0)
    probs[-1] = 1.0 / T
    # absorb rounding so the masses sum to one within PROB_TOL
    probs[0] += 1.0 - probs.sum()
    return DiscreteDistribution(j, probs)


def expected_value(d: DiscreteDistribution) -> float:
    return float(d.support @ d.probs)


def posted_price_revenues(d: DiscreteDistribution) -> np.ndarray:
    """Revenue ``v_j * Pr[v >= v_j]`` of posting each support point."""
    return d.support * d.survival


def monopoly(d: DiscreteDistribution) -> tuple[float, float]:
    """Revenue-maximizing posted price and its revenue; ties go to the lowest price."""
    rev = posted_price_revenues(d)
    j = int(np.argmax(rev))
    return float(d.support[j]), float(rev[j])


def virtual_value(d: DiscreteDistribution, j: int) -> float:
    """Forward-difference virtual value at support index ``j`` (0-based).

    Diagnostic only: ``v_j - Pr[v > v_j] (v_{j+1} - v_j) / f_j``, and the
    top type's own value.
    """
    s = len(d)
    if not 0 <= j < s:
        raise IndexError(f"support index {j} out of range for size {s}")
    if j == s - 1:
        return float(d.support[j])
    above = 1.0 - d.cdf()[j]
    return float(d.support[j] - above * (d.support[j + 1] - d.support[j]) / d.probs[j])


def price_curves(d: DiscreteDistribution) -> list[tuple[float, float, float]]:
    """``(p, u(p), S(p))`` for each support price plus one price above the top.

    ``u`` is the buyer's expected utility and ``S`` the expected surplus of
    posting ``p``; ``S(p) = u(p) + p Pr[v >= p]`` holds exactly.
    """
    v, f = d.support, d.probs
    # suffix sums over buyers with v_j >= p
    mass = np.cumsum(f[::-1])[::-1]
    surplus = np.cumsum((v * f)[::-1])[::-1]
    util = surplus - v * mass
    out = [(float(p), float(u), float(S)) for p, u, S in zip(v, util, surplus)]
    out.append((float(v[-1] + 1.0), 0.0, 0.0))
    return out
