"""A fixed, seeded corpus of small multi-period instances for cross-checking solvers."""

from __future__ import annotations

import numpy as np

from .dist import DiscreteDistribution, equal_revenue_discrete

CORPUS_SEED = 20240611
CORPUS_SIZE = 30


def random_distribution(rng: np.random.Generator, max_support: int = 4, lo: float = 0.0,
                        hi: float = 10.0, min_support: int = 1, step: float = 0.5) -> DiscreteDistribution:
    """Support drawn without replacement from a ``step`` grid on ``[lo, hi]``, Dirichlet masses."""
    grid = np.arange(lo, hi + 1e-9, step)
    s = int(rng.integers(min_support, max_support + 1))
    v = np.sort(rng.choice(grid, size=s, replace=False))
    f = rng.dirichlet(np.ones(s))
    # keep every mass comfortably positive
    f = 0.05 / s + 0.95 * f
    f = f / f.sum()
    return DiscreteDistribution(v, f)


def build_corpus(seed: int = CORPUS_SEED, size: int = CORPUS_SIZE) -> list[list[DiscreteDistribution]]:
    """Hand-picked instances first, the rest random with ``k`` in {2, 3} and support at most 4."""
    D = DiscreteDistribution
    fixed = [
        [D.point_mass(1.0), D.point_mass(1.0)],
        [D.uniform([1.0, 2.0]), D.uniform([1.0, 2.0])],
        [D.uniform([1.0, 3.0]), D.uniform([1.0, 3.0]), D.uniform([1.0, 3.0])],
        [equal_revenue_discrete(3), equal_revenue_discrete(4)],
        [equal_revenue_discrete(2), equal_revenue_discrete(2), equal_revenue_discrete(3)],
        [D.point_mass(2.0), D.uniform([0.0, 1.0, 4.0])],
    ]
    rng = np.random.default_rng(seed)
    out = list(fixed)
    while len(out) < size:
        k = int(rng.integers(2, 4))
        out.append([random_distribution(rng, 4, min_support=2) for _ in range(k)])
    return out[:size]
