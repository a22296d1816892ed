"""Mechanisms tabulated over the full tree of report histories.

Level ``i`` (0-based) stores arrays of shape ``(s_1, ..., s_{i+1})`` indexed by
the support indices of the reports so far.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dist import DiscreteDistribution

MAX_HISTORIES = 10**6


@dataclass
class HistoryTree:
    dists: list[DiscreteDistribution]
    alloc: list[np.ndarray]
    adj_pay: list[np.ndarray]
    pay: list[np.ndarray] | None = None
    states: list[np.ndarray] | None = None

    def __post_init__(self):
        k = len(self.dists)
        if len(self.alloc) != k or len(self.adj_pay) != k:
            raise ValueError("one allocation and one adjusted-payment array per period")
        for i in range(k):
            shape = tuple(len(d) for d in self.dists[: i + 1])
            for name, arrs in (("alloc", self.alloc), ("adj_pay", self.adj_pay), ("pay", self.pay)):
                if arrs is not None and np.shape(arrs[i]) != shape:
                    raise ValueError(f"{name}[{i}] has shape {np.shape(arrs[i])}, expected {shape}")
        if self.pay is None:
            self.pay = adjusted_to_original(self.dists, self.alloc, self.adj_pay)

    @property
    def k(self) -> int:
        return len(self.dists)

    def values(self, i: int) -> np.ndarray:
        """Period-``i`` values broadcast against level ``i`` arrays."""
        return self.dists[i].support

    def path_probs(self, i: int) -> np.ndarray:
        """Probability of each history at level ``i``."""
        p = np.ones(())
        for d in self.dists[: i + 1]:
            p = np.multiply.outer(p, d.probs)
        return p

    def stage_utilities(self) -> list[np.ndarray]:
        return [self.values(i) * self.alloc[i] - self.pay[i] for i in range(self.k)]

    def revenue(self) -> float:
        return float(sum((self.path_probs(i) * self.pay[i]).sum() for i in range(self.k)))

    def adjusted_objective(self) -> float:
        total = float((self.path_probs(0) * self.adj_pay[0]).sum())
        for i in range(1, self.k):
            total += float((self.path_probs(i) * self.values(i) * self.alloc[i]).sum())
        return total


def tree_size(dists) -> int:
    return int(np.prod([len(d) for d in dists], dtype=float))


def adjusted_to_original(dists, alloc, adj_pay) -> list[np.ndarray]:
    """``p_i = p_hat_i + E_{v_{i+1}}[v_{i+1} x_{i+1} - p_hat_{i+1}]``; the last period is unchanged."""
    k = len(dists)
    out = [np.asarray(adj_pay[i], dtype=float).copy() for i in range(k)]
    for i in range(k - 1):
        nxt = dists[i + 1].support * alloc[i + 1] - adj_pay[i + 1]
        out[i] = out[i] + nxt @ dists[i + 1].probs
    return out


@dataclass(frozen=True)
class VerifyReport:
    max_pic_violation: float
    min_stage_utility: float
    max_abs_stage_utility_before_last: float
    per_period_pic: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "max_pic_violation": self.max_pic_violation,
            "min_stage_utility": self.min_stage_utility,
            "max_abs_stage_utility_before_last": self.max_abs_stage_utility_before_last,
            "per_period_pic": list(self.per_period_pic),
        }


def continuation_utilities(tree: HistoryTree) -> list[np.ndarray]:
    """Expected future stage utility after each history, under truthful play."""
    st = tree.stage_utilities()
    U = [None] * tree.k
    U[-1] = np.zeros_like(st[-1])
    for i in range(tree.k - 2, -1, -1):
        U[i] = (st[i + 1] + U[i + 1]) @ tree.dists[i + 1].probs
    return U


def verify_tree(tree: HistoryTree) -> VerifyReport:
    """Brute-force PIC and ex-post IR statistics over every history and misreport.

    A deviation at period ``i`` is a single misreport followed by truthful
    play; its continuation is evaluated along the misreport-induced branch.
    """
    st = tree.stage_utilities()
    U = continuation_utilities(tree)
    worst = []
    for i in range(tree.k):
        v = tree.values(i)
        x, p = tree.alloc[i], tree.pay[i]
        # dev[..., j, l]: true value v_j reports v_l
        dev = v[:, None] * x[..., None, :] - p[..., None, :] + U[i][..., None, :]
        truthful = np.diagonal(dev, axis1=-2, axis2=-1)
        gain = dev - truthful[..., :, None]
        worst.append(float(max(0.0, gain.max())))
    min_u = float(min(s.min() for s in st))
    zero_dev = float(max((np.abs(s).max() for s in st[:-1]), default=0.0))
    return VerifyReport(max(worst), min_u, zero_dev, worst)
