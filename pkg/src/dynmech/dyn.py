"""Optimal dynamic mechanism by backward induction over concave tradeoff functions.

The backward pass tabulates approximations ``g~_k .. g~_1`` of the cumulative
tradeoff functions. Execution keeps a scalar state ``c`` (the promised
expected utility of the next period), solves the period's tradeoff program
at that state on demand, charges ``v x`` before the last period so stage
utility is zero, and charges the adjusted payment in the last period.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .dist import DiscreteDistribution, expected_value
from .errors import InfeasibleError, InvalidStateError, ResourceLimitError
from .history import (MAX_HISTORIES, HistoryTree, VerifyReport, adjusted_to_original,
                      tree_size, verify_tree)
from .pwl import PiecewiseLinearConcave, adaptive_fit, add_linear, argmax, evaluate
from .statmech import StaticMechanism
from .tradeoff import TIGHT, TradeoffInstance, solve_tradeoff

__all__ = [
    "OptimalPolicy", "ExecutionTrace", "backward_pass", "plan", "stage_mechanism", "execute",
    "expected_revenue", "verify", "adjusted_to_original", "verify_tree", "terminal_function",
]

STATE_TOL = 1e-9
N_INIT = 17
MAX_GRID = 4096


def terminal_function() -> PiecewiseLinearConcave:
    """Zero on ``[0, inf)`` and minus infinity below."""
    return PiecewiseLinearConcave.constant(0.0, 0.0)


def remaining_welfare(dists) -> list[float]:
    """``W_i = sum_{j >= i} E[v_j]`` for each period."""
    ev = [expected_value(d) for d in dists]
    return [float(sum(ev[i:])) for i in range(len(dists))]


def _continuation(gtilde, i: int) -> PiecewiseLinearConcave:
    """Tradeoff function used by the period-``i`` program (0-based)."""
    g = gtilde[i + 1] if i + 1 < len(gtilde) else terminal_function()
    return add_linear(g, -1.0) if i == 0 else g


def backward_pass(dists, delta_prime: float, method: str = "auto", return_samples: bool = False):
    """Approximate cumulative tradeoff functions ``[g~_1, ..., g~_k]``.

    Each level samples the tight tradeoff program on ``[0, W_i]`` by adaptive
    bisection with tolerance ``delta_prime`` and keeps the concave envelope
    of the samples, so it lies below the sampled program by at most
    ``delta_prime`` between samples and touches it at the samples.
    """
    dists = list(dists)
    if not dists:
        raise ValueError("need at least one period")
    if not delta_prime > 0:
        raise ValueError("delta_prime must be positive")
    W = remaining_welfare(dists)
    k = len(dists)
    gtilde: list[PiecewiseLinearConcave | None] = [None] * k
    samples = [None] * k
    for i in range(k - 1, -1, -1):
        g = _continuation(gtilde, i)
        d = dists[i]

        def level_value(c, d=d, g=g, i=i):
            try:
                return solve_tradeoff(TradeoffInstance(d, c, g, TIGHT), method=method)[1]
            except InfeasibleError as exc:
                raise RuntimeError(f"period {i + 1} tradeoff infeasible at c={c!r}") from exc

        # the first level's function ends with slope -1 once the plateau of g~_2 is passed
        tail = None if i == 0 else 0.0
        f, xs, ys = adaptive_fit(level_value, 0.0, W[i], delta_prime, N_INIT, MAX_GRID, right_slope=tail)
        gtilde[i] = f
        samples[i] = (xs, ys)
    if return_samples:
        return gtilde, samples
    return gtilde


@dataclass
class OptimalPolicy:
    dists: list[DiscreteDistribution]
    gtilde: list[PiecewiseLinearConcave]
    c0: float
    delta_prime: float
    samples: list = field(default=None, repr=False)
    method: str = "auto"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def k(self) -> int:
        return len(self.dists)

    @property
    def predicted_revenue(self) -> float:
        return float(evaluate(self.gtilde[0], self.c0))

    def stage_mechanism(self, i: int, c: float) -> StaticMechanism:
        return stage_mechanism(self, i, c)

    def to_tree(self) -> HistoryTree:
        return policy_tree(self)


def plan(dists, delta_prime: float, method: str = "auto") -> OptimalPolicy:
    gtilde, samples = backward_pass(dists, delta_prime, method, return_samples=True)
    c0, _ = argmax(gtilde[0])
    return OptimalPolicy(list(dists), gtilde, c0, delta_prime, samples, method)


def stage_mechanism(policy: OptimalPolicy, i: int, c: float) -> StaticMechanism:
    """Adjusted stage mechanism ``(X, P)`` for period ``i`` (1-based) at state ``c``."""
    if not 1 <= i <= policy.k:
        raise IndexError(f"period {i} outside 1..{policy.k}")
    if c < -STATE_TOL:
        raise InvalidStateError(f"state {c!r} is below the utility domain")
    c = max(0.0, float(c))
    key = (i, round(c, 12))
    m = policy._cache.get(key)
    if m is None:
        g = _continuation(policy.gtilde, i - 1)
        m, _ = solve_tradeoff(TradeoffInstance(policy.dists[i - 1], c, g, TIGHT), method=policy.method)
        policy._cache[key] = m
    return m


@dataclass(frozen=True)
class ExecutionTrace:
    reports: tuple
    alloc: tuple
    pay: tuple
    adj_pay: tuple
    stage_utility: tuple
    states: tuple

    def to_dict(self) -> dict:
        return {name: list(getattr(self, name)) for name in
                ("reports", "alloc", "pay", "adj_pay", "stage_utility", "states")}


def _run(dists, reports, c0, mech_at, charge):
    k = len(dists)
    if len(reports) != k:
        raise ValueError(f"expected {k} reports, got {len(reports)}")
    c = c0
    rec = {n: [] for n in ("alloc", "pay", "adj_pay", "stage_utility", "states")}
    for i, (d, v) in enumerate(zip(dists, reports), start=1):
        j = d.index_of(v)
        m = mech_at(i, c)
        x, P = float(m.alloc[j]), float(m.pay[j])
        p = charge(i, k, v, x, P, c)
        rec["alloc"].append(x)
        rec["adj_pay"].append(P)
        rec["pay"].append(p)
        rec["stage_utility"].append(v * x - p)
        c = v * x - P
        rec["states"].append(c)
    return ExecutionTrace(tuple(float(v) for v in reports), *(tuple(rec[n]) for n in
                          ("alloc", "pay", "adj_pay", "stage_utility", "states")))


def _charge_optimal(i, k, v, x, P, c):
    return v * x if i < k else P


def execute(policy: OptimalPolicy, reports) -> ExecutionTrace:
    """Run the policy on one report sequence from state ``c0``."""
    return _run(policy.dists, reports, policy.c0, policy.stage_mechanism, _charge_optimal)


def tabulate(dists, c0, mech_at, charge, limit: int = MAX_HISTORIES) -> HistoryTree:
    """Expand a state-driven policy over every report history, one level at a time."""
    k = len(dists)
    if tree_size(dists) > limit:
        raise ResourceLimitError(f"history tree has {tree_size(dists):.0f} leaves, limit {limit}")
    alloc, adj, pay, states = [], [], [], []
    state = np.full((), float(c0))
    for i, d in enumerate(dists, start=1):
        v = d.support
        shape = state.shape + (len(d),)
        X = np.empty(shape)
        P = np.empty(shape)
        Q = np.empty(shape)
        for idx in itertools.product(*(range(n) for n in state.shape)):
            c = float(state[idx])
            m = mech_at(i, c)
            X[idx] = m.alloc
            P[idx] = m.pay
            Q[idx] = [charge(i, k, vj, xj, Pj, c) for vj, xj, Pj in zip(v, m.alloc, m.pay)]
        alloc.append(X)
        adj.append(P)
        pay.append(Q)
        state = v * X - P
        states.append(state)
    return HistoryTree(list(dists), alloc, adj, pay, states)


def policy_tree(policy: OptimalPolicy) -> HistoryTree:
    return tabulate(policy.dists, policy.c0, policy.stage_mechanism, _charge_optimal)


def expected_revenue(policy: OptimalPolicy) -> float:
    """Exact expected charged revenue over the full history tree."""
    return policy_tree(policy).revenue()


def verify(policy: OptimalPolicy) -> VerifyReport:
    return verify_tree(policy_tree(policy))
