"""Two-approximation: monopoly pricing each period mixed with a constant-allocation mechanism.

The constant mechanism allocates with a probability ``Y`` that ignores the
current report. Its continuation values follow the one-dimensional recursion
``h_i(c) = max_{0<=Y<=1} E[h_{i+1}(Y (v_i - E v_i) + c)] + Y E v_i`` with
``h_{k+1}`` the zero function on ``[0, inf)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dist import DiscreteDistribution, expected_value, monopoly
from .dyn import ExecutionTrace, _run, remaining_welfare, tabulate, terminal_function
from .history import HistoryTree
from .pwl import PiecewiseLinearConcave, adaptive_fit, add_linear, argmax, evaluate
from .statmech import StaticMechanism

DEFAULT_DELTA = 1e-7


def best_constant_allocation(d: DiscreteDistribution, c: float, h: PiecewiseLinearConcave
                             ) -> tuple[float, float]:
    """Exact ``max_Y E[h(Y (v - E v) + c)] + Y E v`` over ``[0, 1]``, and the smallest maximizer.

    The objective is concave and piecewise linear in ``Y``, so it peaks at
    ``0``, at the largest feasible ``Y``, or where some type's utility lands
    on a breakpoint of ``h``.
    """
    ev = expected_value(d)
    dev = d.support - ev
    if c < h.domain_lo - 1e-12:
        return -np.inf, np.nan
    # largest Y keeping every type inside the domain
    ymax = 1.0
    neg = dev < 0
    if np.any(neg):
        ymax = min(1.0, float(np.min((c - h.domain_lo) / -dev[neg])))
    ymax = max(ymax, 0.0)
    cand = [0.0, ymax]
    nz = dev != 0
    if np.any(nz):
        ys = (h.cs[:, None] - c) / dev[None, nz]
        cand.extend(ys[(ys > 0) & (ys < ymax)].ravel().tolist())
    Y = np.unique(np.array(cand))
    u = c + Y[:, None] * dev[None, :]
    vals = evaluate(h, np.maximum(u, h.domain_lo)) @ d.probs + Y * ev
    best = float(vals.max())
    j = int(np.flatnonzero(vals >= best - 1e-12)[0])
    return best, float(Y[j])


def backward_pass_h(dists, delta_prime: float = DEFAULT_DELTA) -> list[PiecewiseLinearConcave]:
    """Tabulate ``[h_1, ..., h_k]`` on ``[0, W_1]`` by adaptive bisection."""
    dists = list(dists)
    if not dists:
        raise ValueError("need at least one period")
    k = len(dists)
    hi = remaining_welfare(dists)[0]
    out: list[PiecewiseLinearConcave | None] = [None] * k
    nxt = terminal_function()
    for i in range(k - 1, -1, -1):
        d = dists[i]
        f, _, _ = adaptive_fit(lambda c, d=d, h=nxt: best_constant_allocation(d, c, h)[0],
                               0.0, hi, delta_prime, right_slope=0.0)
        out[i] = f
        nxt = f
    return out


@dataclass
class ApproxPolicy:
    dists: list[DiscreteDistribution]
    htilde: list[PiecewiseLinearConcave]
    c0: float
    delta_prime: float = DEFAULT_DELTA
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def k(self) -> int:
        return len(self.dists)

    def next_h(self, i: int) -> PiecewiseLinearConcave:
        """Continuation used in period ``i`` (1-based)."""
        return self.htilde[i] if i < self.k else terminal_function()

    def allocation(self, i: int, c: float) -> float:
        c = max(0.0, float(c))
        key = (i, round(c, 12))
        Y = self._cache.get(key)
        if Y is None:
            _, Y = best_constant_allocation(self.dists[i - 1], c, self.next_h(i))
            self._cache[key] = Y
        return Y

    def stage_mechanism(self, i: int, c: float) -> StaticMechanism:
        """Adjusted stage mechanism: allocation ``Y`` for every type, adjusted payment ``Y E v - c``."""
        d = self.dists[i - 1]
        Y = self.allocation(i, c)
        n = len(d)
        return StaticMechanism(np.full(n, Y), np.full(n, Y * expected_value(d) - max(0.0, c)))

    def upper_bound_term(self) -> float:
        return float(evaluate(self.htilde[0], self.c0) - self.c0)


def plan_approx(dists, delta_prime: float = DEFAULT_DELTA) -> ApproxPolicy:
    h = backward_pass_h(dists, delta_prime)
    c0, _ = argmax(add_linear(h[0], -1.0))
    return ApproxPolicy(list(dists), h, c0, delta_prime)


def mechanism1_revenue(dists) -> float:
    """Revenue of posting each period's monopoly price, ignoring history."""
    return float(sum(monopoly(d)[1] for d in dists))


def _charge2(i, k, v, x, P, c):
    # P = Y E v - c, so the last-period charge is exactly the adjusted payment
    return v * x if i < k else P


def execute2(policy: ApproxPolicy, reports) -> ExecutionTrace:
    return _run(policy.dists, reports, policy.c0, policy.stage_mechanism, _charge2)


def approx_tree(policy: ApproxPolicy) -> HistoryTree:
    return tabulate(policy.dists, policy.c0, policy.stage_mechanism, _charge2)


def expected_revenue2(policy: ApproxPolicy) -> float:
    return approx_tree(policy).revenue()


def upper_bound(dists, delta_prime: float = DEFAULT_DELTA, policy: ApproxPolicy | None = None) -> float:
    """Monopoly revenue summed over periods plus ``max_c h_1(c) - c``.

    The tabulated ``h_1`` can sit below the exact one by ``k * delta_prime``,
    so that slack is added to keep the bound valid.
    """
    if policy is None:
        policy = plan_approx(dists, delta_prime)
    return mechanism1_revenue(dists) + policy.upper_bound_term() + policy.k * policy.delta_prime


def combined_revenue(dists, policy: ApproxPolicy) -> float:
    """Revenue of running each mechanism with probability one half."""
    return 0.5 * (mechanism1_revenue(dists) + expected_revenue2(policy))
