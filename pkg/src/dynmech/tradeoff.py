"""Surplus-utility tradeoff programs and the (alpha, nu)-step allocation family."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import DiscreteDistribution
from .errors import InfeasibleError
from .lp import EQ, LE, LinearProgram, solve
from .pwl import PiecewiseLinearConcave, evaluate
from .statmech import StaticMechanism

TIGHT = "tight"
AT_MOST = "at-most"
ALPHA_GRID = 1000


@dataclass(frozen=True)
class TradeoffInstance:
    d: DiscreteDistribution
    c: float
    g: PiecewiseLinearConcave
    mode: str = TIGHT

    def __post_init__(self):
        if self.mode not in (TIGHT, AT_MOST):
            raise ValueError(f"unknown mode {self.mode!r}")


def build_tradeoff_lp(t: TradeoffInstance, ic: str = "local") -> tuple[LinearProgram, float]:
    """LP over ``[x_1..x_s, u_1..u_s, t_1..t_s]`` and the constant to subtract from its value.

    Payments are implied by ``p = v x - u``. The epigraph variable ``t_j`` is
    shifted by ``K`` so every piece row has a non-negative right-hand side.
    ``ic="all"`` writes every pairwise IC row; ``ic="local"`` writes IC between
    neighbours only. The two neighbour rows force a monotone allocation, and
    with it every pairwise row, so both describe the same set.
    """
    if ic not in ("all", "local"):
        raise ValueError("ic must be 'all' or 'local'")
    d, g = t.d, t.g
    v, f = d.support, d.probs
    s = len(d)
    a, b = g.pieces()
    K = max(0.0, -float(a.min()))
    n = 3 * s
    rows, rhs, senses = [], [], []
    # IC: type j does not gain by reporting l: u_l + (v_j - v_l) x_l <= u_j
    pairs = [(j, l) for j in range(s) for l in range(s) if j != l and (ic == "all" or abs(j - l) == 1)]
    for j, l in pairs:
        r = np.zeros(n)
        r[l] = v[j] - v[l]
        r[s + l] = 1.0
        r[s + j] = -1.0
        rows.append(r)
        rhs.append(0.0)
        senses.append(LE)
    # t_j - K <= a_m + b_m u_j
    for j in range(s):
        for am, bm in zip(a, b):
            r = np.zeros(n)
            r[2 * s + j] = 1.0
            r[s + j] = -bm
            rows.append(r)
            rhs.append(am + K)
            senses.append(LE)
    r = np.zeros(n)
    r[s:2 * s] = f
    rows.append(r)
    rhs.append(float(t.c))
    senses.append(EQ if t.mode == TIGHT else LE)
    obj = np.concatenate([f * v, np.zeros(s), f])
    lower = np.concatenate([np.zeros(s), np.full(s, g.domain_lo), np.full(s, -np.inf)])
    upper = np.concatenate([np.ones(s), np.full(s, np.inf), np.full(s, np.inf)])
    return LinearProgram(obj, np.array(rows), senses, rhs, lower, upper), K


def solve_tradeoff(t: TradeoffInstance, method: str = "auto", ic: str = "local") -> tuple[StaticMechanism, float]:
    """Max ``E[v x + g(u)]`` over IC mechanisms with ``u >= domain_lo`` and ``E[u]`` (=|<=) ``c``."""
    if not np.isfinite(t.c):
        raise ValueError("utility bound must be finite")
    lp, K = build_tradeoff_lp(t, ic)
    sol = solve(lp, method=method)
    if sol.status == "infeasible":
        raise InfeasibleError(f"tradeoff problem infeasible at c={t.c!r}")
    if sol.status != "optimal":
        raise InfeasibleError(f"tradeoff problem {sol.status} at c={t.c!r}")
    s = len(t.d)
    x = np.clip(sol.x[:s], 0.0, 1.0)
    u = sol.x[s:2 * s]
    pay = t.d.support * x - u
    # objective reported through g itself, not the epigraph slack
    value = float(t.d.probs @ (t.d.support * x + evaluate(t.g, u)))
    if not np.isfinite(value):
        value = sol.objective - K
    return StaticMechanism(x, pay), value


# step allocations ---------------------------------------------------------


def step_alloc(d: DiscreteDistribution, alpha: float, nu: float) -> np.ndarray:
    """``alpha`` for values below ``nu``, 1 from ``nu`` upward."""
    return np.where(d.support >= nu, 1.0, float(alpha))


def _envelope_utilities(d: DiscreteDistribution, x: np.ndarray) -> np.ndarray:
    """Lowest IC utility profile with ``u_1 = 0``: ``u_j = sum_{l<j} x_l (v_{l+1} - v_l)``."""
    gaps = np.diff(d.support)
    return np.concatenate(([0.0], np.cumsum(x[:-1] * gaps)))


def _best_shift(d: DiscreteDistribution, x: np.ndarray, env: np.ndarray, c: float,
                g: PiecewiseLinearConcave) -> tuple[float, float]:
    """Choose the lowest type's utility ``w`` to maximize ``E[p + g(u)]``.

    Utilities are ``w + env`` and payments ``v x - w - env``; the objective
    is concave in ``w`` and piecewise linear, so its maximum sits at a
    candidate where some ``w + env_j`` hits a breakpoint of ``g``, or at an
    end of the feasible range ``[domain_lo, c - E[env]]``.
    """
    f = d.probs
    lo = g.domain_lo - env.min()
    hi = c - float(f @ env)
    if hi < lo - 1e-12:
        return -np.inf, np.nan
    hi = max(hi, lo)
    base = float(f @ (d.support * x - env))

    if not np.isfinite(hi):
        # slope of obj for large w is tail_slope - 1
        if g.tail_slope > 1.0:
            raise ValueError("objective is unbounded in the utility shift")
        cand = (g.cs[:, None] - env[None, :]).ravel()
        cand = np.append(cand[cand >= lo], lo)
    else:
        cand = (g.cs[:, None] - env[None, :]).ravel()
        cand = np.concatenate((cand[(cand >= lo) & (cand <= hi)], [lo, hi]))
    cand = np.unique(cand)
    vals = base - cand + evaluate(g, cand[:, None] + env[None, :]) @ f
    j = int(np.argmax(vals))
    return float(vals[j]), float(cand[j])


def step_allocation_value(d: DiscreteDistribution, c: float, g: PiecewiseLinearConcave,
                          alpha: float, nu: float) -> float:
    """Best ``E[p + g(u)]`` achievable with the ``(alpha, nu)`` step allocation."""
    x = step_alloc(d, alpha, nu)
    return _best_shift(d, x, _envelope_utilities(d, x), c, g)[0]


def step_mechanism(d: DiscreteDistribution, c: float, g: PiecewiseLinearConcave,
                   alpha: float, nu: float) -> StaticMechanism:
    x = step_alloc(d, alpha, nu)
    env = _envelope_utilities(d, x)
    val, w = _best_shift(d, x, env, c, g)
    if not np.isfinite(val):
        raise InfeasibleError("step allocation has no feasible payment shift")
    return StaticMechanism(x, d.support * x - (w + env))


def best_step_allocation(d: DiscreteDistribution, c: float, g: PiecewiseLinearConcave,
                         n_alpha: int = ALPHA_GRID) -> tuple[tuple[float, float], float]:
    """Search ``nu`` over the support and ``alpha`` over ``{0, 1/n, ..., 1}``.

    Each candidate is scored by revenue plus the tradeoff term, ``E[p + g(u)]``,
    with payments on the IC lower envelope and the expected utility at most
    ``c`` (``c = inf`` drops that constraint).
    """
    if c < 0:
        raise ValueError(f"utility bound must be non-negative, got {c!r}")
    best, arg = -np.inf, None
    alphas = np.linspace(0.0, 1.0, n_alpha + 1)
    for k, nu in enumerate(d.support):
        # at the lowest threshold every type is served whatever alpha is
        for alpha in (alphas if k else alphas[-1:]):
            val = step_allocation_value(d, c, g, alpha, nu)
            if val > best + 1e-12:
                best, arg = val, (float(alpha), float(nu))
    if arg is None:
        raise InfeasibleError("no step allocation is feasible")
    return arg, float(best)
