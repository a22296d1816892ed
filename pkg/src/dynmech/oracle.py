"""Brute-force LP oracles over full history trees.

These programs enumerate every report history and are exact at desk scale.
They are ground truth for the backward-induction solver.
"""

from __future__ import annotations

import itertools

import numpy as np

from .dist import DiscreteDistribution
from .errors import InfeasibleError, ResourceLimitError
from .history import HistoryTree, adjusted_to_original, tree_size, verify_tree  # noqa: F401
from .lp import EQ, GE, LE, LinearProgram, rows_from_triplets, solve

MAX_SINGLE_LEAVES = 10**5
MAX_MULTI_VARS = 10**5
MAX_MARKOV_CELLS = 10**4


class _Rows:
    """Accumulates sparse constraint rows."""

    def __init__(self):
        self.r, self.c, self.v = [], [], []
        self.senses, self.rhs = [], []

    def add(self, cols, vals, sense, rhs=0.0):
        n = len(self.rhs)
        self.r.extend([n] * len(cols))
        self.c.extend(int(c) for c in cols)
        self.v.extend(float(v) for v in vals)
        self.senses.append(sense)
        self.rhs.append(float(rhs))

    def add_block(self, cols: np.ndarray, vals: np.ndarray, sense, rhs=0.0):
        """One row per leading index of ``cols``/``vals`` (2-D arrays)."""
        nrow, width = cols.shape
        base = len(self.rhs)
        self.r.extend(np.repeat(np.arange(base, base + nrow), width).tolist())
        self.c.extend(cols.ravel().tolist())
        self.v.extend(vals.ravel().tolist())
        self.senses.extend([sense] * nrow)
        self.rhs.extend(np.broadcast_to(np.asarray(rhs, dtype=float), (nrow,)).tolist())

    def matrix(self, n):
        return rows_from_triplets(self.r, self.c, self.v, (len(self.rhs), n))


def _check_status(sol, what):
    if sol.status != "optimal":
        raise InfeasibleError(f"{what} LP returned status {sol.status}")


def single_agent_lp(dists, ic: str = "all", bind_utility: bool = False) -> tuple[LinearProgram, list]:
    """The adjusted single-agent program over the full history tree.

    Returns the program and, per level, ``(x_offset, p_offset, shape)``.
    Variables at level ``i`` are stored in C order over the history shape.
    """
    dists = list(dists)
    if ic not in ("all", "adjacent"):
        raise ValueError("ic must be 'all' or 'adjacent'")
    k = len(dists)
    shapes = [tuple(len(d) for d in dists[: i + 1]) for i in range(k)]
    sizes = [int(np.prod(s)) for s in shapes]
    layout, off = [], 0
    for i in range(k):
        layout.append((off, off + sizes[i], shapes[i]))
        off += 2 * sizes[i]
    n = off
    obj = np.zeros(n)
    lower = np.zeros(n)
    upper = np.full(n, np.inf)
    rows = _Rows()
    prob = np.ones(())
    for i, d in enumerate(dists):
        xo, po, shape = layout[i]
        s = len(d)
        v = d.support
        prob = np.multiply.outer(prob, d.probs).reshape(-1)
        upper[xo:xo + sizes[i]] = 1.0
        lower[po:po + sizes[i]] = -np.inf
        if i == 0:
            obj[po:po + sizes[i]] = prob
        else:
            obj[xo:xo + sizes[i]] = prob * np.tile(v, sizes[i] // s)
        prefixes = np.arange(sizes[i] // s)[:, None] * s
        pairs = [(j, l) for j in range(s) for l in range(s) if j != l]
        if ic == "adjacent":
            pairs = [(j, l) for j, l in pairs if abs(j - l) == 1]
        # v_j (x_l - x_j) - p_l + p_j <= 0
        for j, l in pairs:
            cols = np.hstack([xo + prefixes + l, xo + prefixes + j, po + prefixes + l, po + prefixes + j])
            vals = np.tile([v[j], -v[j], -1.0, 1.0], (cols.shape[0], 1))
            rows.add_block(cols, vals, LE)
        # utility bound: v x - p - E_next[v' x' - p'] >= 0 (terminal: v x - p >= 0)
        here = np.arange(sizes[i])
        vrep = np.tile(v, sizes[i] // s)
        if i + 1 < k:
            xn, pn, _ = layout[i + 1]
            dn = dists[i + 1]
            sn = len(dn)
            child = here[:, None] * sn + np.arange(sn)[None, :]
            cols = np.hstack([xo + here[:, None], po + here[:, None], xn + child, pn + child])
            vals = np.hstack([vrep[:, None], -np.ones((sizes[i], 1)),
                              np.tile(-dn.probs * dn.support, (sizes[i], 1)),
                              np.tile(dn.probs, (sizes[i], 1))])
            rows.add_block(cols, vals, EQ if bind_utility else GE)
        else:
            cols = np.stack([xo + here, po + here], axis=1)
            vals = np.stack([vrep, -np.ones(sizes[i])], axis=1)
            rows.add_block(cols, vals, GE)
    lp = LinearProgram(obj, rows.matrix(n), rows.senses, rows.rhs, lower, upper)
    return lp, layout


def global_lp_single(dists, ic: str = "all", method: str = "auto", bind_utility: bool = False,
                     limit: int = MAX_SINGLE_LEAVES) -> tuple[float, HistoryTree]:
    """Exact optimal revenue for one buyer, with the solved mechanism tree."""
    dists = list(dists)
    if tree_size(dists) > limit:
        raise ResourceLimitError(f"history tree has {tree_size(dists):.0f} leaves, limit {limit}")
    lp, layout = single_agent_lp(dists, ic, bind_utility)
    sol = solve(lp, method=method)
    _check_status(sol, "single-agent")
    alloc, adj = [], []
    for xo, po, shape in layout:
        size = int(np.prod(shape))
        alloc.append(np.clip(sol.x[xo:xo + size], 0.0, 1.0).reshape(shape))
        adj.append(sol.x[po:po + size].reshape(shape))
    tree = HistoryTree(dists, alloc, adj)
    return float(sol.objective), tree


def global_lp_multi(agent_dists, method: str = "auto", limit: int = MAX_MULTI_VARS) -> float:
    """Optimal revenue of the adjusted multi-agent program with interim constraints.

    ``agent_dists[a][i]`` is agent ``a``'s value distribution in period ``i``.
    Allocations depend on the whole profile history; adjusted payments on
    the history before today plus the agent's own report today.
    """
    agent_dists = [list(a) for a in agent_dists]
    m = len(agent_dists)
    if m == 0:
        raise ValueError("need at least one agent")
    k = len(agent_dists[0])
    if any(len(a) != k for a in agent_dists):
        raise ValueError("every agent needs the same number of periods")
    sizes = [[len(agent_dists[a][i]) for a in range(m)] for i in range(k)]
    prof = [int(np.prod(s)) for s in sizes]
    n_hist = [1]
    for i in range(k):
        n_hist.append(n_hist[-1] * prof[i])
    # offsets: x[i][a] over (N_{i-1}, profile), p[i][a] over (N_{i-1}, own)
    xoff, poff, off = [], [], 0
    for i in range(k):
        xs, ps = [], []
        for a in range(m):
            xs.append(off)
            off += n_hist[i + 1]
        for a in range(m):
            ps.append(off)
            off += n_hist[i] * sizes[i][a]
        xoff.append(xs)
        poff.append(ps)
    n = off
    if n > limit:
        raise ResourceLimitError(f"multi-agent program has {n} variables, limit {limit}")
    obj = np.zeros(n)
    lower = np.full(n, -np.inf)
    upper = np.full(n, np.inf)
    rows = _Rows()

    def pidx(i, a, h, own):
        return poff[i][a] + h * sizes[i][a] + own

    def xidx(i, a, h, profile):
        return xoff[i][a] + h * prof[i] + int(np.ravel_multi_index(profile, sizes[i]))

    hist_prob = [np.ones(1)]
    for i in range(k):
        pp = np.ones(())
        for a in range(m):
            pp = np.multiply.outer(pp, agent_dists[a][i].probs)
        hist_prob.append(np.multiply.outer(hist_prob[-1], pp.reshape(-1)).reshape(-1))
    for i in range(k):
        for a in range(m):
            lower[xoff[i][a]:xoff[i][a] + n_hist[i + 1]] = 0.0
            upper[xoff[i][a]:xoff[i][a] + n_hist[i + 1]] = 1.0
    for i in range(k):
        profiles = list(itertools.product(*(range(s) for s in sizes[i])))
        for h in range(n_hist[i]):
            ph = hist_prob[i][h]
            for q, profile in enumerate(profiles):
                hi = h * prof[i] + q
                # objective
                for a in range(m):
                    d = agent_dists[a][i]
                    w = ph * np.prod([agent_dists[b][i].probs[profile[b]] for b in range(m)])
                    if i == 0:
                        obj[pidx(0, a, h, profile[a])] += w
                    else:
                        obj[xidx(i, a, h, profile)] += w * d.support[profile[a]]
                # supply
                rows.add([xidx(i, a, h, profile) for a in range(m)], [1.0] * m, LE, 1.0)
            for a in range(m):
                d = agent_dists[a][i]
                others = [b for b in range(m) if b != a]
                opro = list(itertools.product(*(range(sizes[i][b]) for b in others)))
                owts = [float(np.prod([agent_dists[b][i].probs[o[t]] for t, b in enumerate(others)]))
                        for o in opro]

                def full(own, o):
                    prof_ = [0] * m
                    prof_[a] = own
                    for t, b in enumerate(others):
                        prof_[b] = o[t]
                    return tuple(prof_)

                s = len(d)
                for j in range(s):
                    vj = d.support[j]
                    # interim IC against every misreport l
                    for l in range(s):
                        if l == j:
                            continue
                        cols, vals = [], []
                        for o, w in zip(opro, owts):
                            cols += [xidx(i, a, h, full(l, o)), xidx(i, a, h, full(j, o))]
                            vals += [vj * w, -vj * w]
                        cols += [pidx(i, a, h, l), pidx(i, a, h, j)]
                        vals += [-1.0, 1.0]
                        rows.add(cols, vals, LE)
                    # interim utility bound
                    cols, vals = [], []
                    for o, w in zip(opro, owts):
                        cols.append(xidx(i, a, h, full(j, o)))
                        vals.append(vj * w)
                    cols.append(pidx(i, a, h, j))
                    vals.append(-1.0)
                    if i + 1 < k:
                        nxt = list(itertools.product(*(range(s_) for s_ in sizes[i + 1])))
                        for o, w in zip(opro, owts):
                            hn = h * prof[i] + int(np.ravel_multi_index(full(j, o), sizes[i]))
                            for profile in nxt:
                                wn = w * float(np.prod([agent_dists[b][i + 1].probs[profile[b]]
                                                        for b in range(m)]))
                                vn = agent_dists[a][i + 1].support[profile[a]]
                                cols += [xidx(i + 1, a, hn, profile), pidx(i + 1, a, hn, profile[a])]
                                vals += [-wn * vn, wn]
                    rows.add(cols, vals, GE)
    lp = LinearProgram(obj, rows.matrix(n), rows.senses, rows.rhs, lower, upper)
    sol = solve(lp, method=method)
    _check_status(sol, "multi-agent")
    return float(sol.objective)


def markov_lp(d: DiscreteDistribution, delta: float, method: str = "auto",
              return_solution: bool = False):
    """Best per-period revenue of a stationary mechanism that sees today's and yesterday's report.

    Variables ``x(v0, v1)`` in ``[0, 1]`` and free ``p(v0, v1)``. Constraints
    are the one-step-lookahead PIC with discount ``delta`` and ex-post IR.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    s = len(d)
    if s * s > MAX_MARKOV_CELLS:
        raise ResourceLimitError(f"markov program has {s * s} cells, limit {MAX_MARKOV_CELLS}")
    v, f = d.support, d.probs
    nx = s * s
    n = 2 * nx

    def X(a, b):
        return a * s + b

    def P(a, b):
        return nx + a * s + b

    obj = np.zeros(n)
    for a in range(s):
        for b in range(s):
            obj[P(a, b)] = f[a] * f[b]
    rows = _Rows()
    # U(r) = delta * sum_c f_c (v_c x(r, c) - p(r, c))
    for a in range(s):
        for j in range(s):
            for l in range(s):
                if j == l:
                    continue
                # gain of reporting l over j must be <= 0
                cols = [X(a, l), P(a, l), X(a, j), P(a, j)]
                vals = [v[j], -1.0, -v[j], 1.0]
                for c in range(s):
                    cols += [X(l, c), P(l, c), X(j, c), P(j, c)]
                    vals += [delta * f[c] * v[c], -delta * f[c], -delta * f[c] * v[c], delta * f[c]]
                rows.add(cols, vals, LE)
            rows.add([X(a, j), P(a, j)], [v[j], -1.0], GE)
    lower = np.concatenate([np.zeros(nx), np.full(nx, -np.inf)])
    upper = np.concatenate([np.ones(nx), np.full(nx, np.inf)])
    lp = LinearProgram(obj, rows.matrix(n), rows.senses, rows.rhs, lower, upper)
    sol = solve(lp, method=method)
    _check_status(sol, "markov")
    if return_solution:
        return float(sol.objective), sol.x[:nx].reshape(s, s), sol.x[nx:].reshape(s, s)
    return float(sol.objective)
