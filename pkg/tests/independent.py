"""Reference computations that share no code with the package.

Used to derive frozen expected values. Each one is a direct, unoptimized
transcription of a definition.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog


def original_dynamic_lp(supports, probs) -> float:
    """Max expected total payment over all history-dependent mechanisms.

    Constraints are written in the original variables: one-shot deviation
    PIC with truthful continuation, and non-negative stage utility at every
    history. Solved with scipy's HiGHS directly.
    """
    k = len(supports)
    hists = [list(itertools.product(*(range(len(s)) for s in supports[: i + 1]))) for i in range(k)]
    idx = {}
    n = 0
    for i in range(k):
        for h in hists[i]:
            idx[("x", h)] = n
            idx[("p", h)] = n + 1
            n += 2

    def stage(h):
        i = len(h) - 1
        e = np.zeros(n)
        e[idx[("x", h)]] = supports[i][h[-1]]
        e[idx[("p", h)]] = -1.0
        return e

    def cont(h):
        """Expected future stage utility after history ``h`` under truthful play."""
        i = len(h)
        e = np.zeros(n)
        if i == k:
            return e
        for j, f in enumerate(probs[i]):
            e += f * (stage(h + (j,)) + cont(h + (j,)))
        return e

    A, b = [], []
    for i in range(k):
        prefixes = set(h[:-1] for h in hists[i])
        for pre in prefixes:
            for j in range(len(supports[i])):
                for l in range(len(supports[i])):
                    if j == l:
                        continue
                    truth = stage(pre + (j,)) + cont(pre + (j,))
                    lie = np.zeros(n)
                    lie[idx[("x", pre + (l,))]] = supports[i][j]
                    lie[idx[("p", pre + (l,))]] = -1.0
                    lie += cont(pre + (l,))
                    A.append(lie - truth)
                    b.append(0.0)
        for h in hists[i]:
            A.append(-stage(h))
            b.append(0.0)
    c = np.zeros(n)
    for i in range(k):
        for h in hists[i]:
            pr = np.prod([probs[t][h[t]] for t in range(i + 1)])
            c[idx[("p", h)]] = -pr
    bounds = []
    for key in sorted(idx, key=idx.get):
        bounds.append((0, 1) if key[0] == "x" else (None, None))
    res = linprog(c, A_ub=np.array(A), b_ub=np.array(b), bounds=bounds, method="highs")
    assert res.status == 0, res.message
    return float(-res.fun)


def best_two_price_mixture(support, probs, c, grid=2000) -> float:
    """Max surplus over lotteries on two posted prices (support plus one above) with utility ``c``."""
    v = np.asarray(support, float)
    f = np.asarray(probs, float)
    prices = list(v) + [v[-1] + 1.0]

    def us(p):
        m = v >= p
        return float(((v - p) * f)[m].sum()), float((v * f)[m].sum())

    best = -np.inf
    for p1, p2 in itertools.combinations_with_replacement(prices, 2):
        (u1, s1), (u2, s2) = us(p1), us(p2)
        if u1 == u2:
            if abs(u1 - c) < 1e-12:
                best = max(best, s1, s2)
            continue
        w = (c - u2) / (u1 - u2)
        if -1e-12 <= w <= 1 + 1e-12:
            best = max(best, w * s1 + (1 - w) * s2)
    return best


def fraction_markov_check(support, probs, x, p, delta):
    """Exact PIC slack, IR slack and revenue of a two-report stationary mechanism."""
    s = len(support)
    v = [Fraction(a) for a in support]
    f = [Fraction(a) for a in probs]
    U = [delta * sum(f[c] * (v[c] * x[r][c] - p[r][c]) for c in range(s)) for r in range(s)]
    worst_gain = max(
        (v[j] * x[a][l] - p[a][l] + U[l]) - (v[j] * x[a][j] - p[a][j] + U[j])
        for a in range(s) for j in range(s) for l in range(s))
    min_ir = min(v[j] * x[a][j] - p[a][j] for a in range(s) for j in range(s))
    rev = sum(f[a] * f[b] * p[a][b] for a in range(s) for b in range(s))
    return worst_gain, min_ir, rev
