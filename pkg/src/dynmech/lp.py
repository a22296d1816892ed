"""Dense linear programs and an embedded two-phase simplex solver.

Every tradeoff subproblem and every brute-force oracle in the package is
phrased as a :class:`LinearProgram` and handed to :func:`solve`.  The
embedded solver works on a dense tableau with Dantzig pricing and falls
back to Bland's rule whenever it stalls on degenerate pivots, so it cannot
cycle.  Programs too large for a dense tableau are routed to HiGHS through
:func:`scipy.optimize.linprog` (``method="auto"``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.optimize
import scipy.sparse as sp

from .errors import SolverLimitError

LE, EQ, GE = "<=", "==", ">="
_SENSES = (LE, EQ, GE)

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

FEAS_TOL = 1e-9
MAX_PIVOTS = 10**6
# programs with rows + columns above this go to HiGHS under method="auto"
DENSE_LIMIT = 800
# degenerate pivots tolerated under Dantzig pricing before switching to Bland
_STALL_LIMIT = 50
PIVOT_TOL = 1e-6
CHECK_TOL = 1e-9
_REFACTOR = 100


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """``maximize objective @ x`` subject to ``A x (senses) rhs`` and bounds.

    ``A`` may be a dense array or any scipy sparse matrix.  Bounds default
    to ``0 <= x < inf``; use ``-np.inf`` / ``np.inf`` for free directions.
    """

    objective: np.ndarray
    A: np.ndarray | sp.spmatrix
    senses: tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        n = c.size
        A = self.A
        if sp.issparse(A):
            A = sp.csr_matrix(A, dtype=float)
        else:
            A = np.atleast_2d(np.asarray(A, dtype=float))
            if A.size == 0:
                A = np.zeros((0, n))
        if A.shape[1] != n:
            raise ValueError(f"constraint width {A.shape[1]} != objective width {n}")
        m = A.shape[0]
        senses = tuple(self.senses)
        if len(senses) != m:
            raise ValueError(f"{len(senses)} senses for {m} rows")
        bad = [s for s in senses if s not in _SENSES]
        if bad:
            raise ValueError(f"unknown constraint sense {bad[0]!r}")
        b = np.asarray(self.rhs, dtype=float).ravel()
        if b.size != m:
            raise ValueError(f"{b.size} right-hand sides for {m} rows")
        if not np.all(np.isfinite(b)):
            raise ValueError("right-hand sides must be finite")
        lo = np.zeros(n) if self.lower is None else np.broadcast_to(
            np.asarray(self.lower, dtype=float), (n,)).copy()
        hi = np.full(n, np.inf) if self.upper is None else np.broadcast_to(
            np.asarray(self.upper, dtype=float), (n,)).copy()
        if np.any(lo > hi):
            raise ValueError("a variable has lower bound above its upper bound")
        if np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise ValueError("bounds exclude every finite value")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    @property
    def scale(self) -> float:
        """Magnitude used to make feasibility tolerances relative."""
        return max(1.0, float(np.max(np.abs(self.rhs), initial=0.0)))

    def dense_matrix(self) -> np.ndarray:
        return self.A.toarray() if sp.issparse(self.A) else self.A

    def max_violation(self, x: np.ndarray) -> float:
        """Largest violation of any row or bound at ``x`` (0 when feasible)."""
        x = np.asarray(x, dtype=float)
        Ax = np.asarray(self.A @ x).ravel()
        viol = 0.0
        s = np.array(self.senses)
        if Ax.size:
            r = Ax - self.rhs
            viol = max(viol, float(np.max(np.where(s == LE, r, 0.0), initial=0.0)))
            viol = max(viol, float(np.max(np.where(s == GE, -r, 0.0), initial=0.0)))
            viol = max(viol, float(np.max(np.where(s == EQ, np.abs(r), 0.0), initial=0.0)))
        viol = max(viol, float(np.max(self.lower - x, initial=0.0)))
        viol = max(viol, float(np.max(x - self.upper, initial=0.0)))
        return viol


@dataclass(frozen=True)
class LPSolution:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def solve(lp: LinearProgram, method: str = "auto", max_pivots: int = MAX_PIVOTS) -> LPSolution:
    """Solve ``lp`` and return a certified status.

    ``method`` is ``"simplex"`` (embedded solver), ``"highs"`` (scipy), or
    ``"auto"`` which picks the embedded solver for programs with at most
    ``DENSE_LIMIT`` rows plus columns.
    """
    checked = method == "auto"
    if method == "auto":
        method = "simplex" if sum(lp.shape) <= DENSE_LIMIT else "highs"
    if method == "simplex" and checked:
        # the embedded answer is accepted only when it is a clean optimum
        try:
            sol = _solve_simplex(lp, max_pivots)
        except SolverLimitError:
            sol = None
        if sol is None or not sol.optimal or lp.max_violation(sol.x) > CHECK_TOL * lp.scale:
            sol = _solve_highs(lp)
    elif method == "simplex":
        sol = _solve_simplex(lp, max_pivots)
    elif method == "highs":
        sol = _solve_highs(lp)
    else:
        raise ValueError(f"unknown LP method {method!r}")
    if sol.optimal:
        x = np.clip(sol.x, lp.lower, lp.upper)
        sol = LPSolution(OPTIMAL, x, float(lp.objective @ x))
    return sol


# --- standard form ---------------------------------------------------------

@dataclass
class _Standard:
    """``min cost @ z`` s.t. ``A z = b``, ``z >= 0``, ``b >= 0``; x = T z + offset."""

    A: np.ndarray
    b: np.ndarray
    cost: np.ndarray
    T: np.ndarray
    offset: np.ndarray
    n_struct: int
    slack_basic: np.ndarray  # per row: column of a +1 slack usable as initial basis, or -1


def _standard_form(lp: LinearProgram) -> _Standard:
    A = lp.dense_matrix()
    m, n = A.shape
    lo, hi = lp.lower, lp.upper
    lo_fin, hi_fin = np.isfinite(lo), np.isfinite(hi)

    # one z column per variable, two for free variables
    shifted = lo_fin
    mirrored = ~lo_fin & hi_fin
    free = ~lo_fin & ~hi_fin
    var_of_col = np.concatenate([np.arange(n), np.flatnonzero(free)])
    sign_of_col = np.concatenate([np.where(mirrored, -1.0, 1.0), -np.ones(free.sum())])
    nz = var_of_col.size
    T = np.zeros((n, nz))
    T[var_of_col, np.arange(nz)] = sign_of_col
    offset = np.where(shifted, lo, np.where(mirrored, hi, 0.0))

    boxed = np.flatnonzero(shifted & hi_fin)
    rows = [A @ T]
    rhs = [lp.rhs - A @ offset]
    senses = list(lp.senses)
    if boxed.size:
        box = np.zeros((boxed.size, nz))
        box[np.arange(boxed.size), boxed] = 1.0
        rows.append(box)
        rhs.append(hi[boxed] - lo[boxed])
        senses += [LE] * boxed.size
    Az = np.vstack(rows)
    b = np.concatenate(rhs)
    senses = np.array(senses)
    mm = Az.shape[0]

    ineq = np.flatnonzero(senses != EQ)
    S = np.zeros((mm, ineq.size))
    S[ineq, np.arange(ineq.size)] = np.where(senses[ineq] == LE, 1.0, -1.0)
    full = np.hstack([Az, S])

    flip = (b < 0) | ((b == 0) & (senses == GE))
    full[flip] *= -1.0
    b = np.where(flip, -b, b)

    slack_basic = np.full(mm, -1)
    slack_basic[ineq] = np.where(S[ineq, np.arange(ineq.size)] * np.where(flip[ineq], -1, 1) > 0,
                                 nz + np.arange(ineq.size), -1)

    cost = np.concatenate([-(lp.objective @ T), np.zeros(ineq.size)])
    return _Standard(full, b, cost, T, offset, nz, slack_basic)


# --- tableau simplex -------------------------------------------------------

def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    prow = tab[row] / tab[row, col]
    tab -= np.outer(tab[:, col], prow)
    tab[row] = prow


def _refactor(tab: np.ndarray, basis: np.ndarray, M0: np.ndarray, cost: np.ndarray) -> bool:
    """Rebuild ``tab`` as ``B^-1 M0`` from the original data; False if ``B`` is singular."""
    m = basis.size
    try:
        body = np.linalg.solve(M0[:, basis], M0)
    except np.linalg.LinAlgError:
        return False
    if not np.all(np.isfinite(body)):
        return False
    tab[:m] = body
    cB = cost[basis]
    tab[-1, :-1] = cost - cB @ body[:, :-1]
    tab[-1, -1] = -cB @ body[:, -1]
    return True


def _iterate(tab: np.ndarray, basis: np.ndarray, ncols: int, budget: list[int],
             M0: np.ndarray, cost: np.ndarray) -> str:
    """Run simplex pivots on ``tab`` until optimal or unbounded.

    Dantzig pricing with a two-pass (Harris) ratio test that favours large
    pivot elements; after a run of degenerate pivots it switches to Bland's
    rule, which cannot cycle. ``M0``/``cost`` are the untouched constraint
    rows and costs, used to refactor the tableau every ``_REFACTOR`` pivots.
    """
    m = tab.shape[0] - 1
    stall = 0
    since = 0
    every = max(_REFACTOR, m)
    while True:
        if since >= every:
            _refactor(tab, basis, M0, cost)
            since = 0
        d = tab[-1, :ncols]
        bland = stall >= _STALL_LIMIT
        neg = np.flatnonzero(d < -FEAS_TOL)
        if neg.size == 0:
            # certify optimality on reduced costs rebuilt from the original data
            if since and _refactor(tab, basis, M0, cost):
                since = 0
                continue
            return OPTIMAL
        j = int(neg[0]) if bland else int(np.argmin(d))
        col = tab[:m, j]
        piv_tol = PIVOT_TOL * max(1.0, float(np.abs(col).max()))
        pos = np.flatnonzero(col > piv_tol)
        if pos.size == 0:
            return UNBOUNDED
        rhs = np.maximum(tab[pos, -1], 0.0)
        if bland:
            ratios = rhs / col[pos]
            rmin = ratios.min()
            ties = pos[ratios <= rmin + FEAS_TOL * max(1.0, abs(rmin))]
            row = int(ties[np.argmin(basis[ties])])
        else:
            bound = ((rhs + FEAS_TOL) / col[pos]).min()
            ok = rhs / col[pos] <= bound
            cand = pos[ok]
            row = int(cand[np.argmax(col[cand])])
            rmin = max(tab[row, -1], 0.0) / col[row]
        if budget[0] <= 0:
            raise SolverLimitError("simplex pivot cap reached")
        budget[0] -= 1
        _pivot(tab, row, j)
        basis[row] = j
        since += 1
        stall = stall + 1 if rmin <= FEAS_TOL else 0


def _solve_simplex(lp: LinearProgram, max_pivots: int) -> LPSolution:
    std = _standard_form(lp)
    A, b = std.A, std.b
    m, N = A.shape
    budget = [max_pivots]

    needs_art = std.slack_basic < 0
    art_rows = np.flatnonzero(needs_art)
    n_art = art_rows.size
    tab = np.zeros((m + 1, N + n_art + 1))
    tab[:m, :N] = A
    tab[art_rows, N + np.arange(n_art)] = 1.0
    tab[:m, -1] = b
    basis = np.where(needs_art, -1, std.slack_basic)
    basis[art_rows] = N + np.arange(n_art)

    scale = max(1.0, float(np.max(np.abs(b), initial=0.0)))
    if n_art:
        tab[-1, :] = -tab[art_rows].sum(axis=0)
        tab[-1, N:N + n_art] = 0.0
        cost1 = np.concatenate([np.zeros(N), np.ones(n_art)])
        _iterate(tab, basis, N + n_art, budget, tab[:m].copy(), cost1)
        if -tab[-1, -1] > FEAS_TOL * scale:
            return LPSolution(INFEASIBLE)
        keep = np.ones(m, dtype=bool)
        for r in np.flatnonzero(basis >= N):
            mags = np.abs(tab[r, :N])
            j = int(np.argmax(mags))
            if mags[j] > FEAS_TOL:
                _pivot(tab, r, j)
                basis[r] = j
            else:
                keep[r] = False
        tab = np.vstack([tab[:m][keep], tab[-1:]])
        tab = np.hstack([tab[:, :N], tab[:, -1:]])
        basis = basis[keep]
        A, b = A[keep], b[keep]
        m = basis.size

    M0 = np.hstack([A, b[:, None]])
    if not _refactor(tab, basis, M0, std.cost):
        cB = std.cost[basis]
        tab[-1, :N] = std.cost - cB @ tab[:m, :N]
        tab[-1, -1] = -cB @ tab[:m, -1]
    status = _iterate(tab, basis, N, budget, M0, std.cost)
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED)

    z = np.zeros(N)
    z[basis] = tab[:m, -1]
    # re-solve the basic system from the original data to shed pivot drift
    try:
        zb = np.linalg.solve(A[:, basis], b)
        if np.all(zb >= -FEAS_TOL * scale):
            z[:] = 0.0
            z[basis] = zb
    except np.linalg.LinAlgError:
        pass
    z = np.maximum(z, 0.0)
    x = std.T @ z[:std.n_struct] + std.offset
    return LPSolution(OPTIMAL, x, float(lp.objective @ x))


# --- HiGHS route -----------------------------------------------------------

def _solve_highs(lp: LinearProgram) -> LPSolution:
    A = sp.csr_matrix(lp.A)
    s = np.array(lp.senses)
    le, ge, eq = s == LE, s == GE, s == EQ
    A_ub = sp.vstack([A[le], -A[ge]]) if (le.any() or ge.any()) else None
    b_ub = np.concatenate([lp.rhs[le], -lp.rhs[ge]]) if A_ub is not None else None
    A_eq = A[eq] if eq.any() else None
    b_eq = lp.rhs[eq] if eq.any() else None
    bounds = list(zip(np.where(np.isfinite(lp.lower), lp.lower, None),
                      np.where(np.isfinite(lp.upper), lp.upper, None)))
    res = scipy.optimize.linprog(-lp.objective, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                                 bounds=bounds, method="highs",
                                 options={"primal_feasibility_tolerance": 1e-10,
                                          "dual_feasibility_tolerance": 1e-10})
    if res.status == 0:
        return LPSolution(OPTIMAL, np.asarray(res.x, dtype=float), float(-res.fun))
    if res.status == 2:
        # presolve can report an unbounded program as infeasible
        if lp.objective.any():
            probe = _solve_highs(LinearProgram(np.zeros_like(lp.objective), lp.A, lp.senses,
                                               lp.rhs, lp.lower, lp.upper))
            if probe.optimal:
                return LPSolution(UNBOUNDED)
        return LPSolution(INFEASIBLE)
    if res.status == 3:
        return LPSolution(UNBOUNDED)
    if res.status == 1:
        raise SolverLimitError(res.message)
    raise RuntimeError(f"HiGHS failed: {res.message}")


def rows_from_triplets(rows: Sequence[int], cols: Sequence[int], vals: Sequence[float],
                       shape: tuple[int, int]) -> sp.csr_matrix:
    """Assemble a sparse constraint matrix; duplicate entries are summed."""
    return sp.csr_matrix((np.asarray(vals, float), (np.asarray(rows), np.asarray(cols))), shape=shape)
