"""Piecewise-linear concave functions on a half-bounded interval.

A function is stored as breakpoints ``(cs[j], ys[j])``. Below ``cs[0]`` it is
minus infinity. Above ``cs[-1]`` it continues linearly with ``right_slope``;
``right_slope=None`` means "keep the last segment's slope".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

CONCAVITY_TOL = 1e-9
_HULL_EPS = 1e-13
# two chord slopes closer than this (relative) count as the same linear piece
KINK_TOL = 1e-11


@dataclass(frozen=True, eq=False)
class PiecewiseLinearConcave:
    cs: np.ndarray
    ys: np.ndarray
    right_slope: float | None = 0.0

    def __post_init__(self):
        cs = np.asarray(self.cs, dtype=float).ravel()
        ys = np.asarray(self.ys, dtype=float).ravel()
        if cs.size == 0 or cs.size != ys.size:
            raise ValueError("breakpoint arrays must be non-empty and of equal length")
        if not (np.all(np.isfinite(cs)) and np.all(np.isfinite(ys))):
            raise ValueError("breakpoints must be finite")
        if np.any(np.diff(cs) <= 0):
            raise ValueError("breakpoint abscissae must be strictly increasing")
        slopes = np.diff(ys) / np.diff(cs)
        if slopes.size > 1 and np.any(np.diff(slopes) > CONCAVITY_TOL * np.maximum(1.0, np.abs(slopes[:-1]))):
            raise ValueError("breakpoints are not concave")
        rs = self.right_slope
        if rs is not None:
            rs = float(rs)
            if slopes.size and rs > slopes[-1] + CONCAVITY_TOL * max(1.0, abs(slopes[-1])):
                raise ValueError("right extension would break concavity")
        cs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "cs", cs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "right_slope", rs)

    # basic accessors

    @property
    def domain_lo(self) -> float:
        return float(self.cs[0])

    @property
    def domain_hi(self) -> float:
        return float(self.cs[-1])

    @property
    def tail_slope(self) -> float:
        """Slope used beyond ``domain_hi``."""
        if self.right_slope is not None:
            return self.right_slope
        if self.cs.size < 2:
            return 0.0
        return float((self.ys[-1] - self.ys[-2]) / (self.cs[-1] - self.cs[-2]))

    def __len__(self) -> int:
        return self.cs.size

    def __repr__(self) -> str:
        return (f"PiecewiseLinearConcave(cs={self.cs.tolist()}, ys={self.ys.tolist()}, "
                f"right_slope={self.right_slope!r})")

    def __call__(self, c):
        return evaluate(self, c)

    @classmethod
    def constant(cls, value: float = 0.0, lo: float = 0.0) -> PiecewiseLinearConcave:
        """``value`` on ``[lo, inf)``; the terminal continuation when value=0, lo=0."""
        return cls([lo], [value], 0.0)

    @classmethod
    def linear(cls, slope: float, lo: float = 0.0, intercept: float = 0.0) -> PiecewiseLinearConcave:
        """``intercept + slope*c`` on ``[lo, inf)``."""
        return cls([lo], [intercept + slope * lo], slope)

    def pieces(self) -> tuple[np.ndarray, np.ndarray]:
        """Lines ``(a, b)`` with ``f(c) = min_m a[m] + b[m] c`` on the domain."""
        dc = np.diff(self.cs)
        b = np.diff(self.ys) / dc if dc.size else np.empty(0)
        a = self.ys[:-1] - b * self.cs[:-1]
        tb = self.tail_slope
        ta = self.ys[-1] - tb * self.cs[-1]
        return np.append(a, ta), np.append(b, tb)

    def to_dict(self) -> dict:
        return {"cs": self.cs.tolist(), "ys": self.ys.tolist(), "right_slope": self.right_slope}

    @classmethod
    def from_dict(cls, data: dict) -> PiecewiseLinearConcave:
        return cls(data["cs"], data["ys"], data.get("right_slope", 0.0))


def evaluate(f: PiecewiseLinearConcave, c):
    """Value at ``c`` (scalar or array); ``-inf`` marks the infeasible region below the domain."""
    arr = np.asarray(c, dtype=float)
    out = np.interp(arr, f.cs, f.ys)
    above = arr > f.cs[-1]
    if np.any(above):
        out = np.where(above, f.ys[-1] + f.tail_slope * (arr - f.cs[-1]), out)
    out = np.where(arr < f.cs[0], -np.inf, out)
    if out.ndim == 0:
        return float(out)
    return out


def upper_concave_envelope(points: Iterable[tuple[float, float]], right_slope: float | None = 0.0
                           ) -> PiecewiseLinearConcave:
    """Least concave majorant of a point cloud, restricted to its abscissa range."""
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("upper_concave_envelope needs at least one point")
    order = np.lexsort((-pts[:, 1], pts[:, 0]))
    pts = pts[order]
    # keep the highest ordinate per abscissa
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = pts[1:, 0] != pts[:-1, 0]
    pts = pts[keep]
    hull: list[tuple[float, float]] = []
    for x, y in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it lies on or below the chord
            cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
            if cross >= -_HULL_EPS * max(1.0, abs(x - x1) * max(abs(y), abs(y1), 1.0)):
                hull.pop()
            else:
                break
        hull.append((x, y))
    h = np.array(hull)
    rs = right_slope
    if rs is not None and len(h) >= 2:
        last = (h[-1, 1] - h[-2, 1]) / (h[-1, 0] - h[-2, 0])
        rs = min(rs, last)
    return PiecewiseLinearConcave(h[:, 0], h[:, 1], rs)


def argmax(f: PiecewiseLinearConcave, tol: float = 1e-12) -> tuple[float, float]:
    """Maximizer over the breakpoints and its value; ties go to the smallest abscissa.

    Raises ``ValueError`` when the function increases without bound.
    """
    if f.tail_slope > 0:
        raise ValueError("function is unbounded above")
    top = float(np.max(f.ys))
    j = int(np.flatnonzero(f.ys >= top - tol)[0])
    return float(f.cs[j]), float(f.ys[j])


def add_linear(f: PiecewiseLinearConcave, slope: float) -> PiecewiseLinearConcave:
    """``c -> f(c) + slope*c``; the tail slope shifts by the same amount."""
    if slope == 0:
        return f
    rs = None if f.right_slope is None else f.right_slope + slope
    return PiecewiseLinearConcave(f.cs, f.ys + slope * f.cs, rs)


def max_concavity_violation(f: PiecewiseLinearConcave) -> float:
    """Largest increase between consecutive chord slopes (0 for concave data)."""
    if f.cs.size < 3:
        return 0.0
    s = np.diff(f.ys) / np.diff(f.cs)
    return float(max(0.0, np.max(np.diff(s))))


def adaptive_fit(fun, lo: float, hi: float, tol: float, n_init: int = 17, max_points: int = 4096,
                 right_slope: float | None = 0.0):
    """Sample a concave ``fun`` on ``[lo, hi]`` until every chord is within ``tol``.

    An interval is split when ``fun`` at its midpoint exceeds the chord by
    more than ``tol / 2``; for a concave function that bounds the gap over
    the whole interval by ``tol``. Interior breakpoints are then located
    exactly (for piecewise linear ``fun``) by intersecting neighbouring
    chords. Returns the envelope of all samples and the sample arrays.
    """
    if hi <= lo:
        cs = np.array([lo])
    else:
        cs = np.linspace(lo, hi, n_init)
    ys = [float(fun(c)) for c in cs]
    pts = dict(zip(cs.tolist(), ys))
    queue = list(zip(cs[:-1].tolist(), cs[1:].tolist()))
    min_width = max(1e-12, (hi - lo) * 1e-9)
    while queue and len(pts) < max_points:
        nxt = []
        for a, b in queue:
            if len(pts) >= max_points:
                break
            if b - a < min_width:
                continue
            m = 0.5 * (a + b)
            ym = float(fun(m))
            pts[m] = ym
            if ym - 0.5 * (pts[a] + pts[b]) > 0.5 * tol:
                nxt.extend([(a, m), (m, b)])
        queue = nxt
    # at most double the sample count; exact kinks need only a few extra points
    _locate_kinks(fun, pts, min(max_points, 2 * len(pts)))
    xs = np.array(sorted(pts))
    ysa = np.array([pts[c] for c in xs])
    return upper_concave_envelope(zip(xs, ysa), right_slope=right_slope), xs, ysa


def _locate_kinks(fun, pts: dict, max_points: int, rounds: int = 40) -> None:
    """Add samples at the breakpoints of a piecewise linear ``fun``.

    Between samples ``x1 < x2`` the lines through the neighbouring chords
    meet at ``x*``. When ``fun(x*)`` lies on both lines the interval holds a
    single kink and the sampled function is now exact there; otherwise the
    new sample splits the interval and the next round tries again.
    """
    done: set = set()
    for _ in range(rounds):
        xs = np.array(sorted(pts))
        if xs.size < 4:
            return
        ys = np.array([pts[c] for c in xs])
        eps = KINK_TOL * max(1.0, float(np.abs(ys).max()))
        slope = np.diff(ys) / np.diff(xs)
        added = False
        for i in range(1, xs.size - 2):
            if len(pts) >= max_points:
                return
            key = (xs[i], xs[i + 1])
            sl, sr = slope[i - 1], slope[i + 1]
            if key in done or sl - sr <= eps:
                continue
            x = xs[i] + (ys[i + 1] - ys[i] - sr * (xs[i + 1] - xs[i])) / (sl - sr)
            width = xs[i + 1] - xs[i]
            if not xs[i] + 1e-9 * width < x < xs[i + 1] - 1e-9 * width:
                done.add(key)
                continue
            peak = ys[i] + sl * (x - xs[i])
            chord = ys[i] + slope[i] * (x - xs[i])
            if peak - chord <= eps:
                done.add(key)
                continue
            y = float(fun(x))
            pts[float(x)] = y
            added = True
            if peak - y <= eps:
                done.update({(xs[i], float(x)), (float(x), xs[i + 1])})
        if not added:
            return
