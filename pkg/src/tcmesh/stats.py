"""Small statistics toolkit: correlation, OLS, CCDF fitting, stratified tables."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateVariance, InsufficientData

DEFAULT_DEGREE_CUTOFF = 150
GROUPINGS = ("rating", "rating-size", "sector")


def rating_class(rating: int) -> str:
    """Map the 1-9 rating score onto classes A (1-3), B (4-6), C (7-9)."""
    if not 1 <= rating <= 9:
        raise ValueError(f"rating {rating} out of range 1-9")
    return "ABC"[(rating - 1) // 3]


def _pair(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-d and of equal length")
    if len(x) < 2:
        raise InsufficientData("need at least two pairs")
    return x, y


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x, y = _pair(xs, ys)
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateVariance("zero variance on an axis")
    dx = x - x.mean()
    dy = y - y.mean()
    r = float(np.dot(dx, dy) / math.sqrt(np.dot(dx, dx) * np.dot(dy, dy)))
    return max(-1.0, min(1.0, r))


def ols(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Least-squares ``(slope, intercept)`` of ys on xs."""
    x, y = _pair(xs, ys)
    if np.all(x == x[0]):
        raise DegenerateVariance("regressor has zero variance")
    mx, my = x.mean(), y.mean()
    dx = x - mx
    slope = float(np.dot(dx, y - my) / np.dot(dx, dx))
    return slope, float(my - slope * mx)


@dataclass(frozen=True)
class CcdfFit:
    slope: float
    intercept: float
    k_min: int
    k_max: int
    n_points: int
    r_squared: float

    @property
    def density_exponent(self) -> float:
        # P(k) ~ k^-(1 - slope) when CCDF(k) ~ k^slope
        return 1.0 - self.slope


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    pearson_r: float | None
    n: int
    cutoff_applied: float
    r_status: str = "ok"


@dataclass(frozen=True)
class DegreeBin:
    log_degree_lo: int
    n: int
    median: float
    q1: float
    q3: float


@dataclass(frozen=True)
class CorrelationRow:
    key: str
    n: int
    pearson_r: float | None
    status: str = "ok"


@dataclass(frozen=True)
class CorrelationTable:
    grouping: str
    rows: list[CorrelationRow]

    def get(self, key: str) -> CorrelationRow:
        for row in self.rows:
            if row.key == key:
                return row
        raise KeyError(key)


def ccdf_points(degrees: Iterable[int]) -> list[tuple[int, float]]:
    """Fraction of nodes with degree >= k, at every distinct k."""
    counts = Counter(degrees)
    if not counts:
        raise InsufficientData("empty degree sequence")
    if min(counts) < 1:
        raise ValueError("degrees must be positive")
    n = sum(counts.values())
    out, at_least = [], n
    for k in sorted(counts):
        out.append((k, at_least / n))
        at_least -= counts[k]
    return out


def fit_ccdf_slope(ccdf: Sequence[tuple[int, float]], k_min: int = 1, k_max: int | None = None) -> CcdfFit:
    """OLS line through (ln k, ln CCDF) for k in [k_min, k_max]."""
    if k_min < 1:
        raise ValueError("k_min must be >= 1")
    pts = [(k, c) for k, c in ccdf if k >= k_min and (k_max is None or k <= k_max) and c > 0]
    if len(pts) < 3:
        raise InsufficientData(f"only {len(pts)} CCDF points in window")
    lx = np.log([k for k, _ in pts])
    ly = np.log([c for _, c in pts])
    slope, intercept = ols(lx, ly)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(ly - ly.mean(), ly - ly.mean()))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return CcdfFit(slope, intercept, pts[0][0], pts[-1][0], len(pts), r2)


def _quartiles(values) -> tuple[float, float, float]:
    q1, med, q3 = np.percentile(np.asarray(values, dtype=float), [25, 50, 75])
    return float(q1), float(med), float(q3)


def size_degree_regression(
    pairs: Iterable[tuple[int, float]],
    degree_cutoff: float = DEFAULT_DEGREE_CUTOFF,
) -> tuple[RegressionResult, list[DegreeBin]]:
    """Regress ln(sales) on ln(in-degree).

    ``pairs`` holds ``(in_degree, sales_2007)`` per supplier. Suppliers with
    in-degree above ``degree_cutoff`` are left out of the fit but still appear
    in the unit-log-width bins.
    """
    pairs = [(k, s) for k, s in pairs if k >= 1 and s > 0]
    fit = [(math.log(k), math.log(s)) for k, s in pairs if k <= degree_cutoff]
    if len(fit) < 3:
        raise InsufficientData(f"only {len(fit)} suppliers below degree cutoff")
    lx = [a for a, _ in fit]
    ly = [b for _, b in fit]
    slope, intercept = ols(lx, ly)
    try:
        r, status = pearson(lx, ly), "ok"
    except DegenerateVariance:
        r, status = None, DegenerateVariance.reason
    bins: dict[int, list[float]] = defaultdict(list)
    for k, s in pairs:
        bins[math.floor(math.log(k))].append(math.log(s))
    table = []
    for b, vals in sorted(bins.items()):
        q1, med, q3 = _quartiles(vals)
        table.append(DegreeBin(b, len(vals), med, q1, q3))
    return RegressionResult(slope, intercept, r, len(fit), degree_cutoff, status), table


def group_key(point, grouping: str) -> str:
    if grouping == "rating":
        return point.rating_class
    if grouping == "rating-size":
        return f"{point.rating_class}/{point.size_class}"
    if grouping == "sector":
        return point.sector[:1]
    raise ValueError(f"unknown grouping {grouping!r}; expected one of {GROUPINGS}")


def grouped_correlations(points: Sequence, grouping: str) -> CorrelationTable:
    """Pearson r of (predicted_cagr, actual_cagr) within each group.

    Groups with fewer than two points are marked ``insufficient``.
    """
    groups: dict[str, list] = defaultdict(list)
    for p in points:
        groups[group_key(p, grouping)].append(p)
    rows = []
    for key in sorted(groups):
        members = groups[key]
        if len(members) < 2:
            rows.append(CorrelationRow(key, len(members), None, "insufficient"))
            continue
        try:
            r = pearson([p.predicted_cagr for p in members], [p.actual_cagr for p in members])
            rows.append(CorrelationRow(key, len(members), r))
        except DegenerateVariance:
            rows.append(CorrelationRow(key, len(members), None, DegenerateVariance.reason))
    return CorrelationTable(grouping, rows)
