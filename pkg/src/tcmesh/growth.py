"""Actual vs. predicted (many-to-one) log growth of supplier sales.

The predicted growth of supplier ``i`` over ``(y0, y1)`` reweights each
2007 flow ``R_ji`` by the customer's purchase trend relative to 2007::

    ln( sum_j (P_j,y1 / P_j,2007) R_ji  /  sum_j (P_j,y0 / P_j,2007) R_ji )

For (2007, 2008) the denominator collapses to ``sum_j R_ji``; for
(2006, 2007) the numerator does. All rates are natural logs.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BalanceMissing,
    DegenerateDenominator,
    InsufficientData,
    NoUsableCustomers,
    TcmeshError,
)
from .ingest import INVOICE_YEAR, Dataset
from .network import TradeNetwork
from .stats import rating_class

SIZE_THRESHOLD_EUR = 1e6


@dataclass(frozen=True, order=True)
class Period:
    base_year: int
    next_year: int

    def __post_init__(self):
        if (self.base_year, self.next_year) not in ((2006, 2007), (2007, 2008)):
            raise ValueError(f"unsupported period {self.base_year}-{self.next_year}")

    def __str__(self) -> str:
        return f"{self.base_year}-{self.next_year}"

    @classmethod
    def parse(cls, text: str) -> "Period":
        a, _, b = text.partition("-")
        return cls(int(a), int(b))


FIRST = Period(2006, 2007)
SECOND = Period(2007, 2008)
PERIODS = (FIRST, SECOND)


@dataclass(frozen=True)
class GrowthPoint:
    supplier: str
    predicted: float
    actual: float
    period: Period
    usable_weight_fraction: float


@dataclass(frozen=True)
class CagrPoint:
    supplier: str
    predicted_cagr: float
    actual_cagr: float
    rating_class: str
    size_class: str
    sector: str


@dataclass(frozen=True)
class ScatterStats:
    n: int
    median_x: float
    median_y: float
    quartiles_x: tuple[float, float]
    quartiles_y: tuple[float, float]
    mean_x: float
    mean_y: float
    # order: I, II, III, IV
    quadrant_counts: tuple[int, int, int, int]
    centroid_quadrant: str
    axis_rule: str = "zero-positive"


@dataclass(frozen=True)
class Exclusion:
    supplier: str
    reason: str


def actual_log_growth(dataset: Dataset, supplier: str, period: Period) -> float:
    r0 = dataset.sales(supplier, period.base_year)
    r1 = dataset.sales(supplier, period.next_year)
    return math.log(r1 / r0)


def _customer_trend(dataset: Dataset, customer: str, years: Sequence[int]) -> tuple[float, float] | None:
    recs = [dataset.record(customer, y) for y in years]
    if any(r is None for r in recs):
        return None
    p0, p1 = recs[0].purchases, recs[1].purchases
    p_ref = recs[2].purchases
    if p0 <= 0 or p1 <= 0 or p_ref <= 0:
        return None
    return p0 / p_ref, p1 / p_ref


def predicted_log_growth(
    net: TradeNetwork,
    dataset: Dataset,
    supplier: str,
    period: Period,
    missing_policy: str = "drop-renormalize",
) -> tuple[float, float]:
    """Return ``(predicted log growth, usable_weight_fraction)``."""
    if missing_policy not in ("drop-renormalize", "fail"):
        raise ValueError(f"unknown missing policy {missing_policy!r}")
    incoming = net.incoming(supplier)
    if not incoming:
        raise NoUsableCustomers(f"{supplier} has no customers")
    years = (period.base_year, period.next_year, INVOICE_YEAR)
    num, den, used = [], [], []
    for j in sorted(incoming):
        w = incoming[j]
        trend = _customer_trend(dataset, j, years)
        if trend is None:
            if missing_policy == "fail":
                raise BalanceMissing(f"customer {j} of {supplier} lacks purchases for {period}")
            continue
        den.append(trend[0] * w)
        num.append(trend[1] * w)
        used.append(w)
    if not used:
        raise NoUsableCustomers(f"no customer of {supplier} has complete purchases for {period}")
    top, bottom = math.fsum(num), math.fsum(den)
    if not bottom > 0 or not top > 0:
        raise DegenerateDenominator(f"degenerate weighted sums for {supplier}")
    fraction = math.fsum(used) / net.total_in(supplier)
    return math.log(top / bottom), fraction


def growth_point(
    net: TradeNetwork,
    dataset: Dataset,
    supplier: str,
    period: Period,
    missing_policy: str = "drop-renormalize",
) -> GrowthPoint:
    actual = actual_log_growth(dataset, supplier, period)
    predicted, fraction = predicted_log_growth(net, dataset, supplier, period, missing_policy)
    return GrowthPoint(supplier, predicted, actual, period, fraction)


def default_workers() -> int:
    env = os.environ.get("TCMESH_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def build_scatter(
    net: TradeNetwork,
    dataset: Dataset,
    suppliers: Iterable[str],
    period: Period,
    missing_policy: str = "drop-renormalize",
    workers: int | None = None,
) -> tuple[list[GrowthPoint], list[Exclusion]]:
    """One point per supplier where both coordinates are computable.

    Output is ordered by supplier id regardless of ``workers``.
    """
    ordered = sorted(set(suppliers))

    def one(i: str) -> GrowthPoint | Exclusion:
        try:
            return growth_point(net, dataset, i, period, missing_policy)
        except TcmeshError as exc:
            return Exclusion(i, exc.reason)

    workers = workers or 1
    if workers > 1 and len(ordered) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, ordered))
    else:
        results = [one(i) for i in ordered]
    points = [r for r in results if isinstance(r, GrowthPoint)]
    excluded = [r for r in results if isinstance(r, Exclusion)]
    return points, excluded


def size_class(sales_2007: float) -> str:
    return "large" if sales_2007 > SIZE_THRESHOLD_EUR else "small"


def cagr_points(
    net: TradeNetwork,
    dataset: Dataset,
    suppliers: Iterable[str],
    missing_policy: str = "drop-renormalize",
    workers: int | None = None,
) -> tuple[list[CagrPoint], list[Exclusion]]:
    """Mean of the two consecutive log growths, actual and predicted."""
    ordered = sorted(set(suppliers))
    first, ex1 = build_scatter(net, dataset, ordered, FIRST, missing_policy, workers)
    second, ex2 = build_scatter(net, dataset, ordered, SECOND, missing_policy, workers)
    by1 = {p.supplier: p for p in first}
    by2 = {p.supplier: p for p in second}
    reasons: dict[str, str] = {}
    for e in ex1 + ex2:
        reasons.setdefault(e.supplier, e.reason)
    points, excluded = [], []
    for i in ordered:
        if i not in by1 or i not in by2:
            excluded.append(Exclusion(i, reasons.get(i, "missing-period")))
            continue
        rec = dataset.require(i, INVOICE_YEAR)
        a, b = by1[i], by2[i]
        points.append(
            CagrPoint(
                supplier=i,
                predicted_cagr=(a.predicted + b.predicted) / 2,
                actual_cagr=(a.actual + b.actual) / 2,
                rating_class=rating_class(rec.rating),
                size_class=size_class(rec.sales),
                sector=str(rec.sector),
            )
        )
    return points, excluded


def _quadrant(x: float, y: float) -> int:
    # exact zeros count as positive
    if x >= 0:
        return 0 if y >= 0 else 3
    return 1 if y >= 0 else 2


QUADRANTS = ("I", "II", "III", "IV")


def scatter_stats(points: Sequence[GrowthPoint] | Sequence[tuple[float, float]]) -> ScatterStats:
    """Medians, quartiles, means and sign-quadrant counts of (predicted, actual).

    The centroid is the point of medians.
    """
    if not points:
        raise InsufficientData("scatter_stats needs at least one point")
    if isinstance(points[0], GrowthPoint):
        xy = np.array([(p.predicted, p.actual) for p in points], dtype=float)
    else:
        xy = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = xy[:, 0], xy[:, 1]
    qx = np.percentile(x, [25, 50, 75])
    qy = np.percentile(y, [25, 50, 75])
    counts = [0, 0, 0, 0]
    for a, b in xy:
        counts[_quadrant(a, b)] += 1
    return ScatterStats(
        n=len(xy),
        median_x=float(qx[1]),
        median_y=float(qy[1]),
        quartiles_x=(float(qx[0]), float(qx[2])),
        quartiles_y=(float(qy[0]), float(qy[2])),
        mean_x=math.fsum(x) / len(x),
        mean_y=math.fsum(y) / len(y),
        quadrant_counts=tuple(counts),
        centroid_quadrant=QUADRANTS[_quadrant(float(qx[1]), float(qy[1]))],
    )
