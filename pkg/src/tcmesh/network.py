"""Weighted directed trade-credit network (customer -> supplier).

Edge weights are the per-pair sums of 2007 invoices. Everything here is a
read-only query over an immutable :class:`TradeNetwork`.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .errors import BalanceMissing
from .ingest import INVOICE_YEAR, Dataset

KEY_CUSTOMER_SHARE = 0.5


@dataclass(frozen=True)
class TradeNetwork:
    # (customer, supplier) -> summed weight
    edges: dict[tuple[str, str], float]
    dataset: Dataset | None = field(default=None, repr=False, compare=False)
    in_edges: dict[str, dict[str, float]] = field(init=False, repr=False, compare=False)
    out_edges: dict[str, dict[str, float]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ins: dict[str, dict[str, float]] = defaultdict(dict)
        outs: dict[str, dict[str, float]] = defaultdict(dict)
        for (j, i), w in self.edges.items():
            if not w > 0:
                raise ValueError(f"edge {j}->{i} has non-positive weight {w}")
            ins[i][j] = w
            outs[j][i] = w
        object.__setattr__(self, "in_edges", dict(ins))
        object.__setattr__(self, "out_edges", dict(outs))

    @property
    def suppliers(self) -> list[str]:
        return sorted(self.in_edges)

    @property
    def customers(self) -> list[str]:
        return sorted(self.out_edges)

    @property
    def nodes(self) -> list[str]:
        return sorted(set(self.in_edges) | set(self.out_edges))

    def incoming(self, supplier: str) -> dict[str, float]:
        return self.in_edges.get(supplier, {})

    def total_in(self, supplier: str) -> float:
        """P_i: sum of all invoice weight into ``supplier``."""
        return math.fsum(self.incoming(supplier).values())

    def induced(self, suppliers) -> "TradeNetwork":
        keep = set(suppliers)
        return TradeNetwork({e: w for e, w in self.edges.items() if e[1] in keep}, self.dataset)


@dataclass(frozen=True)
class NetworkSummary:
    n_suppliers: int
    n_customers: int
    n_links: int
    n_reciprocal_pairs: int
    avg_in_neighbors: float
    avg_out_neighbors: float


@dataclass(frozen=True)
class MatchingRow:
    supplier: str
    total_invoiced: float
    sales_2007: float
    ratio: float
    in_range: bool | None = None


@dataclass(frozen=True)
class FilterResult:
    retained: list[str]
    excluded_missing_balance: list[str]
    rows: list[MatchingRow]
    subnetwork: TradeNetwork
    lo: float
    hi: float


@dataclass(frozen=True)
class KeyCustomerFlag:
    supplier: str
    has_key_customer: bool
    key_customer: str | None
    share: float


def build_network(dataset: Dataset) -> TradeNetwork:
    parts: dict[tuple[str, str], list[float]] = defaultdict(list)
    for inv in dataset.invoices:
        parts[(inv.customer, inv.supplier)].append(inv.amount)
    return TradeNetwork({pair: math.fsum(ws) for pair, ws in parts.items()}, dataset)


def network_summary(net: TradeNetwork) -> NetworkSummary:
    n_sup = len(net.in_edges)
    n_cus = len(net.out_edges)
    n_links = len(net.edges)
    reciprocal = sum(1 for (j, i) in net.edges if j < i and (i, j) in net.edges)
    return NetworkSummary(
        n_suppliers=n_sup,
        n_customers=n_cus,
        n_links=n_links,
        n_reciprocal_pairs=reciprocal,
        avg_in_neighbors=n_links / n_sup if n_sup else 0.0,
        avg_out_neighbors=n_links / n_cus if n_cus else 0.0,
    )


def _sales_2007(net: TradeNetwork, supplier: str) -> float:
    rec = net.dataset.record(supplier, INVOICE_YEAR) if net.dataset is not None else None
    if rec is None:
        raise BalanceMissing(f"no 2007 balance for supplier {supplier}")
    return rec.sales


def matching_ratio(net: TradeNetwork, supplier: str) -> MatchingRow:
    sales = _sales_2007(net, supplier)
    total = net.total_in(supplier)
    return MatchingRow(supplier, total, sales, total / sales)


def filter_by_matching(net: TradeNetwork, lo: float = 0.8, hi: float = 1.2) -> FilterResult:
    """Keep suppliers with ``lo < ratio < hi`` (both bounds exclusive)."""
    if not 0 <= lo < hi:
        raise ValueError(f"need 0 <= lo < hi, got ({lo}, {hi})")
    rows, retained, missing = [], [], []
    for i in net.suppliers:
        try:
            row = matching_ratio(net, i)
        except BalanceMissing:
            missing.append(i)
            continue
        ok = lo < row.ratio < hi
        rows.append(MatchingRow(row.supplier, row.total_invoiced, row.sales_2007, row.ratio, ok))
        if ok:
            retained.append(i)
    return FilterResult(retained, missing, rows, net.induced(retained), lo, hi)


def key_customer(net: TradeNetwork, supplier: str, denominator: str = "sales") -> KeyCustomerFlag:
    """Largest payer's share of the supplier's annual sales.

    ``denominator="invoices"`` divides by the invoice total P_i instead of the
    2007 balance-sheet sales.
    """
    if denominator == "sales":
        base = _sales_2007(net, supplier)
    elif denominator == "invoices":
        base = net.total_in(supplier)
    else:
        raise ValueError(f"unknown denominator {denominator!r}")
    incoming = net.incoming(supplier)
    if not incoming:
        return KeyCustomerFlag(supplier, False, None, 0.0)
    # max weight, ties to the lexicographically smallest id
    top, weight = min(incoming.items(), key=lambda kv: (-kv[1], kv[0]))
    share = weight / base
    has = share >= KEY_CUSTOMER_SHARE
    return KeyCustomerFlag(supplier, has, top if has else None, share)


def weak_components(net: TradeNetwork) -> list[int]:
    adj: dict[str, set[str]] = defaultdict(set)
    for j, i in net.edges:
        adj[j].add(i)
        adj[i].add(j)
    seen: set[str] = set()
    sizes = []
    for start in adj:
        if start in seen:
            continue
        seen.add(start)
        stack, size = [start], 0
        while stack:
            node = stack.pop()
            size += 1
            for nb in adj[node]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        sizes.append(size)
    return sorted(sizes, reverse=True)


def degree_sequences(net: TradeNetwork) -> tuple[dict[str, int], dict[str, int]]:
    k_in = {i: len(cs) for i, cs in sorted(net.in_edges.items())}
    k_out = {j: len(ss) for j, ss in sorted(net.out_edges.items())}
    return k_in, k_out


def degree_counts(degrees) -> list[tuple[int, int]]:
    """Histogram rows ``(degree, count)`` sorted by degree."""
    return sorted(Counter(degrees).items())


def size_degree_pairs(net: TradeNetwork, suppliers=None) -> list[tuple[int, float]]:
    """``(K_in, R_i,2007)`` for suppliers that have a 2007 balance."""
    chosen = net.suppliers if suppliers is None else sorted(suppliers)
    out = []
    for i in chosen:
        rec = net.dataset.record(i, INVOICE_YEAR) if net.dataset is not None else None
        if rec is not None and net.incoming(i):
            out.append((len(net.incoming(i)), rec.sales))
    return out
