"""Parsing, validation and joining of balance-sheet and invoice tables.

Both inputs are header-bearing comma-separated text. Malformed rows are
collected in a rejection log (``line_no<TAB>reason``) unless ``strict`` is
set, in which case the first bad row raises :class:`ParseError`.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import BalanceMissing, ParseError

YEARS = (2006, 2007, 2008)
INVOICE_YEAR = 2007
SECTOR_LETTERS = frozenset("CDEFGHIKO")
MAX_AMOUNT = 2.0**53

BALANCE_HEADER = ("firm_id", "year", "sales_eur", "purchases_eur", "rating", "sector")
INVOICE_HEADER = ("supplier_id", "customer_id", "year", "amount_eur")

_DECIMAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
_SECTOR = re.compile(r"([A-Z])(\d{4})?")


@dataclass(frozen=True, order=True)
class SectorCode:
    letter: str
    sub: str | None = None

    def __str__(self) -> str:
        return self.letter + (self.sub or "")

    @classmethod
    def parse(cls, text: str) -> "SectorCode":
        m = _SECTOR.fullmatch(text)
        if m is None:
            raise ValueError("malformed sector")
        if m.group(1) not in SECTOR_LETTERS:
            raise ValueError("unknown sector letter")
        return cls(m.group(1), m.group(2))

    def startswith(self, prefix: str) -> bool:
        return str(self).startswith(prefix)


@dataclass(frozen=True)
class BalanceRecord:
    firm: str
    year: int
    sales: float
    purchases: float
    rating: int
    sector: SectorCode


@dataclass(frozen=True)
class InvoiceRecord:
    supplier: str
    customer: str
    amount: float
    year: int = INVOICE_YEAR


@dataclass(frozen=True)
class Rejection:
    line_no: int
    reason: str

    def __str__(self) -> str:
        return f"{self.line_no}\t{self.reason}"


@dataclass
class IngestReport:
    balance_accepted: int = 0
    balance_rejected: list[Rejection] = field(default_factory=list)
    invoice_accepted: int = 0
    invoice_rejected: list[Rejection] = field(default_factory=list)
    invoices_dropped: int = 0
    # (invoice index in Dataset.invoices or input order if dropped, customer, reason)
    flagged: list[tuple[int, str, str]] = field(default_factory=list)


@dataclass(frozen=True)
class Dataset:
    """Joined balance sheets and invoices. Treat as immutable after assembly."""

    balances: dict[tuple[str, int], BalanceRecord]
    invoices: tuple[InvoiceRecord, ...]
    ingest_report: IngestReport = field(default_factory=IngestReport, compare=False)

    def record(self, firm: str, year: int) -> BalanceRecord | None:
        return self.balances.get((firm, year))

    def require(self, firm: str, year: int) -> BalanceRecord:
        rec = self.balances.get((firm, year))
        if rec is None:
            raise BalanceMissing(f"no {year} balance for {firm}")
        return rec

    def sales(self, firm: str, year: int) -> float:
        return self.require(firm, year).sales

    def firms(self) -> list[str]:
        return sorted({firm for firm, _ in self.balances})


def parse_amount(text: str) -> float:
    text = text.strip()
    if not _DECIMAL.fullmatch(text):
        raise ValueError("non-numeric amount")
    value = float(text)
    if not math.isfinite(value) or abs(value) > MAX_AMOUNT:
        raise ValueError("amount too large")
    return value


def _firm_id(text: str) -> str:
    if not text or any(ch.isspace() for ch in text):
        raise ValueError("invalid firm id")
    return text


def _int(text: str, what: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ValueError(f"non-integer {what}") from None


def _rows(stream: Iterable[str], header: tuple[str, ...]) -> Iterator[tuple[int, dict[str, str] | None]]:
    """Yield (line_no, row) pairs; row is None when fields are missing."""
    reader = csv.reader(stream)
    try:
        head = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty input: header required", line_no=1, reason="missing header") from None
    missing = [h for h in header if h not in head]
    if missing:
        raise ParseError(f"missing column(s): {', '.join(missing)}", line_no=1, reason="missing column")
    index = {h: head.index(h) for h in header}
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(head):
            yield reader.line_num, None
            continue
        yield reader.line_num, {h: row[i].strip() for h, i in index.items()}


def _balance_row(row: dict[str, str]) -> BalanceRecord:
    firm = _firm_id(row["firm_id"])
    year = _int(row["year"], "year")
    if year not in YEARS:
        raise ValueError("year out of range")
    sales = parse_amount(row["sales_eur"])
    purchases = parse_amount(row["purchases_eur"])
    if sales <= 0:
        raise ValueError("non-positive sales")
    if purchases < 0:
        raise ValueError("negative purchases")
    rating = _int(row["rating"], "rating")
    if not 1 <= rating <= 9:
        raise ValueError("rating out of range")
    sector = SectorCode.parse(row["sector"])
    return BalanceRecord(firm, year, sales, purchases, rating, sector)


def _invoice_row(row: dict[str, str]) -> InvoiceRecord:
    supplier = _firm_id(row["supplier_id"])
    customer = _firm_id(row["customer_id"])
    year = _int(row["year"], "year")
    if year != INVOICE_YEAR:
        raise ValueError("invoice year must be 2007")
    amount = parse_amount(row["amount_eur"])
    if amount <= 0:
        raise ValueError("non-positive amount")
    if supplier == customer:
        raise ValueError("self-loop")
    return InvoiceRecord(supplier, customer, amount, year)


def _reject(rejections: list[Rejection], line_no: int, reason: str, strict: bool) -> None:
    if strict:
        raise ParseError(f"line {line_no}: {reason}", line_no=line_no, reason=reason)
    rejections.append(Rejection(line_no, reason))


def parse_balance(stream: Iterable[str], strict: bool = False) -> tuple[list[BalanceRecord], list[Rejection]]:
    records: list[BalanceRecord] = []
    rejections: list[Rejection] = []
    seen: set[tuple[str, int]] = set()
    for line_no, row in _rows(stream, BALANCE_HEADER):
        if row is None:
            _reject(rejections, line_no, "missing field", strict)
            continue
        try:
            rec = _balance_row(row)
        except ValueError as exc:
            _reject(rejections, line_no, str(exc), strict)
            continue
        key = (rec.firm, rec.year)
        if key in seen:
            _reject(rejections, line_no, "duplicate firm-year", strict)
            continue
        seen.add(key)
        records.append(rec)
    return records, rejections


def parse_invoices(stream: Iterable[str], strict: bool = False) -> tuple[list[InvoiceRecord], list[Rejection]]:
    records: list[InvoiceRecord] = []
    rejections: list[Rejection] = []
    for line_no, row in _rows(stream, INVOICE_HEADER):
        if row is None:
            _reject(rejections, line_no, "missing field", strict)
            continue
        try:
            records.append(_invoice_row(row))
        except ValueError as exc:
            _reject(rejections, line_no, str(exc), strict)
    return records, rejections


def assemble_dataset(
    balances: Iterable[BalanceRecord],
    invoices: Iterable[InvoiceRecord],
    policy: str = "keep",
    required_years: Iterable[int] = YEARS,
    report: IngestReport | None = None,
) -> Dataset:
    """Join parsed tables.

    Invoices whose customer lacks a balance row for any of ``required_years``
    are flagged ``customer-balance-missing``. Policy ``"drop"`` removes them
    here; ``"keep"`` retains them and leaves the decision to each analysis.
    """
    if policy not in ("keep", "drop"):
        raise ValueError(f"unknown coverage policy {policy!r}")
    report = report if report is not None else IngestReport()
    table: dict[tuple[str, int], BalanceRecord] = {}
    for rec in balances:
        key = (rec.firm, rec.year)
        if key in table:
            raise ValueError(f"duplicate balance key {key}")
        table[key] = rec
    years = tuple(required_years)
    kept: list[InvoiceRecord] = []
    for n, inv in enumerate(invoices):
        complete = all((inv.customer, y) in table for y in years)
        if complete:
            kept.append(inv)
        elif policy == "drop":
            report.invoices_dropped += 1
            report.flagged.append((n, inv.customer, "customer-balance-missing"))
        else:
            report.flagged.append((len(kept), inv.customer, "customer-balance-missing"))
            kept.append(inv)
    return Dataset(table, tuple(kept), report)


def load_dataset(
    balance_path: str | Path,
    invoices_path: str | Path,
    strict: bool = False,
    policy: str = "keep",
) -> Dataset:
    with open(balance_path, newline="", encoding="utf-8") as fh:
        balances, bal_rej = parse_balance(fh, strict)
    with open(invoices_path, newline="", encoding="utf-8") as fh:
        invoices, inv_rej = parse_invoices(fh, strict)
    report = IngestReport(len(balances), bal_rej, len(invoices), inv_rej)
    return assemble_dataset(balances, invoices, policy, report=report)


def format_balance(records: Iterable[BalanceRecord]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(BALANCE_HEADER)
    for r in records:
        w.writerow([r.firm, r.year, repr(r.sales), repr(r.purchases), r.rating, str(r.sector)])
    return out.getvalue()


def format_invoices(records: Iterable[InvoiceRecord]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(INVOICE_HEADER)
    for r in records:
        w.writerow([r.supplier, r.customer, r.year, repr(r.amount)])
    return out.getvalue()


def format_rejections(rejections: Iterable[Rejection]) -> str:
    return "".join(f"{r}\n" for r in rejections)
