import pytest

from tcmesh.ingest import BalanceRecord, Dataset, InvoiceRecord, SectorCode, assemble_dataset
from tcmesh.network import build_network

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def balance(firm, year, sales, purchases=None, rating=2, sector="D"):
    return BalanceRecord(firm, year, float(sales), float(sales * 0.8 if purchases is None else purchases),
                         rating, SectorCode.parse(sector))


def make_dataset(invoices, sales=None, purchases=None, years=(2006, 2007, 2008)) -> Dataset:
    """invoices: iterable of (customer, supplier, amount).

    sales: {firm: sales or {year: sales}}; purchases: {firm: {year: P}}.
    Firms without explicit values get flat 1e6 sales and 8e5 purchases.
    """
    sales = sales or {}
    purchases = purchases or {}
    firms = {f for c, s, _ in invoices for f in (c, s)} | set(sales) | set(purchases)
    records = []
    for f in sorted(firms):
        for y in years:
            s = sales.get(f, 1e6)
            s = s.get(y) if isinstance(s, dict) else s
            p = purchases.get(f, {}).get(y, 8e5) if f in purchases else 8e5
            if s is None or p is None:
                continue
            records.append(balance(f, y, s, p))
    invs = [InvoiceRecord(s, c, float(a)) for c, s, a in invoices]
    return assemble_dataset(records, invs)


@pytest.fixture
def reciprocal_fixture():
    """Suppliers A, B; customers C, D, E plus A and B (reciprocal pair)."""
    invoices = [("C", "A", 600), ("D", "A", 300), ("B", "A", 50), ("E", "B", 500), ("A", "B", 500)]
    ds = make_dataset(invoices, sales={"A": 1000.0, "B": 1000.0})
    return build_network(ds)
