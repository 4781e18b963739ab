import io

import pytest
from hypothesis import given, strategies as st

from tcmesh.errors import ParseError
from tcmesh.ingest import (
    BalanceRecord,
    InvoiceRecord,
    SectorCode,
    assemble_dataset,
    format_balance,
    format_invoices,
    parse_balance,
    parse_invoices,
)

BAL_HEAD = "firm_id,year,sales_eur,purchases_eur,rating,sector\n"
INV_HEAD = "supplier_id,customer_id,year,amount_eur\n"


def lines(text):
    return io.StringIO(text)


def test_balance_row_maps_fields():
    recs, rej = parse_balance(lines(BAL_HEAD + "F1,2007,1000000,800000,2,D\n"))
    assert rej == []
    assert recs == [BalanceRecord("F1", 2007, 1e6, 8e5, 2, SectorCode("D"))]


def test_rating_out_of_range_rejected():
    recs, rej = parse_balance(lines(BAL_HEAD + "F1,2007,1000000,800000,10,D\n"))
    assert recs == []
    assert [(r.line_no, r.reason) for r in rej] == [(2, "rating out of range")]
    assert str(rej[0]) == "2\trating out of range"


def test_lenient_mode_counts_rejections():
    body = (
        "F1,2006,10,5,1,C\n"
        "F1,2007,11,5,1,C\n"
        "F2,2007,abc,5,1,C\n"
        "F2,2008,12.5,0,9,D2891\n"
    )
    recs, rej = parse_balance(lines(BAL_HEAD + body))
    assert len(recs) == 3
    assert len(rej) == 1
    assert rej[0].reason == "non-numeric amount"
    assert recs[-1].sector == SectorCode("D", "2891")


def test_strict_mode_aborts():
    with pytest.raises(ParseError) as err:
        parse_balance(lines(BAL_HEAD + "F1,2007,1,1,1,Z\n"), strict=True)
    assert err.value.line_no == 2
    assert err.value.reason == "unknown sector letter"


@pytest.mark.parametrize(
    "row, reason",
    [
        ("F1,2007,1000000,800000,0,D", "rating out of range"),
        ("F1,2007,1000000,800000,2,Q", "unknown sector letter"),
        ("F1,2007,1000000,800000,2,D28", "malformed sector"),
        ("F1,2009,1000000,800000,2,D", "year out of range"),
        ("F1,2007,0,800000,2,D", "non-positive sales"),
        ("F1,2007,10,-1,2,D", "negative purchases"),
        ("F1,2007,\"1,000\",5,2,D", "non-numeric amount"),
        ("F1,2007,inf,5,2,D", "non-numeric amount"),
        ("F1,2007,1e17,5,2,D", "amount too large"),
        ("F1,2007,10", "missing field"),
        ("F 1,2007,10,5,2,D", "invalid firm id"),
    ],
)
def test_balance_errors(row, reason):
    _, rej = parse_balance(lines(BAL_HEAD + row + "\n"))
    assert [r.reason for r in rej] == [reason]


def test_duplicate_firm_year_is_error():
    recs, rej = parse_balance(lines(BAL_HEAD + "F1,2007,10,5,2,D\nF1,2007,11,5,2,D\n"))
    assert len(recs) == 1
    assert rej[0].reason == "duplicate firm-year"
    assert rej[0].line_no == 3


def test_missing_column_is_fatal_even_lenient():
    with pytest.raises(ParseError) as err:
        parse_balance(lines("firm_id,year,sales_eur,purchases_eur,rating\nF1,2007,1,1,1\n"))
    assert err.value.reason == "missing column"


def test_invoice_row_maps_fields():
    recs, rej = parse_invoices(lines(INV_HEAD + "F1,F2,2007,5000\n"))
    assert recs == [InvoiceRecord("F1", "F2", 5000.0, 2007)]
    assert rej == []


def test_invoice_self_loop_rejected():
    recs, rej = parse_invoices(lines(INV_HEAD + "F1,F1,2007,5000\n"))
    assert recs == []
    assert rej[0].reason == "self-loop"


@pytest.mark.parametrize(
    "row, reason",
    [("F1,F2,2007,0", "non-positive amount"), ("F1,F2,2007,-3", "non-positive amount"),
     ("F1,F2,2006,10", "invoice year must be 2007"), ("F1,F2,2007", "missing field")],
)
def test_invoice_errors(row, reason):
    _, rej = parse_invoices(lines(INV_HEAD + row + "\n"))
    assert [r.reason for r in rej] == [reason]


def test_repeated_pair_kept_separately():
    recs, _ = parse_invoices(lines(INV_HEAD + "F1,F2,2007,5000\nF1,F2,2007,7000\n"))
    assert len(recs) == 2


def _bal(firm, year):
    return BalanceRecord(firm, year, 100.0, 50.0, 3, SectorCode("G"))


def test_assemble_joins():
    ds = assemble_dataset([_bal("F1", 2007), _bal("F2", 2007)], [InvoiceRecord("F1", "F2", 10.0)], required_years=(2007,))
    assert len(ds.invoices) == 1
    assert ds.ingest_report.flagged == []


def test_assemble_drop_policy():
    ds = assemble_dataset([_bal("F1", 2007)], [InvoiceRecord("F1", "F9", 10.0)], policy="drop")
    assert ds.invoices == ()
    assert ds.ingest_report.invoices_dropped == 1


def test_assemble_keep_policy_flags():
    ds = assemble_dataset([_bal("F1", 2007)], [InvoiceRecord("F1", "F9", 10.0)], policy="keep")
    assert len(ds.invoices) == 1
    assert ds.ingest_report.flagged == [(0, "F9", "customer-balance-missing")]


firm_ids = st.text(alphabet="ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-", min_size=1, max_size=8)
amounts = st.floats(min_value=0.01, max_value=2.0**52, allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(firm_ids, st.sampled_from([2006, 2007, 2008]), amounts, amounts,
                          st.integers(1, 9), st.sampled_from(["C", "D", "D2891", "G", "O"])),
                unique_by=lambda t: (t[0], t[1])))
def test_balance_round_trip(rows):
    recs = [BalanceRecord(f, y, s, p, r, SectorCode.parse(sec)) for f, y, s, p, r, sec in rows]
    again, rej = parse_balance(lines(format_balance(recs)))
    assert rej == []
    assert again == recs


@given(st.lists(st.tuples(firm_ids, firm_ids, amounts).filter(lambda t: t[0] != t[1])))
def test_invoice_round_trip(rows):
    recs = [InvoiceRecord(s, c, a) for s, c, a in rows]
    again, rej = parse_invoices(lines(format_invoices(recs)))
    assert rej == []
    assert again == recs


@given(st.lists(st.one_of(
    st.just("F1,F2,2007,10"), st.just("F1,F1,2007,10"), st.just("F1,F2,2007,x"),
    st.just("F3,F2,2007,1e3"), st.just("F1,F2"),
)))
def test_count_conservation(rows):
    recs, rej = parse_invoices(lines(INV_HEAD + "".join(r + "\n" for r in rows)))
    assert len(recs) + len(rej) == len(rows)
