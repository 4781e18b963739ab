"""End-to-end analysis producing the JSON report and CSV/SVG side outputs."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .errors import InsufficientData, InvariantViolation, TcmeshError
from .growth import PERIODS, CagrPoint, GrowthPoint, build_scatter, cagr_points, scatter_stats
from .ingest import Dataset, format_rejections, load_dataset
from .network import (
    FilterResult,
    TradeNetwork,
    build_network,
    degree_counts,
    degree_sequences,
    filter_by_matching,
    key_customer,
    network_summary,
    size_degree_pairs,
    weak_components,
)
from .stats import (
    DEFAULT_DEGREE_CUTOFF,
    GROUPINGS,
    ccdf_points,
    fit_ccdf_slope,
    grouped_correlations,
    ols,
    pearson,
    size_degree_regression,
)
from .svg import PlotSpec, emit_svg_scatter

SCHEMA_VERSION = "1.0"


class EmptyResult(TcmeshError):
    reason = "empty-result"


@dataclass(frozen=True)
class ReportOptions:
    matching: tuple[float, float] = (0.8, 1.2)
    groupings: tuple[str, ...] = GROUPINGS
    degree_cutoff: float = DEFAULT_DEGREE_CUTOFF
    ccdf_window: tuple[int, int | None] = (1, DEFAULT_DEGREE_CUTOFF)
    missing_policy: str = "drop-renormalize"
    coverage_policy: str = "keep"
    key_denominator: str = "sales"
    sector_prefix: str | None = None
    strict: bool = False
    svg: bool = False
    workers: int | None = None


def jsonable(obj: Any) -> Any:
    """Dataclasses to dicts; non-finite floats to None (JSON has no inf)."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps(doc: Any) -> str:
    return json.dumps(jsonable(doc), indent=2, allow_nan=False) + "\n"


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return out.getvalue()


def growth_csv(points: Sequence[GrowthPoint]) -> str:
    return csv_text(
        ("supplier_id", "period", "predicted", "actual", "usable_weight_fraction"),
        ((p.supplier, str(p.period), p.predicted, p.actual, p.usable_weight_fraction) for p in points),
    )


def cagr_csv(points: Sequence[CagrPoint]) -> str:
    return csv_text(
        ("supplier_id", "predicted_cagr", "actual_cagr", "rating_class", "size_class", "sector"),
        ((p.supplier, p.predicted_cagr, p.actual_cagr, p.rating_class, p.size_class, p.sector) for p in points),
    )


def _attempt(fn, *args, **kwargs) -> Any:
    try:
        return jsonable(fn(*args, **kwargs))
    except TcmeshError as exc:
        return {"error": exc.reason, "detail": str(exc)}


def _line_fit(xs, ys) -> dict:
    try:
        slope, intercept = ols(xs, ys)
    except TcmeshError as exc:
        return {"error": exc.reason}
    try:
        r = pearson(xs, ys)
    except TcmeshError:
        r = None
    return {"slope": slope, "intercept": intercept, "pearson_r": r, "n": len(xs)}


def check_network_invariants(net: TradeNetwork) -> None:
    k_in, k_out = degree_sequences(net)
    n_links = len(net.edges)
    if sum(k_in.values()) != n_links or sum(k_out.values()) != n_links:
        raise InvariantViolation("degree sums differ from link count")
    total = math.fsum(net.edges.values())
    by_supplier = math.fsum(net.total_in(i) for i in net.suppliers)
    if not math.isclose(total, by_supplier, rel_tol=1e-12, abs_tol=0.0):
        raise InvariantViolation("supplier totals do not add up to total edge weight")


def load(balance_path, invoices_path, opts: ReportOptions) -> Dataset:
    return load_dataset(balance_path, invoices_path, strict=opts.strict, policy=opts.coverage_policy)


def prepare(dataset: Dataset, opts: ReportOptions) -> tuple[TradeNetwork, FilterResult]:
    net = build_network(dataset)
    check_network_invariants(net)
    lo, hi = opts.matching
    filt = filter_by_matching(net, lo, hi)
    return net, filt


def summary_section(net: TradeNetwork, filt: FilterResult) -> dict:
    comps = weak_components(filt.subnetwork)
    return {
        "full": jsonable(network_summary(net)),
        "filtered": jsonable(network_summary(filt.subnetwork)),
        "filtered_components": {"count": len(comps), "largest": comps[0] if comps else 0},
    }


def matching_section(filt: FilterResult) -> dict:
    return {
        "lo": filt.lo,
        "hi": filt.hi,
        "suppliers_total": len(filt.rows) + len(filt.excluded_missing_balance),
        "suppliers_missing_balance": len(filt.excluded_missing_balance),
        "retained": len(filt.retained),
    }


def matching_csv(filt: FilterResult) -> str:
    return csv_text(
        ("supplier_id", "total_invoiced", "sales_2007", "ratio", "in_range"),
        ((r.supplier, r.total_invoiced, r.sales_2007, r.ratio, int(bool(r.in_range))) for r in filt.rows),
    )


def degree_section(filt: FilterResult, opts: ReportOptions) -> tuple[dict, dict[str, str]]:
    k_in, k_out = degree_sequences(filt.subnetwork)
    files = {
        "in_degrees.csv": csv_text(("degree", "count"), degree_counts(k_in.values())),
        "out_degrees.csv": csv_text(("degree", "count"), degree_counts(k_out.values())),
    }
    section: dict[str, Any] = {}
    if k_in:
        ccdf = ccdf_points(k_in.values())
        files["ccdf.csv"] = csv_text(("k", "ccdf"), ccdf)
        k_min, k_max = opts.ccdf_window
        section["ccdf_fit"] = _attempt(fit_ccdf_slope, ccdf, k_min, k_max)
    else:
        section["ccdf_fit"] = {"error": "insufficient-data"}
    try:
        reg, bins = size_degree_regression(size_degree_pairs(filt.subnetwork), opts.degree_cutoff)
        section["size_regression"] = jsonable(reg)
        section["size_bins"] = jsonable(bins)
    except InsufficientData as exc:
        section["size_regression"] = {"error": exc.reason}
        section["size_bins"] = []
    return section, files


def key_customer_section(filt: FilterResult, opts: ReportOptions) -> dict:
    flags = [key_customer(filt.subnetwork, i, opts.key_denominator) for i in filt.retained]
    with_key = sum(f.has_key_customer for f in flags)
    return {"denominator": opts.key_denominator, "with": with_key, "without": len(flags) - with_key}


def growth_section(dataset: Dataset, filt: FilterResult, opts: ReportOptions) -> tuple[dict, dict[str, list[GrowthPoint]]]:
    section, scatters = {}, {}
    for period in PERIODS:
        pts, excluded = build_scatter(
            filt.subnetwork, dataset, filt.retained, period, opts.missing_policy, opts.workers
        )
        scatters[str(period)] = pts
        entry: dict[str, Any] = {"n_points": len(pts), "n_excluded": len(excluded)}
        if pts:
            stats = scatter_stats(pts)
            if sum(stats.quadrant_counts) != len(pts):
                raise InvariantViolation("quadrant counts do not partition the scatter")
            entry["scatter"] = jsonable(stats)
            entry["fit"] = _line_fit([p.predicted for p in pts], [p.actual for p in pts])
        section[str(period)] = entry
    return section, scatters


def cagr_section(dataset: Dataset, filt: FilterResult, opts: ReportOptions) -> tuple[dict, list[CagrPoint]]:
    chosen = filt.retained
    if opts.sector_prefix:
        chosen = [
            i for i in chosen
            if (rec := dataset.record(i, 2007)) is not None and rec.sector.startswith(opts.sector_prefix)
        ]
    points, excluded = cagr_points(filt.subnetwork, dataset, chosen, opts.missing_policy, opts.workers)
    tables = {}
    for g in opts.groupings:
        table = grouped_correlations(points, g)
        if sum(row.n for row in table.rows) != len(points):
            raise InvariantViolation("correlation groups do not partition the points")
        tables[g] = jsonable(table.rows)
    section = {
        "sector_prefix": opts.sector_prefix,
        "n_points": len(points),
        "n_excluded": len(excluded),
        "fit": _line_fit([p.predicted_cagr for p in points], [p.actual_cagr for p in points])
        if len(points) >= 2
        else {"error": "insufficient-data"},
        "correlations": tables,
    }
    return section, points


def build_report(dataset: Dataset, opts: ReportOptions, digests: dict[str, str] | None = None) -> tuple[dict, dict[str, str], dict[str, list]]:
    """Return (report document, CSV artifacts by file name, growth scatters)."""
    net, filt = prepare(dataset, opts)
    if not filt.retained:
        raise EmptyResult("no suppliers pass filter")
    rep = dataset.ingest_report
    degrees, files = degree_section(filt, opts)
    growth, scatters = growth_section(dataset, filt, opts)
    cagr, cpoints = cagr_section(dataset, filt, opts)
    files["matching.csv"] = matching_csv(filt)
    for name, pts in scatters.items():
        files[f"growth_{name}.csv"] = growth_csv(pts)
    files["cagr.csv"] = cagr_csv(cpoints)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "tcmesh", "version": __version__},
        "inputs": digests or {},
        "options": {
            "matching": list(opts.matching),
            "groupings": list(opts.groupings),
            "degree_cutoff": opts.degree_cutoff,
            "ccdf_window": list(opts.ccdf_window),
            "missing_policy": opts.missing_policy,
            "coverage_policy": opts.coverage_policy,
            "key_denominator": opts.key_denominator,
        },
        "ingest": {
            "balance_accepted": rep.balance_accepted,
            "balance_rejected": len(rep.balance_rejected),
            "invoice_accepted": rep.invoice_accepted,
            "invoice_rejected": len(rep.invoice_rejected),
            "invoices_dropped": rep.invoices_dropped,
            "invoices_flagged": len(rep.flagged),
        },
        "matching": matching_section(filt),
        "network": summary_section(net, filt),
        "degrees": degrees,
        "key_customers": key_customer_section(filt, opts),
        "growth": growth,
        "cagr": cagr,
    }
    return doc, files, scatters


def write_rejections(dataset: Dataset, out: Path) -> None:
    rep = dataset.ingest_report
    if rep.balance_rejected:
        (out / "balance.rejects.tsv").write_text(format_rejections(rep.balance_rejected), encoding="utf-8")
    if rep.invoice_rejected:
        (out / "invoices.rejects.tsv").write_text(format_rejections(rep.invoice_rejected), encoding="utf-8")


def run_report(balance_path, invoices_path, opts: ReportOptions, out_dir) -> dict:
    dataset = load(balance_path, invoices_path, opts)
    digests = {"balance_sha256": sha256_file(balance_path), "invoices_sha256": sha256_file(invoices_path)}
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_rejections(dataset, out)
    doc, files, scatters = build_report(dataset, opts, digests)
    for name, text in sorted(files.items()):
        (out / name).write_text(text, encoding="utf-8")
    if opts.svg:
        for name, pts in scatters.items():
            emit_svg_scatter(
                [(p.predicted, p.actual) for p in pts],
                PlotSpec(title=f"supplier growth {name}"),
                out / f"growth_{name}.svg",
            )
    (out / "report.json").write_text(dumps(doc), encoding="utf-8")
    return doc
