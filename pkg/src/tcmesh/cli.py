"""Command-line entry point.

Exit codes: 0 success, 2 input error, 3 empty result, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .errors import InvariantViolation, ParseError
from .growth import default_workers
from .report import (
    EmptyResult,
    ReportOptions,
    degree_section,
    dumps,
    growth_section,
    key_customer_section,
    load,
    matching_csv,
    matching_section,
    prepare,
    run_report,
    summary_section,
    cagr_section,
    cagr_csv,
    growth_csv,
    write_rejections,
)
from .stats import GROUPINGS
from .svg import PlotSpec, emit_svg_scatter
from .synth import SynthConfig, generate, write_dataset

log = logging.getLogger("tcmesh")

EXIT_INPUT, EXIT_EMPTY, EXIT_INVARIANT = 2, 3, 4
GROUP_ALIASES = {"rating": "rating", "size": "rating-size", "rating-size": "rating-size", "sector": "sector"}


def _range(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("expected lo:hi")
    return float(lo), (math.inf if hi.strip() in ("", "inf") else float(hi))


def _window(text: str) -> tuple[int, int | None]:
    lo, _, hi = text.partition(":")
    return int(lo), (None if hi.strip() in ("", "inf") else int(hi))


def _groups(text: str) -> tuple[str, ...]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok not in GROUP_ALIASES:
            raise argparse.ArgumentTypeError(f"unknown grouping {tok!r}; choose from {sorted(GROUP_ALIASES)}")
        if GROUP_ALIASES[tok] not in out:
            out.append(GROUP_ALIASES[tok])
    return tuple(out)


def _beta(text: str):
    if "=" not in text:
        return float(text)
    pairs = dict(part.split("=", 1) for part in text.split(","))
    return {k.strip(): float(v) for k, v in pairs.items()}


def _pair(text: str) -> tuple[float, float]:
    a, b = text.split(",")
    return float(a), float(b)


def _add_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--balance", required=True, type=Path)
    p.add_argument("--invoices", required=True, type=Path)
    p.add_argument("--matching", type=_range, default=(0.8, 1.2), help="lo:hi, exclusive bounds")
    p.add_argument("--strict", action="store_true", help="abort on the first malformed row")
    p.add_argument("--policy", choices=("keep", "drop"), default="keep", help="customer coverage policy")
    p.add_argument("--missing", choices=("drop-renormalize", "fail"), default="drop-renormalize")
    p.add_argument("--out", type=Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tcmesh", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tcmesh {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic planted-contagion dataset")
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--n-suppliers", type=int, default=500)
    g.add_argument("--degree-exponent", type=float, default=2.3)
    g.add_argument("--weight-tail", type=float, default=1.5)
    g.add_argument("--beta", type=_beta, default=1.0, help="scalar or A=..,B=..,C=..")
    g.add_argument("--mu", type=_pair, default=(0.0, 0.0), help="drift per period, e.g. 0.05,-0.05")
    g.add_argument("--sigma-supplier", type=float, default=0.0)
    g.add_argument("--sigma-customer", type=float, default=0.1)
    g.add_argument("--coverage-min", type=float, default=1.0)
    g.add_argument("--matching", type=_range, default=(0.8, 1.2))

    for name, help_ in (
        ("summary", "network statistics"),
        ("matching", "matching ratios and filter yield"),
        ("degrees", "degree distributions, CCDF fit and size regression"),
        ("growth", "actual vs predicted growth scatters"),
        ("cagr", "two-period compound growth points"),
        ("correlations", "stratified CAGR correlations"),
        ("report", "all analyses in one JSON report"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_inputs(p)
        p.add_argument("--group", type=_groups, default=GROUPINGS)
        p.add_argument("--sector", default=None, help="restrict CAGR suppliers to a sector prefix, e.g. D28")
        p.add_argument("--cutoff", type=float, default=150.0, help="in-degree cutoff for the size regression")
        p.add_argument("--ccdf-window", type=_window, default=(1, 150))
        p.add_argument("--key-denominator", choices=("sales", "invoices"), default="sales")
        p.add_argument("--svg", action="store_true")
    return parser


def _options(args) -> ReportOptions:
    return ReportOptions(
        matching=args.matching,
        groupings=args.group,
        degree_cutoff=args.cutoff,
        ccdf_window=args.ccdf_window,
        missing_policy=args.missing,
        coverage_policy=args.policy,
        key_denominator=args.key_denominator,
        sector_prefix=args.sector,
        strict=args.strict,
        svg=args.svg,
        workers=default_workers(),
    )


def _write(out: Path | None, files: dict[str, str]) -> None:
    if out is None:
        return
    out.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(files.items()):
        (out / name).write_text(text, encoding="utf-8")


def cmd_generate(args) -> dict:
    lo, hi = args.matching
    config = SynthConfig(
        n_suppliers=args.n_suppliers,
        degree_exponent=args.degree_exponent,
        weight_tail_exponent=args.weight_tail,
        matching_range=(lo, hi),
        coverage_min=args.coverage_min,
        beta=args.beta,
        mu=args.mu,
        sigma_supplier=args.sigma_supplier,
        sigma_customer=args.sigma_customer,
        seed=args.seed,
    )
    dataset, truth = generate(config)
    paths = write_dataset(dataset, truth, args.out, config)
    return {name: str(p) for name, p in paths.items()}


def cmd_analysis(args) -> dict:
    opts = _options(args)
    if args.command == "report":
        if args.out is None:
            raise SystemExit("report requires --out")
        return run_report(args.balance, args.invoices, opts, args.out)
    dataset = load(args.balance, args.invoices, opts)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        write_rejections(dataset, args.out)
    net, filt = prepare(dataset, opts)
    if args.command == "summary":
        return summary_section(net, filt)
    if args.command == "matching":
        _write(args.out, {"matching.csv": matching_csv(filt)})
        doc = matching_section(filt)
        if not filt.retained:
            raise EmptyResult("no suppliers pass filter")
        return doc
    if not filt.retained:
        raise EmptyResult("no suppliers pass filter")
    if args.command == "degrees":
        section, files = degree_section(filt, opts)
        section["key_customers"] = key_customer_section(filt, opts)
        _write(args.out, files)
        return section
    if args.command == "growth":
        section, scatters = growth_section(dataset, filt, opts)
        _write(args.out, {f"growth_{k}.csv": growth_csv(v) for k, v in scatters.items()})
        if args.svg and args.out is not None:
            for k, pts in scatters.items():
                emit_svg_scatter([(p.predicted, p.actual) for p in pts], PlotSpec(title=f"supplier growth {k}"), args.out / f"growth_{k}.svg")
        return section
    section, points = cagr_section(dataset, filt, opts)
    if args.command == "cagr":
        _write(args.out, {"cagr.csv": cagr_csv(points)})
        section.pop("correlations")
        return section
    return section["correlations"]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        doc = cmd_generate(args) if args.command == "generate" else cmd_analysis(args)
    except (ParseError, FileNotFoundError, IsADirectoryError) as exc:
        line = getattr(exc, "line_no", None)
        if line is not None:
            print(f"{line}\t{exc.reason}", file=sys.stderr)
        print(f"tcmesh: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptyResult as exc:
        print(f"tcmesh: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except InvariantViolation as exc:
        print(f"tcmesh: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    sys.stdout.write(dumps(doc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
