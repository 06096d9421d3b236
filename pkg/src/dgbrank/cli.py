"""Command-line front end: ``dgbrank fit | correlate | compare | simulate``.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 a stratum did not
converge.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .analysis import correlate_fits
from .data import build_series, group_strata, load_csv, required_columns
from .dgb_core import DgbParams
from .estimation import FitConfig, FitResult, fit_mle
from .exceptions import (
    ComparisonError,
    DgbError,
    NonConvergenceError,
    SeriesValidationError,
    StratumTooSmallError,
)
from .reports import (
    COMPARE_COLUMNS,
    COMPARE_SCHEMA,
    CORRELATION_COLUMNS,
    CORRELATION_SCHEMA,
    FIT_COLUMNS,
    FIT_SCHEMA,
    read_report,
    write_report,
)
from .series import check_indicator
from .synth import exact_series, sampled_series
from .uncertainty import UncertaintyRecord, up_delta

log = logging.getLogger("dgbrank")

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_NONCONVERGED = 0, 1, 2, 3

UP_BASES = {"e": math.e, "2": 2.0}


class UsageError(DgbError):
    pass


def _stem(*parts):
    return "_".join(str(p).replace(":", "-").replace("/", "-") for p in parts)


# ---------------------------------------------------------------- fit

def _fit_job(job):
    series, config = job
    try:
        return "ok", fit_mle(series, config), ""
    except NonConvergenceError as err:
        return "nonconverged", err.best, str(err)
    except StratumTooSmallError as err:
        return "excluded", None, err.reason


def _fit_row(stratum, indicator, year, n, pooled, status, fit=None, reason=""):
    row = dict(stratum=stratum, indicator=indicator, year=year, n=n, status=status,
               reason=reason, pooled=pooled)
    if fit is not None:
        row.update(a=fit.params.a, b=fit.params.b, ks=fit.ks, entropy=fit.entropy, up=fit.up,
                   log_likelihood=fit.log_likelihood, converged=fit.converged,
                   iterations=fit.iterations, restarts_used=fit.restarts_used,
                   method=fit.method)
    return row


def run_fit(records, indicator, year, config, pool_label="ALL", jobs=1):
    """Fit every stratum of one year; return report rows in deterministic order."""
    datasets = group_strata(records, year, config.min_units, pool_label)
    rows, jobs_in, slots = [], [], []
    for ds in datasets:
        if not ds.included:
            rows.append(_fit_row(ds.stratum_id, indicator, year, len(ds.units), ds.pooled,
                                 "excluded", reason=ds.exclusion_reason))
            continue
        try:
            series = build_series(ds, indicator)
        except SeriesValidationError as err:
            rows.append(_fit_row(ds.stratum_id, indicator, year, len(ds.units), ds.pooled,
                                 "excluded", reason=str(err)))
            continue
        rows.append(None)
        slots.append((len(rows) - 1, ds, series))
        jobs_in.append((series, config))
    if jobs > 1 and len(jobs_in) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_fit_job, jobs_in))
    else:
        outcomes = [_fit_job(j) for j in jobs_in]
    for (i, ds, series), (status, fit, reason) in zip(slots, outcomes):
        rows[i] = _fit_row(ds.stratum_id, indicator, year, series.n, ds.pooled,
                           status, fit, reason)
    return rows


def cmd_fit(args):
    load = load_csv(args.input)
    for err in load.rejects:
        print(f"{args.input}: {err}", file=sys.stderr)
    for w in load.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(load.summary(), file=sys.stderr)
    if args.strict and load.rejects:
        raise UsageError(f"{len(load.rejects)} row(s) rejected (--strict)")
    years = sorted({r.year for r in load.records})
    if args.year is None:
        if len(years) != 1:
            raise UsageError(f"input holds years {years}; choose one with --year")
        year = years[0]
    else:
        year = args.year
        if year not in years:
            raise UsageError(f"no records for year {year} (found {years})")
    indicators = args.indicator or ["population"]
    for ind in indicators:
        check_indicator(ind)
        missing = [c for c in required_columns(ind) if c not in load.columns]
        if missing:
            raise UsageError(f"indicator {ind} needs column(s) {', '.join(missing)}")
    config = FitConfig(min_units=args.min_units, up_base=UP_BASES[args.up_base])
    pool_label = None if args.no_pool else args.pool_label
    code = EXIT_OK
    for ind in indicators:
        rows = run_fit(load.records, ind, year, config, pool_label, args.jobs)
        if not any(r["status"] != "excluded" for r in rows):
            raise UsageError(f"{ind}: no stratum has at least {args.min_units} units")
        meta = {"schema": FIT_SCHEMA, "indicator": ind, "year": year,
                "min_units": args.min_units, "up_base": args.up_base,
                "source": Path(args.input).name, "rows_read": load.rows_read,
                "rows_rejected": len(load.rejects)}
        paths = write_report(args.out_dir, _stem("fit", ind, year), meta, rows,
                             FIT_COLUMNS, args.format)
        _print_fit_table(rows)
        for p in paths:
            print(f"wrote {p}", file=sys.stderr)
        if any(r["status"] == "nonconverged" for r in rows):
            code = EXIT_NONCONVERGED
    return code


def _print_fit_table(rows):
    print(f"{'stratum':<24}{'N':>5}{'a':>9}{'b':>9}{'KS':>8}{'UP':>8}  status")
    for r in rows:
        if r["status"] == "excluded":
            print(f"{r['stratum']:<24}{r['n']:>5}{'':>34}  excluded: {r['reason']}")
        else:
            print(f"{r['stratum']:<24}{r['n']:>5}{r['a']:>9.3f}{r['b']:>9.3f}"
                  f"{r['ks']:>8.3f}{r['up']:>8.2f}  {r['status']}")


# ---------------------------------------------------------- correlate

def _fit_from_row(row):
    return FitResult(params=DgbParams(row["a"], row["b"], row["n"]),
                     log_likelihood=row["log_likelihood"], ks=row["ks"],
                     entropy=row["entropy"], up=row["up"], converged=bool(row["converged"]),
                     iterations=row["iterations"] or 0,
                     restarts_used=row["restarts_used"] or 0,
                     method=row["method"] or "")


def _usable(rows):
    return [r for r in rows if r["status"] == "ok" and not r["pooled"]]


def cmd_correlate(args):
    fits, labels, years = {}, [], set()
    for path in args.input:
        _, rows = read_report(path, FIT_SCHEMA)
        if not rows:
            raise UsageError(f"{path}: report has no rows")
        label = rows[0]["indicator"]
        k = 2
        base = label
        while label in labels:
            label = f"{base}#{k}"
            k += 1
        labels.append(label)
        for r in _usable(rows):
            years.add(r["year"])
            fits[(r["stratum"], label)] = _fit_from_row(r)
    if len(labels) < 2:
        raise UsageError("correlate needs at least two fit reports")
    if args.year is not None:
        if years - {args.year}:
            raise UsageError(f"reports cover years {sorted(years)}, not only {args.year}")
        year = args.year
    elif len(years) == 1:
        year = years.pop()
    else:
        raise UsageError(f"reports cover years {sorted(years)}; pass --year or align inputs")
    report = correlate_fits(fits, year)
    rows = [dict(year=report.year, left=r.left, right=r.right, statistic=r.statistic,
                 coefficient=r.coefficient, t=r.t, significant_95=r.significant_95,
                 n_strata=r.n_strata, slope=r.slope, intercept=r.intercept)
            for r in report.rows]
    meta = {"schema": CORRELATION_SCHEMA, "year": year, "indicators": labels,
            "strata": list(report.strata)}
    paths = write_report(args.out_dir, _stem("correlate", *labels, year), meta, rows,
                         CORRELATION_COLUMNS, args.format)
    print(f"{'left':<20}{'right':<20}{'statistic':<10}{'r':>8}  sig95")
    for r in rows:
        print(f"{r['left']:<20}{r['right']:<20}{r['statistic']:<10}"
              f"{r['coefficient']:>8.3f}  {'yes' if r['significant_95'] else 'no'}")
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


# ------------------------------------------------------------ compare

def compare_rows(rows_1, rows_2):
    """Per-stratum changes between two fit reports, largest |delta UP| first."""
    first = {(r["stratum"], r["indicator"]): r for r in _ok(rows_1)}
    out = []
    for r2 in _ok(rows_2):
        key = (r2["stratum"], r2["indicator"])
        r1 = first.get(key)
        if r1 is None:
            continue
        rec1 = UncertaintyRecord(r1["stratum"], r1["indicator"], r1["year"], r1["n"],
                                 r1["entropy"], r1["up"])
        rec2 = UncertaintyRecord(r2["stratum"], r2["indicator"], r2["year"], r2["n"],
                                 r2["entropy"], r2["up"])
        out.append(dict(stratum=key[0], indicator=key[1], year_1=r1["year"],
                        year_2=r2["year"], n_1=r1["n"], n_2=r2["n"],
                        a_1=r1["a"], a_2=r2["a"], b_1=r1["b"], b_2=r2["b"],
                        up_1=r1["up"], up_2=r2["up"],
                        delta_a=r2["a"] - r1["a"], delta_b=r2["b"] - r1["b"],
                        delta_up=up_delta(rec1, rec2)))
    if not out:
        raise ComparisonError("the two reports share no converged stratum and indicator")
    out.sort(key=lambda r: (-abs(r["delta_up"]), r["stratum"], r["indicator"]))
    return out


def _ok(rows):
    return [r for r in rows if r["status"] == "ok"]


def cmd_compare(args):
    meta_1, rows_1 = read_report(args.report_t1, FIT_SCHEMA)
    meta_2, rows_2 = read_report(args.report_t2, FIT_SCHEMA)
    if meta_1.get("up_base") and meta_2.get("up_base") and meta_1["up_base"] != meta_2["up_base"]:
        raise ComparisonError("reports use different UP denominator bases")
    rows = compare_rows(rows_1, rows_2)
    years = (rows[0]["year_1"], rows[0]["year_2"])
    indicators = sorted({r["indicator"] for r in rows})
    meta = {"schema": COMPARE_SCHEMA, "indicators": indicators,
            "year_1": years[0], "year_2": years[1]}
    paths = write_report(args.out_dir, _stem("compare", *indicators, *years), meta, rows,
                         COMPARE_COLUMNS, args.format)
    print(f"{'stratum':<24}{'indicator':<12}{'d_a':>9}{'d_b':>9}{'d_UP':>8}")
    for r in rows:
        print(f"{r['stratum']:<24}{r['indicator']:<12}{r['delta_a']:>9.3f}"
              f"{r['delta_b']:>9.3f}{r['delta_up']:>8.2f}")
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


# ----------------------------------------------------------- simulate

def cmd_simulate(args):
    if args.exact:
        series = exact_series(args.a, args.b, args.n, args.total, args.stratum, args.year)
    else:
        series = sampled_series(args.a, args.b, args.n, args.draws, args.seed,
                                args.stratum, args.year)
    if args.output:
        out = Path(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
    else:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        kind = "exact" if args.exact else f"draws{args.draws}_seed{args.seed}"
        out = Path(args.out_dir) / f"{_stem('simulate', args.a, args.b, args.n, kind)}.csv"
    lines = ["state,district,year,rank,size"]
    for unit, rank, size in series.entries:
        lines.append(f"{series.stratum_id},{unit},{series.year},{rank},{size!r}")
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} (fit it with --indicator custom:size)", file=sys.stderr)
    return EXIT_OK


# --------------------------------------------------------------- main

def _add_output(p):
    p.add_argument("--out-dir", default=".", help="directory for report files")
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dgbrank",
        description="Fit DGB rank-order distributions to stratified rank-size data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit every stratum of a census-style CSV")
    p.add_argument("--input", required=True, help="unit-level CSV")
    p.add_argument("--indicator", action="append",
                   help="population|lr|wpr|sr-lr|sr-wpr|custom:<column> (repeatable)")
    p.add_argument("--year", type=int)
    p.add_argument("--min-units", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--up-base", choices=sorted(UP_BASES), default="e",
                   help="log base of the log N denominator of UP (entropy stays in nats)")
    p.add_argument("--pool-label", default="ALL",
                   help="name of the stratum pooling all units (default ALL)")
    p.add_argument("--no-pool", action="store_true", help="skip the pooled stratum")
    p.add_argument("--strict", action="store_true", help="fail if any input row is rejected")
    _add_output(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("correlate", help="correlate fitted parameters and UP across strata")
    p.add_argument("--input", nargs="+", required=True, help="fit reports (CSV or JSON)")
    p.add_argument("--year", type=int)
    _add_output(p)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("compare", help="per-stratum changes between two fit reports")
    p.add_argument("report_t1")
    p.add_argument("report_t2")
    _add_output(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="write a synthetic series usable by 'fit'")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--draws", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="sizes proportional to the pmf")
    p.add_argument("--total", type=float, default=1e6, help="total size with --exact")
    p.add_argument("--year", type=int, default=0)
    p.add_argument("--stratum", default="SIM")
    p.add_argument("--output", help="output file (default: derived name in --out-dir)")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO
    except DgbError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
