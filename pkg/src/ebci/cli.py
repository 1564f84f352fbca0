"""Command-line front end.

Subcommands
-----------
regress   interval for a regression function at a point from a CSV file
density   interval for a density at a point from a CSV file
simulate  Monte Carlo tables from a JSON config
radii     oracle EBCI and FLCI radii and their ratios
rates     length and coverage-error exponents of RBC and EBCI

Exit status is 0 on success, 1 on user error (bad flags, unreadable input,
invalid config) and 2 on a numerical or internal failure. Results go to
standard output and diagnostics to standard error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from . import baselines, intervals
from .lpreg import InsufficientLocalData, Sample
from .simharness import config as sim_config
from .simharness import emit, mc

__all__ = ["main", "build_parser", "UserError"]

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 1, 2
DEMO_FILES = {"regress": "demo_regression.csv", "density": "demo_density.csv"}


class UserError(Exception):
    """Bad input from the user; reported with exit status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UserError(f"{self.prog}: {message}")


class _Formatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _level(text):
    value = _positive_float(text)
    if value >= 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1): {text!r}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text!r}")
    return value


def _add_interval_flags(p, with_y: bool):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="CSV", help="headered CSV file ('-' for standard input)")
    src.add_argument("--demo", action="store_true", help="use the bundled demo dataset")
    p.add_argument("--x-col", default="x", help="covariate column name")
    if with_y:
        p.add_argument("--y-col", default="y", help="outcome column name")
    p.add_argument("--x0", type=float, default=0.0, help="evaluation point")
    p.add_argument("--order", type=_positive_int, required=True, metavar="S",
                   help="assumed smoothness order S (required)")
    p.add_argument("--alpha", type=_level, default=0.05, help="significance level")
    p.add_argument("--mode", choices=("eta-free", "fixed-eta"), default="eta-free", help="interval mode")
    p.add_argument("--eta", type=_positive_float, default=None, help="bias budget (fixed-eta mode only)")
    p.add_argument("--side", choices=intervals.SIDES, default="two", help="interval side")
    p.add_argument("--boundary", choices=intervals.BOUNDARY_FLAGS, default="auto",
                   help="interior or boundary treatment of x0")
    p.add_argument("--tau", type=_positive_float, default=0.001, help="eta-free inflation d_n = n**tau")
    p.add_argument("--policy", choices=("power", "loglog"), default="power",
                   help="eta-free inflation rule")
    p.add_argument("--kernel", choices=("epanechnikov", "triangular", "uniform"), default="epanechnikov",
                   help="kernel family")
    p.add_argument("--out", choices=("json", "csv"), default="json", help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ebci", description=__doc__, formatter_class=_Formatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("regress", help="regression interval at a point", formatter_class=_Formatter)
    _add_interval_flags(p, with_y=True)
    p.add_argument("--unified", action=argparse.BooleanOptionalAction, default=False,
                   help="calibrate two-sided interior eta-free intervals at t = alpha")

    p = sub.add_parser("density", help="density interval at a point", formatter_class=_Formatter)
    _add_interval_flags(p, with_y=False)

    p = sub.add_parser("simulate", help="Monte Carlo tables from a JSON config", formatter_class=_Formatter)
    p.add_argument("--config", required=True,
                   help="config file; bundled names such as table_reg_S3_int_normal.json also work")
    p.add_argument("--reps", type=_positive_int, default=None, help="override the replication count B")
    p.add_argument("--seed", type=int, default=None, help="override the seed")
    p.add_argument("--out", default="-", help="results file ('-' for standard output)")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv", help="results format")
    p.add_argument("--paper-table", action="store_true", help="group rows by delta (or x0) then n")
    p.add_argument("--reference", action="store_true",
                   help="join published RBC numbers into the pivoted markdown table")
    p.add_argument("--plots", default=None, metavar="DIR", help="write plot data (and PNGs) here")
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="worker processes (default: CPU count, capped by EBCI_THREADS)")

    p = sub.add_parser("radii", help="oracle EBCI and FLCI radii", formatter_class=_Formatter)
    p.add_argument("--alpha", type=_level, nargs="+", default=[0.05, 1e-4, 1e-8], help="levels")
    p.add_argument("--eta", type=_positive_float, default=1.0, help="bias budget")
    p.add_argument("--cv", type=_positive_float, default=1.2, help="variance constant C_V")
    p.add_argument("--n", type=_positive_int, default=1000, help="sample size")
    p.add_argument("--order", type=_positive_int, default=3, metavar="S", help="smoothness order")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv", help="table format")

    p = sub.add_parser("rates", help="rate exponents of RBC and EBCI", formatter_class=_Formatter)
    p.add_argument("--p", type=_positive_int, nargs="+", default=[1, 2, 3], help="local polynomial orders")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv", help="table format")
    return parser


def _read_csv(args, columns):
    if args.demo:
        text = resources.files("ebci.data").joinpath(DEMO_FILES[args.command]).read_text("utf-8")
    elif args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(args.input).read_text("utf-8")
        except OSError as exc:
            raise UserError(f"cannot read {args.input}: {exc.strerror}") from None
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise UserError("input CSV is empty") from None
    missing = [c for c in columns if c not in header]
    if missing:
        raise UserError(f"column(s) {missing} not in CSV header {header}")
    pos = [header.index(c) for c in columns]
    values = []
    for row in reader:
        if not row:
            continue
        try:
            values.append([float(row[i]) for i in pos])
        except (ValueError, IndexError):
            raise UserError(f"line {reader.line_num}: cannot parse {row!r}") from None
    if not values:
        raise UserError("input CSV has no data rows")
    arr = np.asarray(values)
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(arr), axis=1))[0]) + 2
        raise UserError(f"line {bad}: non-finite value")
    return arr


def _interval_output(result, fmt):
    data = result.to_dict()
    data = {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in data.items()}
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(data))
    writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in data.values()])
    return buf.getvalue()


def _check_mode(args):
    if args.mode == "fixed-eta" and args.eta is None:
        raise UserError("--eta is required with --mode fixed-eta")
    if args.mode == "eta-free" and args.eta is not None:
        raise UserError("--eta only applies to --mode fixed-eta")


def cmd_regress(args, out):
    _check_mode(args)
    data = _read_csv(args, [args.x_col, args.y_col])
    sample = Sample(data[:, 0], data[:, 1])
    common = dict(x0=args.x0, S=args.order, alpha=args.alpha, side=args.side,
                  boundary=args.boundary, kernel=args.kernel)
    if args.mode == "fixed-eta":
        result = intervals.ebci_regression_fixed_eta(sample, eta=args.eta, **common)
    else:
        policy = intervals.EtaFreePolicy(args.policy, args.tau)
        result = intervals.ebci_regression_eta_free(
            sample, policy=policy, unified_calibration=args.unified, **common
        )
    out.write(_interval_output(result, args.out))


def cmd_density(args, out):
    _check_mode(args)
    xs = _read_csv(args, [args.x_col])[:, 0]
    common = dict(x0=args.x0, S=args.order, alpha=args.alpha, side=args.side,
                  boundary=args.boundary, kernel=args.kernel)
    if args.mode == "fixed-eta":
        result = intervals.ebci_density_fixed_eta(xs, eta=args.eta, **common)
    else:
        policy = intervals.EtaFreePolicy(args.policy, args.tau)
        result = intervals.ebci_density_eta_free(xs, policy=policy, **common)
    out.write(_interval_output(result, args.out))


def _summary_line(s):
    c = s.config
    lead = f"delta={c.delta:g}" if c.dgp == "cusp" else f"x0={c.x0:g}"
    flag = "" if s.valid else " INVALID"
    return (f"{c.dgp} {lead} n={c.n} {c.method} side={c.side}: coverage={s.coverage:.4f} "
            f"width={s.mean_width:.4f} bias={s.mean_bias:.4f} h={s.mean_h:.4f} "
            f"B={s.B_effective} failures={s.failures}{flag}")


def cmd_simulate(args, out):
    try:
        configs = sim_config.load_config(args.config, reps=args.reps, seed=args.seed)
    except FileNotFoundError as exc:
        raise UserError(str(exc)) from None
    except sim_config.ConfigError as exc:
        raise UserError(f"invalid config {args.config}: {exc}") from None
    to_file = args.out != "-"
    log = out if to_file else sys.stderr
    summaries = []
    for cfg in configs:
        summary = mc.run_mc(cfg, workers=args.workers)
        summaries.append(summary)
        print(_summary_line(summary), file=log, flush=True)
    reference = None
    if args.reference:
        reference = emit.reference_for(summaries, emit.load_reference(method="rbc"))
    payload = emit.emit_results(summaries, args.format, paper_table=args.paper_table, reference=reference)
    if to_file:
        Path(args.out).write_bytes(payload)
    else:
        out.write(payload.decode("utf-8"))
    if args.plots:
        if len({c.n for c in configs}) >= 2:
            for kind in ("coverage_vs_n", "width_vs_n"):
                emit.emit_plot(summaries, kind, args.plots)
        else:
            print("plots skipped: fewer than two sample sizes", file=sys.stderr)


def _table(header, rows, fmt):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


_RADII_COLUMNS = ("alpha", "S", "r_eb_one", "r_flci_one", "ratio_one",
                  "r_eb_two", "r_flci_two", "ratio_two", "r_flci_two_leading", "ratio_two_leading")


def cmd_radii(args, out):
    report = baselines.radius_equivalence_report(args.eta, args.cv, args.n, args.order, args.alpha)
    rows = [[repr(getattr(r, c)) if isinstance(getattr(r, c), float) else str(getattr(r, c))
             for c in _RADII_COLUMNS] for r in report]
    out.write(_table(_RADII_COLUMNS, rows, args.format))


_RATE_COLUMNS = ("point", "estimand", "parity", "p", "smoothness", "rbc_length_exp", "rbc_ce_exp",
                 "ebci_length_exp", "ebci_ce_exp", "ebci_ce_note", "applicable")


def cmd_rates(args, out):
    rows = [[str(getattr(r, c)) for c in _RATE_COLUMNS] for r in baselines.rate_table(args.p)]
    out.write(_table(_RATE_COLUMNS, rows, args.format))


COMMANDS = {"regress": cmd_regress, "density": cmd_density, "simulate": cmd_simulate,
            "radii": cmd_radii, "rates": cmd_rates}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UserError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USER
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, cat, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            COMMANDS[args.command](args, out)
    except UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except (InsufficientLocalData, intervals.EmptyWindowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except Exception as exc:  # numerical or internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
