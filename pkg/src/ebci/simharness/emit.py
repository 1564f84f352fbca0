"""CSV, markdown and plot-data emission of Monte Carlo summaries."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields
from importlib import resources
from pathlib import Path

from .mc import SimSummary

__all__ = [
    "ResultRow",
    "COLUMNS",
    "to_row",
    "emit_results",
    "parse_results",
    "reference_key",
    "load_reference",
    "reference_for",
    "ReferenceRecord",
    "PlotData",
    "plot_data",
    "emit_plot",
]

COLUMNS = ("dgp", "x0", "delta", "n", "method", "side", "alpha", "h", "coverage", "width", "bias", "B")
_INT_COLUMNS = {"n", "B"}
_STR_COLUMNS = {"dgp", "method", "side"}
_OPTIONAL = {"delta"}
METHOD_LABELS = {
    "ebci_eta_free": "EBCI",
    "ebci_fixed_eta": "EBCI (fixed eta)",
    "snc": "SNC",
    "flci_oracle": "FLCI oracle",
    "rbc": "RBC CE-DPI",
}


@dataclass(frozen=True)
class ResultRow:
    """One emitted line; ``delta`` is None for DGPs without a cusp."""

    dgp: str
    x0: float
    delta: float | None
    n: int
    method: str
    side: str
    alpha: float
    h: float
    coverage: float
    width: float
    bias: float
    B: int


def to_row(summary: SimSummary | ResultRow) -> ResultRow:
    if isinstance(summary, ResultRow):
        return summary
    c = summary.config
    return ResultRow(
        dgp=c.dgp,
        x0=float(c.x0),
        delta=float(c.delta) if c.dgp == "cusp" else None,
        n=int(c.n),
        method=c.method,
        side=c.side,
        alpha=float(c.alpha),
        h=summary.mean_h,
        coverage=summary.coverage,
        width=summary.mean_width,
        bias=summary.mean_bias,
        B=summary.B_effective,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(name, text):
    if name in _STR_COLUMNS:
        return text
    if name in _OPTIONAL and text == "":
        return None
    if name in _INT_COLUMNS:
        return int(text)
    return float(text)


def _paper_sorted(rows):
    def key(r):
        delta = -math.inf if r.delta is None else r.delta
        return (r.dgp, r.side, r.x0, delta, r.n)

    order = {m: i for i, m in enumerate(dict.fromkeys(r.method for r in rows))}
    return sorted(rows, key=lambda r: (key(r), order[r.method]))


def _csv_bytes(rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow([_fmt(v) for v in astuple(r)])
    return buf.getvalue().encode("utf-8")


def _num(v, digits=3):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return f"{v:.{digits}f}"


def _markdown_flat(rows) -> str:
    lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
    for r in rows:
        lines.append("| " + " | ".join(_fmt(v) for v in astuple(r)) + " |")
    return "\n".join(lines) + "\n"


def _markdown_pivot(rows, reference) -> str:
    """Pivot into one line per (group, delta or x0, n) with h/Cov./Width/Bias per method."""
    methods = list(dict.fromkeys(r.method for r in rows))
    ref_map = reference or {}
    if ref_map:
        methods = ["rbc"] + methods
    cells = {}
    for r in rows:
        lead = r.delta if r.delta is not None else r.x0
        cells.setdefault((r.dgp, r.side, lead, r.n), {})[r.method] = r
    lead_name = "delta" if any(r.delta is not None for r in rows) else "x0"
    header = [lead_name, "n"]
    for m in methods:
        label = METHOD_LABELS.get(m, m)
        header += [f"{label} h", f"{label} Cov.", f"{label} Width", f"{label} Bias"]
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    previous = None
    for (dgp, side, lead, n) in sorted(cells, key=lambda k: (k[0], k[1], k[2], k[3])):
        group = cells[(dgp, side, lead, n)]
        line = ["" if lead == previous else _fmt(lead), str(n)]
        previous = lead
        for m in methods:
            if m == "rbc":
                rec = ref_map.get(((dgp, lead), n))
            else:
                rec = group.get(m)
            if rec is None:
                line += ["", "", "", ""]
            else:
                line += [_num(rec.h), _num(rec.coverage), _num(rec.width), _num(rec.bias)]
        lines.append("| " + " | ".join(line) + " |")
    return "\n".join(lines) + "\n"


def emit_results(summaries, format: str = "csv", paper_table: bool = False, reference=None) -> bytes:
    """Serialise summaries.

    Parameters
    ----------
    summaries : sequence of SimSummary or ResultRow
    format : {"csv", "markdown"}
        CSV uses LF line endings and shortest round-trip float formatting.
    paper_table : bool
        Order rows by delta (or x0) then n. In markdown, pivot methods into
        column groups of h, Cov., Width and Bias.
    reference : dict, optional
        Published comparison rows keyed by ``((dgp, delta_or_x0), n)``, as
        returned by :func:`reference_for`; joined as an extra column group.
    """
    rows = [to_row(s) for s in summaries]
    if not rows:
        raise ValueError("nothing to emit")
    if paper_table:
        rows = _paper_sorted(rows)
    if format == "csv":
        return _csv_bytes(rows)
    if format == "markdown":
        text = _markdown_pivot(rows, reference) if paper_table else _markdown_flat(rows)
        return text.encode("utf-8")
    raise ValueError(f"format must be 'csv' or 'markdown', got {format!r}")


def parse_results(data: bytes | str) -> list[ResultRow]:
    """Inverse of ``emit_results(..., format="csv")``."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    reader = csv.reader(io.StringIO(data, newline=""))
    header = next(reader)
    if tuple(header) != COLUMNS:
        raise ValueError(f"unexpected header {header!r}")
    names = [f.name for f in fields(ResultRow)]
    return [ResultRow(**{k: _parse(k, v) for k, v in zip(names, line)}) for line in reader if line]


def reference_key(config) -> str | None:
    """Name of the published table matching a simulation cell, if any."""
    if config.dgp == "cusp" and config.S == 3:
        point = "int" if config.support == "interior" else "bdy"
        errors = "normal" if config.error_kind == "normal" else "skewed"
        return f"reg_S3_{point}_{errors}"
    if config.dgp == "ccf":
        return "ccf_paper_bdy" if abs(config.x0) >= 1.0 else "ccf_paper"
    return None


@dataclass(frozen=True)
class ReferenceRecord:
    table: str
    lead: float
    n: int
    method: str
    h: float
    coverage: float
    width: float
    bias: float


def load_reference(path=None, method: str | None = None) -> list[ReferenceRecord]:
    """Read published comparison numbers (bundled by default)."""
    if path is None:
        text = resources.files("ebci.data").joinpath("reference_tables.csv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        if method is not None and rec["method"] != method:
            continue
        out.append(
            ReferenceRecord(
                table=rec["table"], lead=float(rec["lead"]), n=int(rec["n"]), method=rec["method"],
                h=float(rec["h"]), coverage=float(rec["coverage"]), width=float(rec["width"]),
                bias=float(rec["bias"]),
            )
        )
    return out


def reference_for(summaries, records, method: str = "rbc") -> dict:
    """Map reference rows onto the ``((dgp, lead), n)`` keys of the summaries."""
    wanted = {}
    for s in summaries:
        if isinstance(s, ResultRow):
            continue
        key = reference_key(s.config)
        row = to_row(s)
        lead = row.delta if row.delta is not None else row.x0
        wanted[(key, lead, row.n)] = ((row.dgp, lead), row.n)
    out = {}
    for rec in records:
        target = wanted.get((rec.table, rec.lead, rec.n))
        if target is not None and rec.method == method:
            out[target] = rec
    return out


@dataclass(frozen=True)
class PlotData:
    kind: str
    series: dict
    nominal: float | None
    sidecar: bytes


_PLOT_VALUE = {"coverage_vs_n": "coverage", "width_vs_n": "width"}


def plot_data(summaries, kind: str) -> PlotData:
    """Group rows into one series per (method, delta, x0) ordered by n."""
    if kind not in _PLOT_VALUE:
        raise ValueError(f"kind must be one of {tuple(_PLOT_VALUE)}, got {kind!r}")
    rows = [to_row(s) for s in summaries]
    if len({r.n for r in rows}) < 2:
        raise ValueError("a plot against n needs at least two sample sizes")
    column = _PLOT_VALUE[kind]
    series = {}
    for r in sorted(rows, key=lambda r: r.n):
        series.setdefault((r.method, r.delta, r.x0), []).append((r.n, getattr(r, column)))
    alphas = {r.alpha for r in rows}
    nominal = 1.0 - alphas.pop() if kind == "coverage_vs_n" and len(alphas) == 1 else None
    cols = ("method", "delta", "x0", "n", column)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_fmt(getattr(r, c)) for c in cols])
    return PlotData(kind=kind, series=series, nominal=nominal, sidecar=buf.getvalue().encode("utf-8"))


def emit_plot(summaries, kind: str, out_dir, render: bool = True) -> list[Path]:
    """Write ``<kind>.csv`` plot data and, when matplotlib is available, ``<kind>.png``."""
    data = plot_data(summaries, kind)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [out_dir / f"{kind}.csv"]
    written[0].write_bytes(data.sidecar)
    if not render:
        return written
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return written
    fig, ax = plt.subplots(figsize=(6, 4))
    for (method, delta, x0), pts in data.series.items():
        label = METHOD_LABELS.get(method, method)
        label += f", delta={delta:g}" if delta is not None else f", x0={x0:g}"
        ns, vals = zip(*pts)
        ax.plot(ns, vals, marker="o", label=label)
    if data.nominal is not None:
        ax.axhline(data.nominal, color="grey", linestyle="--", label="nominal")
    ax.set_xlabel("n")
    ax.set_ylabel(_PLOT_VALUE[kind])
    ax.legend(fontsize="small")
    fig.tight_layout()
    png = out_dir / f"{kind}.png"
    fig.savefig(png, dpi=120)
    plt.close(fig)
    written.append(png)
    return written
