"""Table and plot-data emission, record persistence, and regression
comparison against the bundled reference tables.

Table text uses 5-significant-digit scientific notation (``9.2738e-1``);
CSV files carry full double precision (17 significant digits) so round trips
are exact.  Emission is deterministic: identical records produce
byte-identical output.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from importlib import resources

from .metrics import ConvergenceRecord, SweepEntry
from .model import ALPHA_ELLIPTIC, ELLIPTIC, OCP

TABLE1_COLUMNS = ("elliptic", "1e-02", "1e-04", "1e-06")


def alpha_key(alpha: float) -> str:
    """Canonical column key for a regularization weight, e.g. 1e-02."""
    return f"{alpha:.0e}"


def fmt_sci(x: float) -> str:
    """5-significant-digit scientific notation without exponent padding."""
    if x == 0:
        return "0"
    mantissa, exp = f"{x:.4e}".split("e")
    return f"{mantissa}e{int(exp)}"


def fmt_full(x) -> str:
    """Full-precision decimal form that round-trips doubles exactly."""
    if x is None:
        return ""
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# record persistence
# ---------------------------------------------------------------------------

_RECORD_FIELDS = [
    "kind", "alpha", "delta", "n", "dim", "convention", "init", "seed",
    "shift_c", "tol", "max_sweeps", "converged", "k", "merit", "rate",
]


def records_to_csv(records) -> str:
    """One CSV row per sweep entry, full precision, spec echo on every row."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_RECORD_FIELDS)
    for rec in records:
        for e in rec.entries:
            w.writerow([
                rec.kind,
                fmt_full(rec.alpha),
                rec.delta,
                rec.n,
                rec.dim,
                rec.convention,
                rec.init,
                rec.seed,
                fmt_full(rec.shift_c),
                fmt_full(rec.tol),
                rec.max_sweeps,
                int(rec.converged),
                e.k,
                fmt_full(e.merit_max),
                fmt_full(e.rate),
            ])
    return buf.getvalue()


def records_from_csv(text: str) -> list:
    """Inverse of :func:`records_to_csv`; groups rows back into records."""
    rows = list(csv.DictReader(io.StringIO(text)))
    grouped: dict = {}
    order = []
    for row in rows:
        key = (row["kind"], row["alpha"], row["delta"], row["n"], row["seed"])
        if key not in grouped:
            grouped[key] = (row, [])
            order.append(key)
        grouped[key][1].append(SweepEntry(
            k=int(row["k"]),
            merit_max=float(row["merit"]),
            rate=float(row["rate"]) if row["rate"] else None,
        ))
    records = []
    for key in order:
        row, entries = grouped[key]
        records.append(ConvergenceRecord(
            kind=row["kind"],
            alpha=float(row["alpha"]) if row["alpha"] else None,
            delta=int(row["delta"]),
            n=int(row["n"]),
            entries=tuple(sorted(entries, key=lambda e: e.k)),
            converged=bool(int(row["converged"])),
            dim=int(row["dim"]),
            convention=row["convention"],
            init=row["init"],
            seed=int(row["seed"]),
            shift_c=float(row["shift_c"]) if row["shift_c"] else 0.0,
            tol=float(row["tol"]) if row["tol"] else 1e-14,
            max_sweeps=int(row["max_sweeps"]),
        ))
    return records


# ---------------------------------------------------------------------------
# table emission
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableOutput:
    text: str
    markdown: str
    csv: str


def _record_column(rec: ConvergenceRecord) -> str:
    if rec.kind == ELLIPTIC:
        return "elliptic"
    return alpha_key(rec.alpha)


def _cell_map(records) -> dict:
    cells = {}
    for rec in records:
        col = _record_column(rec)
        for e in rec.entries:
            cells[(col, rec.delta, e.k)] = (e.merit_max, e.rate)
    return cells


def _table1_grid(records):
    cells = _cell_map([r for r in records if r.kind in (ELLIPTIC, OCP)])
    deltas = sorted({d for (_, d, _) in cells})
    ks = sorted({k for (_, _, k) in cells})
    cols = [c for c in TABLE1_COLUMNS if any(key[0] == c for key in cells)]
    extra = sorted({key[0] for key in cells} - set(cols))
    return cells, deltas, ks, cols + extra


def _render_rows(header, rows, sep=" | "):
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
              for i in range(len(header))]
    out = [sep.join(h.ljust(w) for h, w in zip(header, widths))]
    out.append("-+-".join("-" * w for w in widths))
    for r in rows:
        out.append(sep.join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(out) + "\n"


def _render_markdown(header, rows):
    out = ["| " + " | ".join(header) + " |"]
    out.append("|" + "|".join(" --- " for _ in header) + "|")
    for r in rows:
        out.append("| " + " | ".join(r) + " |")
    return "\n".join(out) + "\n"


def _render_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _grid_rows(cells, deltas, ks, cols, full_precision):
    fmt = fmt_full if full_precision else fmt_sci
    rows = []
    for d in deltas:
        for k in ks:
            row = [str(d), str(k)]
            for c in cols:
                cell = cells.get((c, d, k))
                if cell is None:
                    row += ["-", "-"]
                else:
                    err, rate = cell
                    row.append(fmt(err))
                    row.append(fmt(rate) if rate is not None else "-")
            rows.append(row)
    return rows


def emit_table1(records) -> TableOutput:
    """Error/rate table of the equation and control-problem runs.

    Rows are grouped by the overlap parameter; each problem column carries
    an error and a rate sub-column.  Missing cells render as gaps.
    """
    cells, deltas, ks, cols = _table1_grid(records)
    header = ["delta", "k"]
    for c in cols:
        label = c if c == "elliptic" else f"alpha={c}"
        header += [f"{label} err", f"{label} rate"]
    rows = _grid_rows(cells, deltas, ks, cols, full_precision=False)
    csv_rows = _grid_rows(cells, deltas, ks, cols, full_precision=True)
    return TableOutput(
        text=_render_rows(header, rows),
        markdown=_render_markdown(header, rows),
        csv=_render_csv(header, csv_rows),
    )


def emit_table2(records) -> TableOutput:
    """Error/rate table of the shifted-equation runs, one column pair per delta."""
    recs = [r for r in records if r.kind == ALPHA_ELLIPTIC]
    cells = {}
    for rec in recs:
        for e in rec.entries:
            cells[(str(rec.delta), rec.delta, e.k)] = (e.merit_max, e.rate)
    deltas = sorted({d for (_, d, _) in cells})
    ks = sorted({k for (_, _, k) in cells})
    cols = [str(d) for d in deltas]
    header = ["k"]
    for c in cols:
        header += [f"delta={c} err", f"delta={c} rate"]
    rows, csv_rows = [], []
    for full, sink in ((False, rows), (True, csv_rows)):
        fmt = fmt_full if full else fmt_sci
        for k in ks:
            row = [str(k)]
            for d in deltas:
                cell = cells.get((str(d), d, k))
                if cell is None:
                    row += ["-", "-"]
                else:
                    err, rate = cell
                    row.append(fmt(err))
                    row.append(fmt(rate) if rate is not None else "-")
            sink.append(row)
    return TableOutput(
        text=_render_rows(header, rows),
        markdown=_render_markdown(header, rows),
        csv=_render_csv(header, csv_rows),
    )


def _series_label(rec: ConvergenceRecord) -> str:
    col = _record_column(rec)
    base = col if col == "elliptic" else f"alpha_{col}"
    if rec.kind == ALPHA_ELLIPTIC:
        base = f"shifted_{alpha_key(rec.alpha)}"
    return f"{base}_delta{rec.delta}"


def emit_plot_data(records) -> str:
    """Columnar text: sweep index vs log10 of the merit, one series per record."""
    import math

    if not records:
        return "# k\n"
    ks = sorted({e.k for rec in records for e in rec.entries})
    labels = [_series_label(rec) for rec in records]
    lines = ["# k " + " ".join(labels)]
    lookup = [{e.k: e.merit_max for e in rec.entries} for rec in records]
    for k in ks:
        row = [str(k)]
        for table in lookup:
            v = table.get(k)
            row.append(fmt_full(math.log10(v)) if v is not None and v > 0 else "nan")
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def emit_gamma_scan(scan) -> str:
    """Two-column text file of a (gamma, rate) scan."""
    lines = ["# gamma rho_c"]
    for gam, rho in scan:
        lines.append(f"{fmt_full(gam)} {fmt_full(rho)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reference fixtures and regression comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mismatch:
    cell: tuple
    expected: float
    got: float | None

    @property
    def rel(self) -> float | None:
        if self.got is None:
            return None
        return abs(self.got / self.expected - 1.0)

    def __str__(self):
        if self.got is None:
            return f"{self.cell}: missing (expected {fmt_sci(self.expected)})"
        return (f"{self.cell}: got {fmt_sci(self.got)}, expected "
                f"{fmt_sci(self.expected)} (rel {self.rel:.2e})")


def _load_reference(name: str) -> list:
    with resources.files("schwarzocp.data").joinpath(name).open() as fh:
        return list(csv.DictReader(fh))


def load_reference_table1() -> dict:
    """{(column, delta, k): (error, rate-or-None)} of the bundled reference."""
    out = {}
    for row in _load_reference("table1_reference.csv"):
        out[(row["column"], int(row["delta"]), int(row["k"]))] = (
            float(row["error"]),
            float(row["rate"]) if row["rate"] else None,
        )
    return out


def load_reference_table2() -> dict:
    out = {}
    for row in _load_reference("table2_reference.csv"):
        out[(int(row["delta"]), int(row["k"]))] = (
            float(row["error"]),
            float(row["rate"]) if row["rate"] else None,
        )
    return out


def compare_to_reference(records, rtol: float = 1e-3) -> list:
    """Per-cell relative comparison of records against the bundled tables.

    Returns the list of mismatches (empty when everything agrees within
    ``rtol``); cells the records do not cover are reported as missing.
    """
    mismatches = []
    t1 = {r for r in records if r.kind in (ELLIPTIC, OCP)}
    t2 = {r for r in records if r.kind == ALPHA_ELLIPTIC}
    if t1:
        cells = _cell_map(t1)
        for key, (err, rate) in load_reference_table1().items():
            got = cells.get(key)
            for want, have, tag in ((err, got and got[0], "err"),
                                    (rate, got and got[1], "rate")):
                if want is None:
                    continue
                if have is None:
                    mismatches.append(Mismatch(key + (tag,), want, None))
                elif abs(have / want - 1.0) > rtol:
                    mismatches.append(Mismatch(key + (tag,), want, have))
    if t2:
        cells = {}
        for rec in t2:
            for e in rec.entries:
                cells[(rec.delta, e.k)] = (e.merit_max, e.rate)
        for key, (err, rate) in load_reference_table2().items():
            got = cells.get(key)
            for want, have, tag in ((err, got and got[0], "err"),
                                    (rate, got and got[1], "rate")):
                if want is None:
                    continue
                if have is None:
                    mismatches.append(Mismatch(key + (tag,), want, None))
                elif abs(have / want - 1.0) > rtol:
                    mismatches.append(Mismatch(key + (tag,), want, have))
    return mismatches


@dataclass
class ExperimentSuiteResult:
    """Everything one suite invocation produced."""

    metadata: dict
    records: list = field(default_factory=list)
    scans: dict = field(default_factory=dict)
    mismatches: list = field(default_factory=list)
