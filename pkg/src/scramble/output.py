"""CSV and JSON serialization for trajectories and sweep summaries.

Two row schemas exist: series files carry one trajectory sample per
row, summary files carry one sweep grid point per row.  Floats are
written with 12 significant digits, enough to round-trip the physics
while keeping files diffable.  Writers emit LF endings and never any
timestamp, so a rerun of the same spec is byte-identical.
"""

import csv
import json

import numpy as np

from .errors import CsvFormatError
from .scrambling import ENTROPY_LABELS

SERIES_HEADER = ("time", "i3") + ENTROPY_LABELS
SUMMARY_HEADER = ("model", "n", "ell", "tau_num", "tau_den", "init",
                  "i3_avg", "fit_b", "fit_window_start", "fit_window_end")

NORMALIZATION_NOTE = (
    "late-window averages over kicked trajectories are inclusive means "
    "over kicks t1..t2, i.e. t2-t1+1 samples; continuous trajectories "
    "use the trapezoid rule divided by t2-t1")


def fmt(x):
    """12-significant-digit float field."""
    return "%.12g" % x


def _writer(stream):
    return csv.writer(stream, lineterminator="\n")


def write_series_csv(table, stream):
    """One trajectory to CSV: time, i3, then the seven entropies."""
    w = _writer(stream)
    w.writerow(SERIES_HEADER)
    for k in range(table.times.size):
        w.writerow([fmt(table.times[k]), fmt(table.i3[k])]
                   + [fmt(v) for v in table.entropies[k]])


def _summary_row(model, rec):
    row = [model, str(rec.n), str(rec.ell),
           str(rec.tau.num), str(rec.tau.den), rec.init.value]
    row.append("" if rec.i3_avg is None else fmt(rec.i3_avg))
    if rec.fit is None:
        row += ["", "", ""]
    else:
        row += [fmt(rec.fit.exponent),
                str(rec.fit.window[0]), str(rec.fit.window[1])]
    return row


def write_summary_csv(result, stream):
    """Sweep result to the summary schema, one row per grid point."""
    w = _writer(stream)
    w.writerow(SUMMARY_HEADER)
    for rec in result.records:
        w.writerow(_summary_row(result.spec.model, rec))


def record_key(rec):
    return (f"n={rec.n},ell={rec.ell},"
            f"tau={rec.tau.label()},init={rec.init.value}")


def sweep_sidecar(result, version):
    """Reproducibility sidecar: spec echo, code version, conventions."""
    errors = {}
    series = {}
    for rec in result.records:
        if rec.error:
            errors[record_key(rec)] = rec.error
        if rec.series_ref:
            series[record_key(rec)] = rec.series_ref
    return {
        "spec": result.spec.as_mapping(),
        "version": version,
        "normalization": NORMALIZATION_NOTE,
        "errors": errors,
        "series_files": series,
    }


def write_sweep_sidecar(result, version, stream):
    json.dump(sweep_sidecar(result, version), stream, indent=2,
              sort_keys=True)
    stream.write("\n")


def _rows(stream):
    reader = csv.reader(stream)
    for num, row in enumerate(reader, start=1):
        yield num, row


def _float_cell(num, name, cell):
    try:
        return float(cell)
    except ValueError:
        raise CsvFormatError(num, f"field {name!r}: not a number: {cell!r}")


def _int_cell(num, name, cell):
    try:
        return int(cell)
    except ValueError:
        raise CsvFormatError(num, f"field {name!r}: not an integer: {cell!r}")


def parse_series_csv(stream):
    """Series file to a dict of column name -> float array."""
    rows = _rows(stream)
    try:
        num, header = next(rows)
    except StopIteration:
        raise CsvFormatError(1, "empty file, expected a header row")
    if tuple(header) != SERIES_HEADER:
        raise CsvFormatError(num, f"bad series header: {header!r}")
    cols = {name: [] for name in SERIES_HEADER}
    for num, row in rows:
        if not row:
            continue
        if len(row) != len(SERIES_HEADER):
            raise CsvFormatError(
                num, f"expected {len(SERIES_HEADER)} fields, got {len(row)}")
        for name, cell in zip(SERIES_HEADER, row):
            cols[name].append(_float_cell(num, name, cell))
    if not cols["time"]:
        raise CsvFormatError(2, "series file has no data rows")
    return {name: np.asarray(vals) for name, vals in cols.items()}


def parse_summary_csv(stream):
    """Summary file to a list of per-row dicts; blank cells become None."""
    rows = _rows(stream)
    try:
        num, header = next(rows)
    except StopIteration:
        raise CsvFormatError(1, "empty file, expected a header row")
    if tuple(header) != SUMMARY_HEADER:
        raise CsvFormatError(num, f"bad summary header: {header!r}")
    out = []
    for num, row in rows:
        if not row:
            continue
        if len(row) != len(SUMMARY_HEADER):
            raise CsvFormatError(
                num, f"expected {len(SUMMARY_HEADER)} fields, got {len(row)}")
        rec = dict(zip(SUMMARY_HEADER, row))
        parsed = {
            "model": rec["model"],
            "n": _int_cell(num, "n", rec["n"]),
            "ell": _int_cell(num, "ell", rec["ell"]),
            "tau_num": _int_cell(num, "tau_num", rec["tau_num"]),
            "tau_den": _int_cell(num, "tau_den", rec["tau_den"]),
            "init": rec["init"],
        }
        for name in ("i3_avg", "fit_b"):
            parsed[name] = (None if rec[name] == ""
                            else _float_cell(num, name, rec[name]))
        for name in ("fit_window_start", "fit_window_end"):
            parsed[name] = (None if rec[name] == ""
                            else _int_cell(num, name, rec[name]))
        out.append(parsed)
    return out


def detect_schema(stream):
    """Peek at the header: 'series' or 'summary'."""
    reader = csv.reader(stream)
    try:
        header = tuple(next(reader))
    except StopIteration:
        raise CsvFormatError(1, "empty file, expected a header row")
    if header == SERIES_HEADER:
        return "series"
    if header == SUMMARY_HEADER:
        return "summary"
    raise CsvFormatError(1, f"unrecognized header: {list(header)!r}")
