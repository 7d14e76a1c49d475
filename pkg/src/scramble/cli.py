"""Command line front end.

Three subcommands: `simulate` runs one trajectory and emits a series
CSV, `sweep` runs a grid from a config file or named preset and emits a
summary CSV plus per-point series and a JSON sidecar, `plot` renders a
series or summary CSV to a standalone SVG.

Exit codes: 0 success, 2 usage or invalid arguments, 3 numerical or
resource failure, 4 unwritable output, 5 malformed CSV input (the
message carries the offending row number).  Data goes to stdout when no
output path is given; diagnostics go to stderr.
"""

import argparse
import configparser
import io
import json
import os
import sys

import numpy as np

from . import __version__, experiments, output, scrambling, svgplot
from .dynamics import ModelParams
from .errors import CsvFormatError, ScrambleError
from .scrambling import InitialState, Partition
from .tau import TauSpec, parse_tau


def _tau_value(spec):
    return spec.value if isinstance(spec, TauSpec) else float(spec)


def _open_out(path):
    # newline="" keeps the csv module's LF endings untranslated
    return open(path, "w", encoding="utf-8", newline="")


def cmd_simulate(args):
    if args.model == "floquet":
        if args.tau is None:
            raise ValueError("the kicked model needs --tau")
        tau = _tau_value(parse_tau(args.tau))
        grid = int(args.steps)
    else:
        tau = 0.0
        grid = np.arange(0.0, args.t_max + 0.5 * args.dt, args.dt)
    params = ModelParams(n=args.n, j=args.j, hx=args.hx, hz=args.hz, tau=tau)
    table = scrambling.entropy_table(
        params, Partition(args.n, args.ell), InitialState(args.init), grid,
        method="trace" if args.oracle else "schmidt")
    if args.out:
        with _open_out(args.out) as fh:
            output.write_series_csv(table, fh)
    else:
        output.write_series_csv(table, sys.stdout)
    return 0


def _spec_from_ini(path):
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read or not parser.has_section("sweep"):
        raise ValueError(f"config {path!r} has no [sweep] section")
    sec = parser["sweep"]

    def split(text):
        return tuple(s.strip() for s in text.split(",") if s.strip())

    data = {}
    for key in sec:
        if key in ("n_list",):
            data[key] = tuple(int(v) for v in split(sec[key]))
        elif key == "ell_list":
            raw = sec[key].strip()
            data[key] = "all" if raw == "all" else tuple(
                int(v) for v in split(raw))
        elif key in ("tau_list", "init_list"):
            data[key] = split(sec[key])
        elif key in ("n", "ell", "t1", "t2", "steps", "fit_smooth_width"):
            data[key] = sec.getint(key)
        elif key == "fit":
            data[key] = sec.getboolean(key)
        elif key == "model":
            data[key] = sec[key].strip()
        else:
            data[key] = sec.getfloat(key)
    return experiments.ExperimentSpec.from_mapping(data)


def _read_input(path):
    # a missing or unreadable *input* is an argument problem, not an
    # output problem; keep exit 4 for write failures only
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise ValueError(str(exc))


def _load_spec(path):
    text = _read_input(path)
    if not text.strip():
        raise ValueError(f"config {path!r} is empty")
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        if not data:
            raise ValueError(f"config {path!r} is empty")
        return experiments.ExperimentSpec.from_mapping(data)
    return _spec_from_ini(path)


def _series_name(model, rec):
    return (f"{model}_n{rec.n}_ell{rec.ell}"
            f"_tau{rec.tau.num}d{rec.tau.den}_{rec.init.value}.csv")


def cmd_sweep(args):
    if args.preset:
        catalog = experiments.presets()
        spec = catalog[args.preset]
    else:
        spec = _load_spec(args.config)
    result = experiments.run_sweep(spec, workers=args.workers)
    if args.out_dir:
        series_dir = os.path.join(args.out_dir, "series")
        os.makedirs(series_dir, exist_ok=True)
        for rec in result.records:
            if rec.table is None:
                continue
            name = _series_name(spec.model, rec)
            with _open_out(os.path.join(series_dir, name)) as fh:
                output.write_series_csv(rec.table, fh)
            rec.series_ref = os.path.join("series", name)
        with _open_out(os.path.join(args.out_dir, "summary.csv")) as fh:
            output.write_summary_csv(result, fh)
        with _open_out(os.path.join(args.out_dir, "sweep.json")) as fh:
            output.write_sweep_sidecar(result, __version__, fh)
        print(f"wrote {len(result.records)} grid points to {args.out_dir}",
              file=sys.stderr)
    else:
        output.write_summary_csv(result, sys.stdout)
    failures = result.errors()
    for key, msg in failures.items():
        print(f"note: {key}: {msg}", file=sys.stderr)
    return 0


def _summary_groups(rows, loglog):
    usable = [r for r in rows if r["i3_avg"] is not None]
    skipped = len(rows) - len(usable)
    taus = {(r["tau_num"], r["tau_den"]) for r in usable}
    ells = {r["ell"] for r in usable}
    if len(taus) > 1:
        xname = "tau/pi"
        xval = lambda r: r["tau_num"] / r["tau_den"]
        keyfn = lambda r: (r["model"], r["n"], r["ell"], r["init"])
        labelfn = lambda r: f"{r['model']} n={r['n']} ell={r['ell']} {r['init']}"
    elif len(ells) > 1:
        xname = "ell"
        xval = lambda r: float(r["ell"])
        keyfn = lambda r: (r["model"], r["n"], r["tau_num"], r["tau_den"],
                           r["init"])
        labelfn = lambda r: (f"{r['model']} n={r['n']} "
                             f"tau={r['tau_num']}pi/{r['tau_den']} {r['init']}")
    else:
        xname = "n"
        xval = lambda r: float(r["n"])
        keyfn = lambda r: (r["model"], r["ell"], r["tau_num"], r["tau_den"],
                           r["init"])
        labelfn = lambda r: (f"{r['model']} ell={r['ell']} "
                             f"tau={r['tau_num']}pi/{r['tau_den']} {r['init']}")
    grouped = {}
    for r in usable:
        grouped.setdefault(keyfn(r), []).append(r)
    groups = []
    yname = "avg I3 (bits)"
    for key in sorted(grouped):
        rs = sorted(grouped[key], key=xval)
        x = np.array([xval(r) for r in rs])
        y = np.array([r["i3_avg"] for r in rs])
        if loglog:
            y = 1.0 - y
            yname = "1 - avg I3"
        groups.append(svgplot.PlotGroup(labelfn(rs[0]), x, y))
    return groups, xname, yname, skipped


def cmd_plot(args):
    text = _read_input(args.input)
    schema = output.detect_schema(io.StringIO(text))
    if schema == "series":
        cols = output.parse_series_csv(io.StringIO(text))
    else:
        rows = output.parse_summary_csv(io.StringIO(text))
    pre_skipped = 0
    if schema == "series":
        if args.loglog:
            groups = [svgplot.PlotGroup("1 - i3", cols["time"],
                                        1.0 - cols["i3"])]
            xname, yname = "t", "1 - I3"
        else:
            groups = [svgplot.PlotGroup("i3", cols["time"], cols["i3"])]
            xname, yname = "t", "I3 (bits)"
    else:
        groups, xname, yname, pre_skipped = _summary_groups(rows, args.loglog)
    svg, skipped = svgplot.render_line_plot(
        groups, xname, yname, title=args.title, loglog=args.loglog)
    skipped += pre_skipped
    if skipped:
        print(f"warning: skipped {skipped} row(s) not plottable "
              f"{'on log axes' if args.loglog else ''}".rstrip(),
              file=sys.stderr)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="scramble",
        description="Kicked-chain scrambling: trajectories, sweeps, plots.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one trajectory to CSV")
    sim.add_argument("--model", choices=("floquet", "tfim"),
                     default="floquet")
    sim.add_argument("--n", type=int, required=True,
                     help="chain length (sites)")
    sim.add_argument("--ell", type=int, required=True,
                     help="Y block length")
    sim.add_argument("--tau", help="kick period: pi/4, 3*pi/16, eps/2, "
                                   "or a float")
    sim.add_argument("--init", choices=("allup", "neel"), default="allup")
    sim.add_argument("--steps", type=int, default=500,
                     help="kick count (kicked model)")
    sim.add_argument("--t-max", type=float, default=10.0,
                     help="time horizon (continuous model)")
    sim.add_argument("--dt", type=float, default=0.1,
                     help="sample spacing (continuous model)")
    sim.add_argument("--hx", type=float, default=0.0)
    sim.add_argument("--hz", type=float, default=1.0)
    sim.add_argument("--J", dest="j", type=float, default=1.0)
    sim.add_argument("--oracle", action="store_true",
                     help="use the slow reference entropy path")
    sim.add_argument("--out", help="output CSV path (default stdout)")
    sim.set_defaults(func=cmd_simulate)

    swp = sub.add_parser("sweep", help="run a parameter grid")
    src = swp.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON or INI sweep description")
    src.add_argument("--preset", choices=sorted(experiments.presets()),
                     help="named built-in sweep")
    swp.add_argument("--out-dir",
                     help="directory for summary.csv, sweep.json and "
                          "per-point series (default: summary to stdout)")
    swp.add_argument("--workers", type=int, default=None,
                     help="process count (default: SCRAMBLE_THREADS or "
                          "the core count)")
    swp.set_defaults(func=cmd_sweep)

    plt = sub.add_parser("plot", help="render a CSV to standalone SVG")
    plt.add_argument("input", help="series or summary CSV")
    plt.add_argument("--out", help="output SVG path (default stdout)")
    plt.add_argument("--loglog", action="store_true",
                     help="log-log axes; series files plot 1 - I3")
    plt.add_argument("--title", default="")
    plt.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CsvFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except (ValueError, TypeError, KeyError, json.JSONDecodeError,
            configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ScrambleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
