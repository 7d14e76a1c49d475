"""Sweep orchestration: grids of trajectories and their summaries.

A sweep is a cartesian grid over (N, ell, tau, initial state) for one
model at fixed couplings.  Each grid point yields an entropy table, the
late-window average of I3, and optionally a power-law fit of the early
growth.  Points are independent; they can run across processes, and the
merged result is ordered by key so that two runs of the same spec are
indistinguishable.
"""

import dataclasses
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import scrambling
from .dynamics import ModelParams
from .errors import NumericalConsistencyError, ScrambleError
from .scrambling import InitialState, Partition
from .tau import SELF_DUAL, TauSpec, half_eps_grid

MODEL_FLOQUET = "floquet"
MODEL_TFIM = "tfim"

# whole register (chain + ancilla) must stay within 2^12 amplitudes
MAX_SWEEP_SITES = 11

MINIMA_PAIR_ATOL = 1e-6
SELF_DUAL_PERIOD_ATOL = 1e-8
SELF_DUAL_INIT_ATOL = 1e-8

_ZERO_TAU = TauSpec(0, 1)


def _as_tau(value):
    if isinstance(value, TauSpec):
        return value
    if isinstance(value, str):
        return TauSpec.parse(value)
    raise TypeError(f"tau grid entries must be TauSpec or str, got {value!r}")


@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one sweep.

    ell_list may be the string "all", meaning 1..N-2 for each N.  For
    the kicked model every tau must be an exact multiple of pi/32 (the
    half-increment grid) so that the self-dual point is hit without
    rounding; the continuous model takes no tau grid at all.  t1/t2
    bound the averaging window; steps is the kick count (defaults to
    t2) and dt the continuous sampling step.
    """

    model: str
    n_list: tuple
    ell_list: object = "all"
    tau_list: tuple = ()
    init_list: tuple = ("allup", "neel")
    j: float = 1.0
    hx: float = 0.0
    hz: float = 1.0
    t1: int = 100
    t2: int = 500
    steps: int = None
    dt: float = 0.1
    fit: bool = False
    fit_delta: float = 0.02
    fit_smooth_width: int = 3
    fit_slope_drop: float = 0.75

    def __post_init__(self):
        if self.model not in (MODEL_FLOQUET, MODEL_TFIM):
            raise ValueError(f"unknown model {self.model!r}")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if not self.n_list:
            raise ValueError("n_list is empty")
        for n in self.n_list:
            if not 3 <= n <= MAX_SWEEP_SITES:
                raise ValueError(f"chain length {n} outside 3..{MAX_SWEEP_SITES}")
        if self.ell_list != "all":
            object.__setattr__(self, "ell_list",
                               tuple(int(e) for e in self.ell_list))
            if not self.ell_list:
                raise ValueError("ell_list is empty")
            for n in self.n_list:
                for ell in self.ell_list:
                    if not 1 <= ell <= n - 2:
                        raise ValueError(
                            f"ell={ell} invalid for N={n} (allowed 1..{n - 2})")
        if self.model == MODEL_FLOQUET:
            taus = tuple(_as_tau(t) for t in self.tau_list)
            if not taus:
                raise ValueError("kicked-model sweep needs a tau grid")
            for tau in taus:
                if (32 * tau.num) % tau.den:
                    raise ValueError(
                        f"tau {tau.label()} is not a multiple of pi/32")
            object.__setattr__(self, "tau_list", taus)
        else:
            if self.tau_list:
                raise ValueError("continuous model takes no tau grid")
            object.__setattr__(self, "tau_list", (_ZERO_TAU,))
        inits = tuple(InitialState(i) for i in self.init_list)
        if not inits:
            raise ValueError("init_list is empty")
        object.__setattr__(self, "init_list", inits)
        if self.steps is None:
            object.__setattr__(self, "steps", int(self.t2))
        if not 0 <= self.t1 < self.t2:
            raise ValueError("need 0 <= t1 < t2")
        if self.model == MODEL_FLOQUET and self.t2 > self.steps:
            raise ValueError("averaging window extends past the last kick")
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    def ells_for(self, n):
        if self.ell_list == "all":
            return tuple(range(1, n - 1))
        return self.ell_list

    def grid(self):
        """Sorted grid keys (n, ell, tau, init)."""
        points = [(n, ell, tau, init)
                  for n in self.n_list
                  for ell in self.ells_for(n)
                  for tau in self.tau_list
                  for init in self.init_list]
        points.sort(key=lambda p: (p[0], p[1], p[2].value, p[3].value))
        return tuple(points)

    def time_grid(self):
        if self.model == MODEL_FLOQUET:
            return int(self.steps)
        return np.arange(0.0, self.t2 + 0.5 * self.dt, self.dt)

    def as_mapping(self):
        """JSON-friendly echo of the parameter set."""
        return {
            "model": self.model,
            "n_list": list(self.n_list),
            "ell_list": ("all" if self.ell_list == "all"
                         else list(self.ell_list)),
            "tau_list": [t.label() for t in self.tau_list],
            "init_list": [i.value for i in self.init_list],
            "j": self.j, "hx": self.hx, "hz": self.hz,
            "t1": self.t1, "t2": self.t2,
            "steps": self.steps, "dt": self.dt,
            "fit": self.fit,
            "fit_delta": self.fit_delta,
            "fit_smooth_width": self.fit_smooth_width,
            "fit_slope_drop": self.fit_slope_drop,
        }

    @classmethod
    def from_mapping(cls, data):
        """Inverse of as_mapping; unknown keys are rejected."""
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown spec keys: {sorted(extra)}")
        kwargs = dict(data)
        for key in ("n_list", "tau_list", "init_list"):
            if key in kwargs and not isinstance(kwargs[key], (str, type(None))):
                kwargs[key] = tuple(kwargs[key])
        if isinstance(kwargs.get("ell_list"), list):
            kwargs["ell_list"] = tuple(kwargs["ell_list"])
        return cls(**kwargs)


@dataclasses.dataclass
class SweepRecord:
    """One grid point: the trajectory table and its summaries."""

    n: int
    ell: int
    tau: TauSpec
    init: InitialState
    table: object = None
    i3_avg: float = None
    fit: object = None
    is_min: bool = False
    series_ref: str = None
    error: str = None

    @property
    def key(self):
        return (self.n, self.ell, self.tau.num, self.tau.den,
                self.init.value)


@dataclasses.dataclass(frozen=True)
class SweepResult:
    spec: ExperimentSpec
    records: tuple

    def record(self, n, ell, tau, init):
        tau = _as_tau(tau)
        init = InitialState(init)
        for rec in self.records:
            if (rec.n, rec.ell, rec.tau, rec.init) == (n, ell, tau, init):
                return rec
        raise KeyError((n, ell, tau.label(), init.value))

    def errors(self):
        return {rec.key: rec.error for rec in self.records if rec.error}


def _params_for(spec, n, tau):
    tau_value = tau.value if spec.model == MODEL_FLOQUET else 0.0
    return ModelParams(n=n, j=spec.j, hx=spec.hx, hz=spec.hz, tau=tau_value)


def _run_point(spec, point):
    n, ell, tau, init = point
    rec = SweepRecord(n=n, ell=ell, tau=tau, init=init)
    try:
        table = scrambling.entropy_table(
            _params_for(spec, n, tau), Partition(n, ell), init,
            spec.time_grid())
        rec.table = table
        if spec.model == MODEL_FLOQUET:
            rec.i3_avg = scrambling.averaged_tmi(table, spec.t1, spec.t2)
        else:
            rec.i3_avg = scrambling.averaged_tmi_continuous(
                table, float(spec.t1), float(spec.t2))
    except ScrambleError as exc:
        rec.error = str(exc)
        return rec
    if spec.fit:
        try:
            rec.fit = scrambling.fit_power_law(
                table, delta=spec.fit_delta,
                smooth_width=spec.fit_smooth_width,
                slope_drop=spec.fit_slope_drop)
        except ScrambleError as exc:
            # fit failure is informative, not fatal; keep the averages
            rec.error = f"fit: {exc}"
    return rec


def resolve_workers(workers=None):
    """Explicit argument, then SCRAMBLE_THREADS, then the core count."""
    if workers is not None:
        count = int(workers)
    else:
        env = os.environ.get("SCRAMBLE_THREADS", "").strip()
        count = int(env) if env else (os.cpu_count() or 1)
    if count < 1:
        raise ValueError("worker count must be at least 1")
    return count


def _flag_minima(records):
    groups = {}
    for rec in records:
        if rec.i3_avg is None:
            continue
        groups.setdefault((rec.n, rec.tau, rec.init), []).append(rec)
    for recs in groups.values():
        best = min(recs, key=lambda r: r.i3_avg)
        best.is_min = True


def run_sweep(spec, workers=None):
    """Evaluate every grid point of an ExperimentSpec.

    Failures of individual points are captured on their records; the
    sweep itself only raises for invalid arguments.  Output order is
    the sorted grid order regardless of scheduling.
    """
    points = spec.grid()
    workers = resolve_workers(workers)
    if workers == 1 or len(points) == 1:
        records = [_run_point(spec, p) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_point, [spec] * len(points), points))
    records.sort(key=lambda r: (r.n, r.ell, r.tau.value, r.init.value))
    _flag_minima(records)
    return SweepResult(spec=spec, records=tuple(records))


@dataclasses.dataclass(frozen=True)
class MinimaRow:
    n: int
    tau: TauSpec
    init: InitialState
    ell: int
    i3_min: float


def extract_minima(result, parity=None):
    """Minimum of the averaged I3 over a complete ell sweep, per N.

    Requires every ell in 1..N-2 to be present and error-free for each
    (N, tau, init) group.  Checks the mirror structure of the averages:
    odd N must attain the minimum at the central ell = (N-1)/2, even N
    at one of the two central ells whose averages agree to 1e-6.
    """
    if parity not in (None, "odd", "even"):
        raise ValueError("parity must be None, 'odd' or 'even'")
    groups = {}
    for rec in result.records:
        groups.setdefault((rec.n, rec.tau, rec.init), {})[rec.ell] = rec
    rows = []
    for (n, tau, init), by_ell in sorted(
            groups.items(),
            key=lambda kv: (kv[0][0], kv[0][1].value, kv[0][2].value)):
        if parity == "odd" and n % 2 == 0:
            continue
        if parity == "even" and n % 2 == 1:
            continue
        wanted = set(range(1, n - 1))
        have = {ell for ell, rec in by_ell.items() if rec.i3_avg is not None}
        if have != wanted:
            raise ValueError(
                f"incomplete ell sweep for N={n}: have {sorted(have)}")
        avgs = {ell: by_ell[ell].i3_avg for ell in wanted}
        argmin = min(avgs, key=avgs.get)
        if n % 2 == 1:
            center = (n - 1) // 2
            if argmin != center:
                raise NumericalConsistencyError(
                    f"odd N={n}: minimum at ell={argmin}, expected {center}")
        else:
            lo, hi = n // 2 - 1, n // 2
            if argmin not in (lo, hi):
                raise NumericalConsistencyError(
                    f"even N={n}: minimum at ell={argmin}, "
                    f"expected {lo} or {hi}")
            if abs(avgs[lo] - avgs[hi]) > MINIMA_PAIR_ATOL:
                raise NumericalConsistencyError(
                    f"even N={n}: central pair differs by "
                    f"{abs(avgs[lo] - avgs[hi])!r}")
        rows.append(MinimaRow(n=n, tau=tau, init=init, ell=argmin,
                              i3_min=avgs[argmin]))
    return tuple(rows)


@dataclasses.dataclass(frozen=True)
class SelfDualReport:
    """Periodicity and init-independence at the self-dual point.

    Violations are reported through the ok flags, not raised, so a
    failed expectation still produces a usable table.
    """

    n: int
    ell: int
    hx: float
    tables: dict
    i3_avg: dict
    period_dev: dict
    period_ok: dict
    init_pair_dev: float
    init_equal_ok: bool

    @property
    def ok(self):
        flags = list(self.period_ok.values())
        if self.init_pair_dev is not None:
            flags.append(self.init_equal_ok)
        return all(flags)


def self_dual_report(n, ell, inits=("allup", "neel"), hx=0.0, j=1.0,
                     hz=1.0, steps=500, t1=100):
    """Run the tau = pi/4 point and check its structural claims.

    The I3 series of the kicked chain without the longitudinal field
    repeats with period N there; for hx != 0 the deviation is reported
    but not flagged.  The late-window average must agree between the
    two product-state initializations.
    """
    if n % 2 == 0:
        raise ValueError("self-dual report expects an odd chain length")
    if steps < max(t1 + 1, 2 * n):
        raise ValueError("too few kicks to assess periodicity and average")
    params = ModelParams(n=n, j=j, hx=hx, hz=hz, tau=SELF_DUAL.value)
    partition = Partition(n, ell)
    tables, avgs, devs, ok = {}, {}, {}, {}
    for init in (InitialState(i) for i in inits):
        table = scrambling.entropy_table(params, partition, init, steps)
        tables[init.value] = table
        avgs[init.value] = scrambling.averaged_tmi(table, t1, steps)
        dev = float(np.abs(table.i3[n:] - table.i3[:-n]).max())
        devs[init.value] = dev
        # the period claim belongs to the integrable point only
        ok[init.value] = dev <= SELF_DUAL_PERIOD_ATOL if hx == 0.0 else True
    pair_dev = None
    pair_ok = True
    vals = list(avgs.values())
    if len(vals) >= 2:
        pair_dev = float(max(abs(a - b)
                             for i, a in enumerate(vals)
                             for b in vals[i + 1:]))
        pair_ok = pair_dev <= SELF_DUAL_INIT_ATOL
    return SelfDualReport(n=n, ell=ell, hx=hx, tables=tables, i3_avg=avgs,
                          period_dev=devs, period_ok=ok,
                          init_pair_dev=pair_dev, init_equal_ok=pair_ok)


def presets():
    """Named sweeps mirroring the standard studies."""
    eps_half = TauSpec(1, 32)
    near_self_dual = TauSpec(3, 16)  # 6 * eps/2
    out = {
        "table1": ExperimentSpec(
            model=MODEL_FLOQUET, n_list=(11,), ell_list=(5,),
            tau_list=(SELF_DUAL,), init_list=("allup",),
            t1=0, t2=11, steps=11),
        "growth-integrable": ExperimentSpec(
            model=MODEL_FLOQUET, n_list=(11,), ell_list=(1, 5),
            tau_list=(eps_half,), hx=0.0, fit=True),
        "growth-nonintegrable": ExperimentSpec(
            model=MODEL_FLOQUET, n_list=(11,), ell_list=(1, 5),
            tau_list=(eps_half,), hx=1.0, fit=True),
        "ell-sweep-integrable": ExperimentSpec(
            model=MODEL_FLOQUET, n_list=tuple(range(3, 12)),
            ell_list="all", tau_list=(eps_half,), hx=0.0),
        "ell-sweep-nonintegrable": ExperimentSpec(
            model=MODEL_FLOQUET, n_list=tuple(range(3, 12)),
            ell_list="all", tau_list=(eps_half,), hx=1.0),
        "tau-sweep-integrable": ExperimentSpec(
            model=MODEL_FLOQUET, n_list=(11,), ell_list=(5,),
            tau_list=half_eps_grid(16)[1:], hx=0.0),
        "tau-sweep-nonintegrable": ExperimentSpec(
            model=MODEL_FLOQUET, n_list=(11,), ell_list=(5,),
            tau_list=half_eps_grid(16)[1:], hx=1.0),
        "near-self-dual-integrable": ExperimentSpec(
            model=MODEL_FLOQUET, n_list=(11,), ell_list=(5,),
            tau_list=(near_self_dual,), hx=0.0),
        "near-self-dual-nonintegrable": ExperimentSpec(
            model=MODEL_FLOQUET, n_list=(11,), ell_list=(5,),
            tau_list=(near_self_dual,), hx=1.0),
        "tfim-growth-integrable": ExperimentSpec(
            model=MODEL_TFIM, n_list=(11,), ell_list=(1, 5),
            hx=0.0, t1=0, t2=10, fit=True),
        "tfim-growth-nonintegrable": ExperimentSpec(
            model=MODEL_TFIM, n_list=(11,), ell_list=(1, 5),
            hx=1.0, t1=0, t2=10, fit=True),
        "tfim-saturation-integrable": ExperimentSpec(
            model=MODEL_TFIM, n_list=(11,), ell_list=(5,), hx=0.0),
        "tfim-saturation-nonintegrable": ExperimentSpec(
            model=MODEL_TFIM, n_list=(11,), ell_list=(5,), hx=1.0),
    }
    return out
