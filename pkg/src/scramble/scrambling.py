"""Tripartite mutual information diagnostics for the kicked chain.

The chain is split as X = {site 0}, Y = {1..ell}, Z = {ell+1..N-1}, and
an ancilla W is maximally entangled with X by preparing W in |+> and
applying CNOT(W -> site 0).  Everything scrambling-related then follows
from subsystem entropies of the pure (N+1)-qubit register:

    I2(A:B)   = S_A + S_B - S_AB
    I3(X:Y:Z) = I2(X:Y) + I2(X:Z) - I2(X:YZ)
              = S_X+S_Y+S_Z - S_XY-S_YZ-S_ZX + S_XYZ

Both forms are evaluated on every sample and must agree to 1e-9; this
guards the mask bookkeeping rather than the entropy solver, which has
its own cross-check (method="trace").

Negative I3 diagnoses scrambling; the time average over a late window
and the power-law growth of 1 - I3 at early times are the two summary
statistics the sweep layer builds on.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import dynamics
from .errors import FitWindowError, NumericalConsistencyError
from .hilbert import (StateVector, SubsetMask, apply_cnot,
                      subsystem_entropy)

I3_IDENTITY_ATOL = 1e-9
MI_FLOOR = -1e-9
SERIES_GRID_ATOL = 1e-9

ENTROPY_LABELS = ("s_x", "s_y", "s_z", "s_xyz", "s_xy", "s_yz", "s_zx")


class InitialState(str, enum.Enum):
    ALL_UP = "allup"
    NEEL = "neel"


@dataclass(frozen=True)
class Partition:
    """X = {0}, Y = {1..ell}, Z = {ell+1..n-1} on an n-site chain."""

    n: int
    ell: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("partitioning needs at least three sites")
        if not 1 <= self.ell <= self.n - 2:
            raise ValueError(
                f"ell must lie in 1..{self.n - 2}, got {self.ell}")

    @property
    def x(self):
        return SubsetMask(1)

    @property
    def y(self):
        return SubsetMask(((1 << self.ell) - 1) << 1)

    @property
    def z(self):
        bits = ((1 << (self.n - 1 - self.ell)) - 1) << (self.ell + 1)
        return SubsetMask(bits)

    @property
    def w(self):
        return SubsetMask(1 << self.n)

    def entropy_masks(self):
        """The seven register subsets entering the I3 identity."""
        x, y, z = self.x, self.y, self.z
        return {
            "s_x": x, "s_y": y, "s_z": z, "s_xyz": x | y | z,
            "s_xy": x | y, "s_yz": y | z, "s_zx": z | x,
        }


def product_state_bits(kind, n):
    """Basis index of the product state; site 0 is spin-up for both."""
    kind = InitialState(kind)
    if kind is InitialState.ALL_UP:
        return 0
    return sum(1 << k for k in range(1, n, 2))


def encode_chain_state(chain_amplitudes, n):
    """Entangle the ancilla with site 0 of a given chain state.

    Builds |+>_W (x) |psi>, then CNOT(control=W, target=site 0).
    """
    chain = np.asarray(chain_amplitudes, dtype=np.complex128)
    if chain.shape != (1 << n,):
        raise ValueError(f"chain state must have length {1 << n}")
    amps = np.concatenate([chain, chain]) / np.sqrt(2.0)
    state = StateVector(amps, n)
    return apply_cnot(state, control=n, target=0)


def prepare_encoded_state(kind, n):
    """Encoded register for one of the two reference product states."""
    if n < 2:
        raise ValueError("encoding needs at least two chain sites")
    chain = np.zeros(1 << n, dtype=np.complex128)
    chain[product_state_bits(kind, n)] = 1.0
    return encode_chain_state(chain, n)


def _entropy_bundle(state, partition, method):
    masks = partition.entropy_masks()
    return np.array([subsystem_entropy(state, masks[lbl], method)
                     for lbl in ENTROPY_LABELS])


def bipartite_mi(state, a, b, method="schmidt"):
    """I2(A:B) in bits; subsets must be disjoint."""
    if a.bits & b.bits:
        raise ValueError("subsets overlap")
    mi = (subsystem_entropy(state, a, method)
          + subsystem_entropy(state, b, method)
          - subsystem_entropy(state, SubsetMask(a.bits | b.bits), method))
    if mi < MI_FLOOR:
        raise NumericalConsistencyError(
            f"mutual information {mi!r} below {MI_FLOOR}")
    return mi


def _i3_from_bundle(s):
    sx, sy, sz, sxyz, sxy, syz, szx = s
    via_mi = (sx + sy - sxy) + (sx + sz - szx) - (sx + syz - sxyz)
    via_sum = sx + sy + sz - sxy - syz - szx + sxyz
    if abs(via_mi - via_sum) > I3_IDENTITY_ATOL:
        raise NumericalConsistencyError(
            f"I3 identity violated: {via_mi!r} vs {via_sum!r}")
    return via_mi


def tripartite_mi(state, partition, method="schmidt"):
    """I3(X:Y:Z) in bits, evaluated through both defining forms."""
    return _i3_from_bundle(_entropy_bundle(state, partition, method))


@dataclass(frozen=True, eq=False)
class EntropyTable:
    """Per-sample subsystem entropies and I3 along one trajectory."""

    model: str
    times: np.ndarray
    entropies: np.ndarray  # shape (len(times), 7), ENTROPY_LABELS order
    i3: np.ndarray
    params: dynamics.ModelParams
    partition: Partition
    init: InitialState


@dataclass(frozen=True, eq=False)
class TmiSeries:
    """I3 samples along one trajectory."""

    model: str
    times: np.ndarray
    i3: np.ndarray
    params: dynamics.ModelParams
    partition: Partition
    init: InitialState


def _floquet_states(params, init, kicks):
    state = prepare_encoded_state(init, params.n)
    yield state
    for _ in range(kicks):
        state = dynamics.apply_floquet_kick(state, params)
        yield state


def _tfim_states(params, init, times, solver):
    w, v = dynamics.tfim_eigensystem(params, solver)
    psi0 = prepare_encoded_state(init, params.n)
    blocks = psi0.amplitudes.reshape(2, -1)
    coeffs = (blocks.conj() @ v).conj()
    dt = times[1] - times[0] if times.size > 1 else 0.0
    step = np.exp(-1j * w * dt)
    for k in range(times.size):
        if k:
            coeffs *= step
        yield StateVector((coeffs @ v.T).ravel(), params.n)


def _check_time_grid(times):
    times = np.asarray(times, dtype=np.float64)
    if times.ndim != 1 or times.size < 1:
        raise ValueError("time grid must be a nonempty 1-d array")
    if abs(times[0]) > SERIES_GRID_ATOL:
        raise ValueError("time grid must start at 0")
    if times.size > 1:
        steps = np.diff(times)
        if steps.min() <= 0:
            raise ValueError("time grid must be strictly increasing")
        if steps.max() - steps.min() > SERIES_GRID_ATOL:
            raise ValueError("time grid must be uniform")
    return times


def entropy_table(params, partition, init, steps, method="schmidt",
                  solver="lapack"):
    """Entropies and I3 along one trajectory.

    `steps` is either an integer kick count (Floquet; samples at
    n = 0..steps) or a uniform time grid starting at 0 (continuous
    model, evolved incrementally in the eigenbasis).
    """
    if partition.n != params.n:
        raise ValueError("partition and params disagree on chain length")
    init = InitialState(init)
    if isinstance(steps, (int, np.integer)):
        if steps < 0:
            raise ValueError("kick count must be nonnegative")
        model = "floquet"
        times = np.arange(steps + 1, dtype=np.float64)
        states = _floquet_states(params, init, int(steps))
    else:
        model = "tfim"
        times = _check_time_grid(steps)
        states = _tfim_states(params, init, times, solver)
    rows = np.empty((times.size, len(ENTROPY_LABELS)))
    i3 = np.empty(times.size)
    for k, state in enumerate(states):
        rows[k] = _entropy_bundle(state, partition, method)
        i3[k] = _i3_from_bundle(rows[k])
    return EntropyTable(model=model, times=times, entropies=rows, i3=i3,
                        params=params, partition=partition, init=init)


def tmi_time_series(params, partition, init, steps, method="schmidt",
                    solver="lapack"):
    """I3 along one trajectory; see `entropy_table` for `steps`."""
    table = entropy_table(params, partition, init, steps, method, solver)
    return TmiSeries(model=table.model, times=table.times, i3=table.i3,
                     params=table.params, partition=table.partition,
                     init=table.init)


def _series_index(series, t):
    idx = np.nonzero(np.abs(series.times - t) <= SERIES_GRID_ATOL)[0]
    if idx.size != 1:
        raise ValueError(f"time {t} is not a sample of the series")
    return int(idx[0])


def averaged_tmi(series, t_start, t_end):
    """Inclusive arithmetic mean of I3 over kicks t_start..t_end.

    The normalization is the true sample count t_end - t_start + 1.
    """
    if series.model != "floquet":
        raise ValueError("discrete average needs a kicked-model series")
    if t_start > t_end:
        raise ValueError("empty averaging window")
    a = _series_index(series, t_start)
    b = _series_index(series, t_end)
    return float(series.i3[a:b + 1].mean())


def averaged_tmi_continuous(series, t_start, t_end):
    """Trapezoid time average of I3 over [t_start, t_end]."""
    if series.model != "tfim":
        raise ValueError("continuous average needs a continuous series")
    if t_start >= t_end:
        raise ValueError("empty averaging window")
    a = _series_index(series, t_start)
    b = _series_index(series, t_end)
    window_t = series.times[a:b + 1]
    window_y = series.i3[a:b + 1]
    return float(np.trapezoid(window_y, window_t) / (t_end - t_start))


@dataclass(frozen=True)
class FitResult:
    """Power-law fit of 1 - I3 against time in log-log space."""

    exponent: float
    log_prefactor: float
    window: tuple
    rms_residual: float


def _centered_mean(values, width):
    # shrinking centered moving average; NaN entries are skipped, an
    # all-NaN window yields NaN
    half = width // 2
    out = np.empty(values.size)
    for k in range(values.size):
        seg = values[max(0, k - half):k + half + 1]
        seg = seg[np.isfinite(seg)]
        out[k] = seg.mean() if seg.size else np.nan
    return out


def fit_power_law(series, delta=0.02, smooth_width=3, slope_drop=0.75):
    """Fit 1 - I3 ~ a * t**b over the early growth window.

    The window is anchored at the first sample where I3 drops below
    -delta after having been at or above it.  From that crossing the
    window is extended in both directions while the growth keeps the
    character it has at the crossing: a centered smooth_width-point
    moving average of 1 - I3 must rise strictly, and the smoothed local
    log-log slope must stay at or above slope_drop times its value at
    the crossing.  The backward extension picks up the descent from an
    early positive hump when there is one but stops at a flat prefix
    where I3 merely hovers near zero; the forward extension stops just
    before saturation flattens the growth or an oscillation turns it
    around.  Needs at least 4 samples; raises FitWindowError otherwise.
    """
    if smooth_width < 1 or smooth_width % 2 == 0:
        raise ValueError("smooth_width must be odd and positive")
    if not 0.0 < slope_drop <= 1.0:
        raise ValueError("slope_drop must lie in (0, 1]")
    i3 = series.i3
    t = series.times
    y = 1.0 - i3
    crossing = None
    seen_ok = False
    for k in range(i3.size):
        if i3[k] >= -delta:
            seen_ok = True
        elif seen_ok:
            crossing = k
            break
    if crossing is None:
        raise FitWindowError(f"I3 never crosses below -{delta}")
    if crossing >= y.size - 1:
        raise FitWindowError("crossing sits at the last sample")
    # local log-log slope of each segment (k, k+1); NaN where undefined
    beta = np.full(y.size - 1, np.nan)
    ok = (t[:-1] > 0) & (y[:-1] > 0) & (y[1:] > 0)
    beta[ok] = ((np.log(y[1:][ok]) - np.log(y[:-1][ok]))
                / (np.log(t[1:][ok]) - np.log(t[:-1][ok])))
    smooth = _centered_mean(y, smooth_width)
    sslope = _centered_mean(beta, smooth_width)
    ref = sslope[crossing]
    if not np.isfinite(ref) or ref <= 0:
        raise FitWindowError("no growth at the -delta crossing")
    floor = slope_drop * ref
    start = crossing
    while (start - 1 >= 1 and np.isfinite(sslope[start - 1])
           and sslope[start - 1] >= floor
           and smooth[start - 1] < smooth[start]):
        start -= 1
    end = crossing
    while (end + 1 < y.size and end < sslope.size
           and np.isfinite(sslope[end]) and sslope[end] >= floor
           and smooth[end + 1] > smooth[end]):
        end += 1
    if end - start + 1 < 4:
        raise FitWindowError(
            f"growth window {start}..{end} has fewer than 4 samples")
    tt = t[start:end + 1]
    yy = y[start:end + 1]
    if tt[0] <= 0 or (yy <= 0).any():
        raise FitWindowError("growth window contains nonpositive values")
    logt = np.log(tt)
    logy = np.log(yy)
    slope, intercept = np.polyfit(logt, logy, 1)
    resid = logy - (slope * logt + intercept)
    return FitResult(exponent=float(slope), log_prefactor=float(intercept),
                     window=(int(start), int(end)),
                     rms_residual=float(np.sqrt(np.mean(resid ** 2))))
