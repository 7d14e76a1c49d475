"""State vectors, reduced density matrices and entanglement entropies.

Conventions used throughout the package:

* Basis states are indexed little-endian: chain site k is bit k of the
  index, spin-up is bit value 0, spin-down is bit value 1.
* A register always holds the N chain sites plus one ancilla qubit W,
  so amplitude arrays have length 2**(N+1) and W is bit N, the highest
  bit.  Qubit indices 0..N are therefore all legal gate targets.
* Entropies are base-2 (bits).

Reduced spectra are computed from the Gram matrix of the amplitude
matrix of the bipartition, built on whichever side is smaller; for a
pure global state both sides carry the same nonzero spectrum.
"""

from dataclasses import dataclass

import numpy as np

from . import eigh
from .errors import NumericalConsistencyError, ResourceLimitError

NORM_ATOL = 1e-10
SPECTRUM_SUM_ATOL = 1e-9
EIGENVALUE_FLOOR = -1e-10
ENTROPY_CUTOFF = 1e-12
TRACE_MAX_DIM = 1 << 10


@dataclass(frozen=True)
class SubsetMask:
    """A set of qubit indices stored as a bitmask."""

    bits: int

    def __post_init__(self):
        if self.bits <= 0:
            raise ValueError("subset must be nonempty")

    @classmethod
    def from_sites(cls, sites):
        bits = 0
        for s in sites:
            if s < 0:
                raise ValueError(f"negative qubit index {s}")
            bits |= 1 << s
        return cls(bits)

    def sites(self):
        return [k for k in range(self.bits.bit_length()) if self.bits >> k & 1]

    def __len__(self):
        return bin(self.bits).count("1")

    def __or__(self, other):
        return SubsetMask(self.bits | other.bits)

    def validate(self, n_qubits):
        if self.bits >> n_qubits:
            raise ValueError(
                f"subset {self.sites()} out of range for {n_qubits} qubits")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of N chain sites plus the ancilla W.

    The amplitude array is frozen on construction; evolution ops return
    new instances.
    """

    amplitudes: np.ndarray
    num_sites: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.num_sites < 1:
            raise ValueError("need at least one chain site")
        if amps.ndim != 1 or amps.size != 1 << (self.num_sites + 1):
            raise ValueError(
                f"amplitude length {amps.size} does not match "
                f"2**{self.num_sites + 1}")
        nrm = float(np.linalg.norm(amps))
        if abs(nrm - 1.0) > NORM_ATOL:
            raise NumericalConsistencyError(
                f"state norm {nrm!r} deviates from 1 beyond {NORM_ATOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self):
        return self.num_sites + 1

    @property
    def ancilla(self):
        """Index of the ancilla qubit W (the highest bit)."""
        return self.num_sites

    @classmethod
    def from_basis_index(cls, num_sites, index):
        dim = 1 << (num_sites + 1)
        if not 0 <= index < dim:
            raise ValueError(f"basis index {index} out of range")
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps, num_sites)


def _check_qubit(state, k, what):
    if not 0 <= k < state.n_qubits:
        raise ValueError(f"{what} index {k} out of range 0..{state.n_qubits - 1}")


def apply_cnot(state, control, target):
    """CNOT with the given control and target qubits; returns a new state."""
    _check_qubit(state, control, "control")
    _check_qubit(state, target, "target")
    if control == target:
        raise ValueError("control and target must differ")
    idx = np.arange(state.amplitudes.size)
    src = np.where(((idx >> control) & 1) == 1, idx ^ (1 << target), idx)
    return StateVector(state.amplitudes[src], state.num_sites)


def apply_hadamard_all(state, mask):
    """Hadamard on every qubit in `mask`; returns a new state."""
    mask.validate(state.n_qubits)
    amps = state.amplitudes.copy()
    dim = amps.size
    for k in mask.sites():
        view = amps.reshape(dim >> (k + 1), 2, 1 << k)
        lo = view[:, 0, :].copy()
        hi = view[:, 1, :]
        view[:, 0, :] = lo + hi
        view[:, 1, :] = lo - hi
    amps *= 2.0 ** (-0.5 * len(mask))
    return StateVector(amps, state.num_sites)


_GATHER_CACHE = {}


def _gather_matrix(n_qubits, keep_bits):
    """Index matrix reshaping a state into (kept, complement) blocks."""
    key = (n_qubits, keep_bits)
    hit = _GATHER_CACHE.get(key)
    if hit is not None:
        return hit
    keep_sites = [k for k in range(n_qubits) if keep_bits >> k & 1]
    comp_sites = [k for k in range(n_qubits) if not keep_bits >> k & 1]
    rows = np.zeros(1 << len(keep_sites), dtype=np.intp)
    for j, s in enumerate(keep_sites):
        rows |= ((np.arange(rows.size, dtype=np.intp) >> j) & 1) << s
    cols = np.zeros(1 << len(comp_sites), dtype=np.intp)
    for j, s in enumerate(comp_sites):
        cols |= ((np.arange(cols.size, dtype=np.intp) >> j) & 1) << s
    gather = rows[:, None] | cols[None, :]
    _GATHER_CACHE[key] = gather
    return gather


def schmidt_spectrum(state, keep):
    """Squared Schmidt coefficients of the bipartition (keep | rest).

    Returns min(dim_keep, dim_rest) probabilities in descending order,
    summing to 1 within 1e-9.
    """
    keep.validate(state.n_qubits)
    if len(keep) >= state.n_qubits:
        raise ValueError("subset must be a proper part of the register")
    m = state.amplitudes[_gather_matrix(state.n_qubits, keep.bits)]
    if m.shape[0] <= m.shape[1]:
        gram = m @ m.conj().T
    else:
        gram = m.conj().T @ m
    probs = eigh.hermitian_eigenvalues(gram)[::-1]
    total = float(probs.sum())
    if abs(total - 1.0) > SPECTRUM_SUM_ATOL:
        raise NumericalConsistencyError(
            f"Schmidt spectrum sums to {total!r}, expected 1")
    return probs


def partial_trace(state, keep):
    """Reduced density matrix on `keep` (dimension capped at 2**10)."""
    keep.validate(state.n_qubits)
    if len(keep) >= state.n_qubits:
        raise ValueError("subset must be a proper part of the register")
    if len(keep) > 10:
        raise ResourceLimitError(
            f"partial trace onto {len(keep)} qubits exceeds the "
            f"{TRACE_MAX_DIM} dimension budget")
    n = state.n_qubits
    keep_sites = sorted(keep.sites())
    # numpy axis j holds bit n-1-j, so ascending axes = descending sites
    keep_axes = [n - 1 - s for s in reversed(keep_sites)]
    comp_axes = [j for j in range(n) if j not in keep_axes]
    psi = state.amplitudes.reshape((2,) * n)
    rho = np.tensordot(psi, psi.conj(), axes=(comp_axes, comp_axes))
    dim = 1 << len(keep_sites)
    return DensityMatrix(rho.reshape(dim, dim), len(keep_sites))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Reduced state on a qubit subset; Hermitian with unit trace."""

    entries: np.ndarray
    num_qubits: int

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.complex128)
        dim = 1 << self.num_qubits
        if m.shape != (dim, dim):
            raise ValueError(f"expected shape {(dim, dim)}, got {m.shape}")
        if float(np.abs(m - m.conj().T).max()) > 1e-10:
            raise NumericalConsistencyError("density matrix not Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > 1e-10:
            raise NumericalConsistencyError(
                f"density matrix trace {tr!r} deviates from 1")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def spectrum(self):
        """Eigenvalues in descending order (probabilities)."""
        w, _ = eigh.hermitian_eigendecomposition(self.entries)
        return w[::-1]

    def entropy(self):
        return von_neumann_entropy(self.spectrum())


def von_neumann_entropy(spectrum):
    """Entropy in bits of a probability spectrum.

    Entries below -1e-10 are rejected; small negatives are clamped to
    zero and weights up to 1e-12 are dropped from the sum.
    """
    p = np.asarray(spectrum, dtype=np.float64)
    if p.size and float(p.min()) < EIGENVALUE_FLOOR:
        raise NumericalConsistencyError(
            f"spectrum entry {p.min()!r} below {EIGENVALUE_FLOOR}")
    if p.size and float(p.max()) > 1.0 + 1e-10:
        raise ValueError(f"spectrum entry {p.max()!r} exceeds 1")
    p = p[p > ENTROPY_CUTOFF]
    if p.size == 0:
        return 0.0
    return float(-(p * np.log2(p)).sum())


def subsystem_entropy(state, keep, method="schmidt"):
    """Entanglement entropy of `keep` in bits.

    method="schmidt" uses the Gram-matrix spectrum; method="trace"
    builds the reduced density matrix and diagonalizes it, tracing
    whichever side of the cut is smaller (the global state is pure, so
    both sides have the same entropy) to stay inside the partial-trace
    budget.  The second path exists as an independent cross-check of
    the first.
    """
    if method == "schmidt":
        return von_neumann_entropy(schmidt_spectrum(state, keep))
    if method == "trace":
        keep.validate(state.n_qubits)
        full = (1 << state.n_qubits) - 1
        side = keep
        if len(keep) > state.n_qubits - len(keep):
            side = SubsetMask(full ^ keep.bits)
        return partial_trace(state, side).entropy()
    raise ValueError(f"unknown method {method!r}")
