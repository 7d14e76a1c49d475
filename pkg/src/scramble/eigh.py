"""Self-contained Hermitian eigensolvers.

Two algorithm families, selected by size: cyclic complex Jacobi up to
256x256 (simple, very robust for the density matrices this package
produces), and Householder tridiagonalization with implicit-shift QL
above that.  Both live in the kernels subpackage with a compiled and a
pure-python implementation.

The QL path is also exposed in an eigenvalues-only variant that skips
eigenvector accumulation; entropy evaluation only needs spectra, and
on the per-kick hot path the accumulation would dominate the entire
simulation budget.
"""

import numpy as np

from . import kernels
from .errors import NumericalConsistencyError, ResourceLimitError

MAX_DIM = 1 << 11
JACOBI_CUTOFF = 256
HERMITICITY_ATOL = 1e-8


def _checked(m):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise ResourceLimitError(
            f"matrix dimension {m.shape[0]} exceeds the {MAX_DIM} budget")
    m = m.astype(np.complex128, copy=False)
    scale = max(1.0, float(np.abs(m).max())) if m.size else 1.0
    if m.size and float(np.abs(m - m.conj().T).max()) > HERMITICITY_ATOL * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    # symmetrize so the solvers see an exactly Hermitian input
    return 0.5 * (m + m.conj().T)


def hermitian_eigendecomposition(m):
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix.

    Jacobi for dimension <= 256, Householder+QL above.  Raises
    ValueError for non-square or non-Hermitian input and
    ResourceLimitError above dimension 2**11.
    """
    a = _checked(m)
    try:
        if a.shape[0] <= JACOBI_CUTOFF:
            return kernels.jacobi_eigh(a, True)
        return kernels.eigh_ql(a, True)
    except ArithmeticError as exc:
        raise NumericalConsistencyError(str(exc)) from exc


def hermitian_eigenvalues(m):
    """Ascending eigenvalues only, via the QL path at every size.

    Used on the entropy hot path where eigenvectors are never needed.
    """
    a = _checked(m)
    try:
        w, _ = kernels.eigh_ql(a, False)
    except ArithmeticError as exc:
        raise NumericalConsistencyError(str(exc)) from exc
    return w
