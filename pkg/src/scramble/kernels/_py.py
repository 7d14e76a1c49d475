"""Pure-numpy implementations of the hot kernels.

This module mirrors the compiled extension `_core` exactly; the package
selects one of the two at import time.  Everything here is written
against plain C-contiguous float64/complex128 arrays so the two
backends are drop-in replacements for each other.

Kernels
-------
apply_kick
    One period of the kicked-chain evolution applied in place to a
    state vector, using diagonal phase tables and unnormalized
    Hadamard butterflies (the 2**-n normalization is folded into the
    second phase table by the caller).
jacobi_eigh
    Cyclic-by-rows complex Hermitian Jacobi diagonalization with
    eigenvector accumulation.
eigh_ql
    Householder tridiagonalization followed by implicit-shift QL.
    Cheaper than Jacobi for large matrices and the only path that can
    skip eigenvector accumulation entirely.
"""

import math

import numpy as np

BACKEND = "python"

_EPS = np.finfo(np.float64).eps


def apply_kick(psi, zphase, xphase, n):
    """Apply one kick period in place.

    psi : complex128 array, length a multiple of 2**n; each 2**n block
        is an independent copy of the chain register (the ancilla index
        is the block index).
    zphase, xphase : complex128 arrays of length 2**n; xphase must
        already carry the 2**-n butterfly normalization.
    """
    dim = 1 << n
    blocks = psi.reshape(-1, dim)
    blocks *= zphase
    _hadamard_all(blocks, n)
    blocks *= xphase
    _hadamard_all(blocks, n)


def _hadamard_all(blocks, n):
    # unnormalized butterfly on every one of the n low bits
    m = blocks.shape[0]
    dim = 1 << n
    for k in range(n):
        view = blocks.reshape(m, dim >> (k + 1), 2, 1 << k)
        lo = view[:, :, 0, :].copy()
        hi = view[:, :, 1, :]
        view[:, :, 0, :] = lo + hi
        view[:, :, 1, :] = lo - hi


def jacobi_eigh(a, want_vectors=True, max_sweeps=60):
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns (w, v) with eigenvalues ascending; v has eigenvectors as
    columns, or is None when want_vectors is False.  Raises
    ArithmeticError if the off-diagonal norm has not converged after
    max_sweeps sweeps; the caller translates this into the package's
    consistency error.
    """
    a = np.array(a, dtype=np.complex128, order="C")
    n = a.shape[0]
    q = np.eye(n, dtype=np.complex128) if want_vectors else None
    if n > 1:
        scale = max(np.abs(a).max(), 1.0)
        for _ in range(max_sweeps):
            off = _offdiag_max(a)
            if off <= 1e-14 * scale:
                break
            for p in range(n - 1):
                for r in range(p + 1, n):
                    _jacobi_rotate(a, q, p, r)
        else:
            raise ArithmeticError(
                f"Jacobi sweep limit {max_sweeps} reached "
                f"(off-diagonal max {_offdiag_max(a):.3e})")
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    if want_vectors:
        q = np.ascontiguousarray(q[:, order])
    return w, q


def _offdiag_max(a):
    mask = ~np.eye(a.shape[0], dtype=bool)
    return np.abs(a[mask]).max() if a.shape[0] > 1 else 0.0


def _jacobi_rotate(a, q, p, r):
    apr = a[p, r]
    mag = abs(apr)
    if mag == 0.0:
        return
    # phase of the pivot; sigma solves the real 2x2 problem for |apr|
    phase = apr / mag
    theta = (a[p, p].real - a[r, r].real) / (2.0 * mag)
    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
    c = 1.0 / math.hypot(t, 1.0)
    s = t * c * phase.conjugate()
    # A <- J^H A J with J embedding [[c, -conj(s)], [s, c]] at (p, r)
    col_p = a[:, p].copy()
    col_r = a[:, r].copy()
    a[:, p] = c * col_p + s * col_r
    a[:, r] = -s.conjugate() * col_p + c * col_r
    row_p = a[p, :].copy()
    row_r = a[r, :].copy()
    a[p, :] = c * row_p + s.conjugate() * row_r
    a[r, :] = -s * row_p + c * row_r
    a[p, p] = a[p, p].real
    a[r, r] = a[r, r].real
    a[p, r] = 0.0
    a[r, p] = 0.0
    if q is not None:
        qp = q[:, p].copy()
        qr = q[:, r].copy()
        q[:, p] = c * qp + s * qr
        q[:, r] = -s.conjugate() * qp + c * qr


def eigh_ql(a, want_vectors=True, max_iter=50):
    """Householder tridiagonalization + implicit-shift QL.

    Returns (w, v) like jacobi_eigh.  Raises ArithmeticError on a QL
    iteration overflow.
    """
    a = np.array(a, dtype=np.complex128, order="C")
    n = a.shape[0]
    d, e, reflectors = _tridiagonalize(a)
    q = _form_q(reflectors, n) if want_vectors else None
    _tql2(d, e, q, max_iter)
    order = np.argsort(d, kind="stable")
    w = d[order]
    if want_vectors:
        q = np.ascontiguousarray(q[:, order])
    return w, q


def _larfg(alpha, x):
    # elementary reflector H = I - tau v v^H with v[0] = 1 mapping
    # [alpha; x] to [beta; 0], beta real
    xnorm = np.linalg.norm(x)
    if xnorm == 0.0 and alpha.imag == 0.0:
        return alpha.real, 0.0 + 0.0j, None
    beta = -math.copysign(
        math.sqrt(alpha.real**2 + alpha.imag**2 + xnorm**2), alpha.real or 1.0)
    tau = complex((beta - alpha.real) / beta, -alpha.imag / beta)
    v = np.empty(x.size + 1, dtype=np.complex128)
    v[0] = 1.0
    if x.size:
        v[1:] = x / (alpha - beta)
    return beta, tau, v


def _tridiagonalize(a):
    # reduces a (destroyed) to real symmetric tridiagonal (d, e) via a
    # unitary similarity; returns the reflector list for _form_q
    n = a.shape[0]
    e = np.zeros(max(n - 1, 0))
    reflectors = []
    for i in range(n - 1):
        alpha = complex(a[i + 1, i])
        x = a[i + 2:, i].copy()
        beta, tau, v = _larfg(alpha, x)
        e[i] = beta
        reflectors.append((tau, v))
        if tau != 0.0:
            sub = a[i + 1:, i + 1:]
            w = tau * (sub @ v)
            w -= (0.5 * tau * np.vdot(w, v)) * v
            sub -= np.outer(v, w.conj())
            sub -= np.outer(w, v.conj())
    d = np.diag(a).real.copy()
    return d, e, reflectors


def _form_q(reflectors, n):
    # Q = H(0) H(1) ... ; accumulate right-to-left so each reflector
    # only touches the trailing block
    q = np.eye(n, dtype=np.complex128)
    for i in range(len(reflectors) - 1, -1, -1):
        tau, v = reflectors[i]
        if tau == 0.0:
            continue
        sub = q[i + 1:, i + 1:]
        u = v.conj() @ sub
        sub -= tau * np.outer(v, u)
    return q


def _tql2(d, e, z, max_iter):
    # implicit-shift QL with deflation on a real symmetric tridiagonal;
    # plane rotations are mirrored onto the columns of z when given
    n = d.size
    if n <= 1:
        return
    ee = np.zeros(n)
    ee[:n - 1] = e
    # absolute deflation floor: dropping couplings below eps*|T| is
    # backward stable and unsticks exact zero-eigenvalue clusters
    floor = _EPS * max(np.abs(d).max() + np.abs(ee).max(), 1e-300)
    for l in range(n):
        niter = 0
        while True:
            m = n - 1
            for mm in range(l, n - 1):
                dd = abs(d[mm]) + abs(d[mm + 1])
                if abs(ee[mm]) <= _EPS * dd + floor:
                    m = mm
                    break
            if m == l:
                break
            niter += 1
            if niter > max_iter:
                raise ArithmeticError(
                    f"QL iteration limit {max_iter} reached at index {l}")
            g = (d[l + 1] - d[l]) / (2.0 * ee[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + ee[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * ee[i]
                b = c * ee[i]
                r = math.hypot(f, g)
                ee[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    ee[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z is not None:
                    zi = z[:, i].copy()
                    zn = z[:, i + 1].copy()
                    z[:, i + 1] = s * zi + c * zn
                    z[:, i] = c * zi - s * zn
            if underflow:
                continue
            d[l] -= p
            ee[l] = g
            ee[m] = 0.0
