# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the hot kernels.

Drop-in replacement for `_py`; see that module for the kernel
contracts.  The state-vector kick and the eigensolvers dominate the
runtime of every sweep, so they are written as straight C loops here.
"""

import numpy as np

from libc.math cimport copysign, fabs, hypot, sqrt

BACKEND = "compiled"

cdef double MACH_EPS = 2.220446049250313e-16


def apply_kick(psi, zphase, xphase, int n):
    """Apply one kick period in place (see `_py.apply_kick`)."""
    _kick_core(psi, zphase, xphase, n)


cdef void _kick_core(double complex[::1] psi,
                     const double complex[::1] zphase,
                     const double complex[::1] xphase,
                     int n) noexcept nogil:
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t nblocks = psi.shape[0] // dim
    cdef Py_ssize_t b, base, c
    for b in range(nblocks):
        base = b * dim
        for c in range(dim):
            psi[base + c] = psi[base + c] * zphase[c]
        _hadamard_block(psi, base, dim)
        for c in range(dim):
            psi[base + c] = psi[base + c] * xphase[c]
        _hadamard_block(psi, base, dim)


cdef void _hadamard_block(double complex[::1] psi, Py_ssize_t base,
                          Py_ssize_t dim) noexcept nogil:
    # unnormalized butterfly on every bit of one 2**n block
    cdef Py_ssize_t half = 1
    cdef Py_ssize_t i, j
    cdef double complex u, v
    while half < dim:
        i = 0
        while i < dim:
            for j in range(base + i, base + i + half):
                u = psi[j]
                v = psi[j + half]
                psi[j] = u + v
                psi[j + half] = u - v
            i += 2 * half
        half <<= 1


def jacobi_eigh(a, bint want_vectors=True, int max_sweeps=60):
    """Cyclic complex Hermitian Jacobi (see `_py.jacobi_eigh`)."""
    cdef Py_ssize_t n = a.shape[0]
    am = np.array(a, dtype=np.complex128, order="C")
    if want_vectors:
        qm = np.eye(n, dtype=np.complex128)
    else:
        qm = np.zeros((1, 1), dtype=np.complex128)
    cdef int status = _jacobi_core(am, qm, want_vectors, max_sweeps)
    if status < 0:
        raise ArithmeticError(f"Jacobi sweep limit {max_sweeps} reached")
    w = np.diag(am).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    if want_vectors:
        return w, np.ascontiguousarray(qm[:, order])
    return w, None


cdef int _jacobi_core(double complex[:, ::1] a, double complex[:, ::1] q,
                      bint want_q, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, r, k
    cdef int sweep
    cdef double scale, off, mag, theta, t, c
    cdef double complex apr, phase, s, xp, xr
    if n <= 1:
        return 0
    scale = 1.0
    for p in range(n):
        for r in range(n):
            mag = abs(a[p, r])
            if mag > scale:
                scale = mag
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for r in range(p + 1, n):
                mag = abs(a[p, r])
                if mag > off:
                    off = mag
        if off <= 1e-14 * scale:
            return sweep
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                mag = abs(apr)
                if mag == 0.0:
                    continue
                phase = apr / mag
                theta = (a[p, p].real - a[r, r].real) / (2.0 * mag)
                t = copysign(1.0, theta) / (fabs(theta) + hypot(theta, 1.0))
                c = 1.0 / hypot(t, 1.0)
                s = t * c * phase.conjugate()
                for k in range(n):
                    xp = a[k, p]
                    xr = a[k, r]
                    a[k, p] = c * xp + s * xr
                    a[k, r] = -s.conjugate() * xp + c * xr
                for k in range(n):
                    xp = a[p, k]
                    xr = a[r, k]
                    a[p, k] = c * xp + s.conjugate() * xr
                    a[r, k] = -s * xp + c * xr
                a[p, p] = a[p, p].real
                a[r, r] = a[r, r].real
                a[p, r] = 0.0
                a[r, p] = 0.0
                if want_q:
                    for k in range(n):
                        xp = q[k, p]
                        xr = q[k, r]
                        q[k, p] = c * xp + s * xr
                        q[k, r] = -s.conjugate() * xp + c * xr
    off = 0.0
    for p in range(n):
        for r in range(p + 1, n):
            mag = abs(a[p, r])
            if mag > off:
                off = mag
    if off <= 1e-14 * scale:
        return max_sweeps
    return -1


def eigh_ql(a, bint want_vectors=True, int max_iter=50):
    """Householder tridiagonalization + QL (see `_py.eigh_ql`)."""
    cdef Py_ssize_t n = a.shape[0]
    am = np.array(a, dtype=np.complex128, order="C")
    d = np.empty(n, dtype=np.float64)
    e = np.zeros(n, dtype=np.float64)
    taus = np.zeros(n, dtype=np.complex128)
    work = np.empty(n, dtype=np.complex128)
    if n > 0:
        _tridiag_core(am, d, e, taus, work)
    if want_vectors:
        qm = np.eye(n, dtype=np.complex128)
        _formq_core(am, taus, qm, work)
    else:
        qm = np.zeros((0, 0), dtype=np.complex128)
    cdef int status = _tql2_core(d, e, qm, want_vectors, max_iter)
    if status < 0:
        raise ArithmeticError(f"QL iteration limit {max_iter} reached")
    order = np.argsort(d, kind="stable")
    w = d[order]
    if want_vectors:
        return w, np.ascontiguousarray(qm[:, order])
    return w, None


cdef void _tridiag_core(double complex[:, ::1] a, double[::1] d,
                        double[::1] e, double complex[::1] taus,
                        double complex[::1] work) noexcept nogil:
    # zhetd2-style reduction; reflector vectors stay in the strict
    # lower part of column i (v[0] = 1 implicit), betas in e
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double xnorm2, beta, sign_src
    cdef double complex alpha, tau, tmp, wdotv, vj
    for i in range(n - 1):
        alpha = a[i + 1, i]
        xnorm2 = 0.0
        for k in range(i + 2, n):
            xnorm2 += a[k, i].real * a[k, i].real + a[k, i].imag * a[k, i].imag
        if xnorm2 == 0.0 and alpha.imag == 0.0:
            beta = alpha.real
            tau = 0.0
        else:
            sign_src = alpha.real
            if sign_src == 0.0:
                sign_src = 1.0
            beta = -copysign(
                sqrt(alpha.real * alpha.real + alpha.imag * alpha.imag
                     + xnorm2), sign_src)
            tau = ((beta - alpha.real) / beta) - (alpha.imag / beta) * 1j
            tmp = alpha - beta
            for k in range(i + 2, n):
                a[k, i] = a[k, i] / tmp
        e[i] = beta
        taus[i] = tau
        if tau != 0.0:
            for j in range(i + 1, n):
                tmp = a[j, i + 1]
                for k in range(i + 2, n):
                    tmp = tmp + a[j, k] * a[k, i]
                work[j] = tau * tmp
            wdotv = work[i + 1].conjugate()
            for k in range(i + 2, n):
                wdotv = wdotv + work[k].conjugate() * a[k, i]
            tmp = 0.5 * tau * wdotv
            work[i + 1] = work[i + 1] - tmp
            for k in range(i + 2, n):
                work[k] = work[k] - tmp * a[k, i]
            for j in range(i + 1, n):
                if j == i + 1:
                    vj = 1.0
                else:
                    vj = a[j, i]
                for k in range(i + 1, n):
                    if k == i + 1:
                        tmp = 1.0
                    else:
                        tmp = a[k, i]
                    a[j, k] = (a[j, k] - vj * work[k].conjugate()
                               - work[j] * tmp.conjugate())
    for i in range(n):
        d[i] = a[i, i].real


cdef void _formq_core(double complex[:, ::1] a, double complex[::1] taus,
                      double complex[:, ::1] q,
                      double complex[::1] work) noexcept nogil:
    # Q = H(0) H(1) ... accumulated right-to-left on the trailing block
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, row, col, k
    cdef double complex tau, tmp, vj
    for i in range(n - 2, -1, -1):
        tau = taus[i]
        if tau == 0.0:
            continue
        for col in range(i + 1, n):
            tmp = q[i + 1, col]
            for k in range(i + 2, n):
                tmp = tmp + a[k, i].conjugate() * q[k, col]
            work[col] = tmp
        for row in range(i + 1, n):
            if row == i + 1:
                vj = 1.0
            else:
                vj = a[row, i]
            for col in range(i + 1, n):
                q[row, col] = q[row, col] - tau * vj * work[col]


cdef int _tql2_core(double[::1] d, double[::1] ee, double complex[:, ::1] z,
                    bint want_z, int max_iter) noexcept nogil:
    # implicit-shift QL with deflation; ee has length n with ee[n-1]
    # unused as scratch tail
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t l, m, mm, i, k
    cdef int niter
    cdef double dd, g, r, s, c, p, f, b, floor
    cdef double complex zi, zn
    cdef bint underflow
    if n <= 1:
        return 0
    ee[n - 1] = 0.0
    # absolute deflation floor: dropping couplings below eps*|T| is
    # backward stable and unsticks exact zero-eigenvalue clusters
    floor = 0.0
    for mm in range(n):
        dd = fabs(d[mm]) + fabs(ee[mm])
        if dd > floor:
            floor = dd
    floor = MACH_EPS * (floor if floor > 1e-300 else 1e-300)
    for l in range(n):
        niter = 0
        while True:
            m = n - 1
            for mm in range(l, n - 1):
                dd = fabs(d[mm]) + fabs(d[mm + 1])
                if fabs(ee[mm]) <= MACH_EPS * dd + floor:
                    m = mm
                    break
            if m == l:
                break
            niter += 1
            if niter > max_iter:
                return -1
            g = (d[l + 1] - d[l]) / (2.0 * ee[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + ee[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * ee[i]
                b = c * ee[i]
                r = hypot(f, g)
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
                if want_z:
                    for k in range(z.shape[0]):
                        zi = z[k, i]
                        zn = z[k, i + 1]
                        z[k, i + 1] = s * zi + c * zn
                        z[k, i] = c * zi - s * zn
            if underflow:
                continue
            d[l] -= p
            ee[l] = g
            ee[m] = 0.0
    return 0
