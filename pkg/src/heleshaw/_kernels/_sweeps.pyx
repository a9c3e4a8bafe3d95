# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled red-black PSOR sweeps for 2D and 3D grids.

Same per-node arithmetic (and association order) as numpy_backend, so
both backends produce identical iterates.
"""

import numpy as np

name = "cython"


def psor_halfsweep(w, b, mask, double omega, bint project):
    m = mask.view(np.uint8)
    if w.ndim == 2:
        _halfsweep_2d(w, b, m, omega, project)
    elif w.ndim == 3:
        _halfsweep_3d(w, b, m, omega, project)
    else:
        raise ValueError("compiled backend supports ndim 2 or 3")


def residual_stats(w, f, free, double h2):
    m = free.view(np.uint8)
    if w.ndim == 2:
        return _residuals_2d(w, f, m, h2)
    elif w.ndim == 3:
        return _residuals_3d(w, f, m, h2)
    raise ValueError("compiled backend supports ndim 2 or 3")


cdef void _halfsweep_2d(double[:, ::1] w, double[:, ::1] b,
                        unsigned char[:, ::1] mask, double omega,
                        bint project) noexcept nogil:
    cdef Py_ssize_t n0 = w.shape[0], n1 = w.shape[1], i, j
    cdef double s, cand
    cdef double om1 = 1.0 - omega
    cdef double inv2n = 1.0 / 4.0
    for i in range(1, n0 - 1):
        for j in range(1, n1 - 1):
            if mask[i, j]:
                s = (w[i - 1, j] + w[i + 1, j]) + (w[i, j - 1] + w[i, j + 1])
                cand = om1 * w[i, j] + omega * ((s + b[i, j]) * inv2n)
                if project and cand < 0.0:
                    cand = 0.0
                w[i, j] = cand


cdef void _halfsweep_3d(double[:, :, ::1] w, double[:, :, ::1] b,
                        unsigned char[:, :, ::1] mask, double omega,
                        bint project) noexcept nogil:
    cdef Py_ssize_t n0 = w.shape[0], n1 = w.shape[1], n2 = w.shape[2], i, j, k
    cdef double s, cand
    cdef double om1 = 1.0 - omega
    cdef double inv2n = 1.0 / 6.0
    for i in range(1, n0 - 1):
        for j in range(1, n1 - 1):
            for k in range(1, n2 - 1):
                if mask[i, j, k]:
                    s = ((w[i - 1, j, k] + w[i + 1, j, k])
                         + (w[i, j - 1, k] + w[i, j + 1, k])) \
                        + (w[i, j, k - 1] + w[i, j, k + 1])
                    cand = om1 * w[i, j, k] + omega * ((s + b[i, j, k]) * inv2n)
                    if project and cand < 0.0:
                        cand = 0.0
                    w[i, j, k] = cand


cdef tuple _residuals_2d(double[:, ::1] w, double[:, ::1] f,
                         unsigned char[:, ::1] free, double h2):
    cdef Py_ssize_t n0 = w.shape[0], n1 = w.shape[1], i, j
    cdef double s, r, mn
    cdef double pde = 0.0, comp = 0.0, absr = 0.0
    cdef bint seen = False
    with nogil:
        for i in range(1, n0 - 1):
            for j in range(1, n1 - 1):
                if free[i, j]:
                    seen = True
                    s = (w[i - 1, j] + w[i + 1, j]) + (w[i, j - 1] + w[i, j + 1])
                    r = (4.0 * w[i, j] - s) / h2 - f[i, j]
                    if -r > pde:
                        pde = -r
                    mn = w[i, j] if w[i, j] < r else r
                    if mn > comp:
                        comp = mn
                    if r < 0.0:
                        r = -r
                    if r > absr:
                        absr = r
    if not seen:
        return 0.0, 0.0, 0.0
    return pde, comp, absr


cdef tuple _residuals_3d(double[:, :, ::1] w, double[:, :, ::1] f,
                         unsigned char[:, :, ::1] free, double h2):
    cdef Py_ssize_t n0 = w.shape[0], n1 = w.shape[1], n2 = w.shape[2], i, j, k
    cdef double s, r, mn
    cdef double pde = 0.0, comp = 0.0, absr = 0.0
    cdef bint seen = False
    with nogil:
        for i in range(1, n0 - 1):
            for j in range(1, n1 - 1):
                for k in range(1, n2 - 1):
                    if free[i, j, k]:
                        seen = True
                        s = ((w[i - 1, j, k] + w[i + 1, j, k])
                             + (w[i, j - 1, k] + w[i, j + 1, k])) \
                            + (w[i, j, k - 1] + w[i, j, k + 1])
                        r = (6.0 * w[i, j, k] - s) / h2 - f[i, j, k]
                        if -r > pde:
                            pde = -r
                        mn = w[i, j, k] if w[i, j, k] < r else r
                        if mn > comp:
                            comp = mn
                        if r < 0.0:
                            r = -r
                        if r > absr:
                            absr = r
    if not seen:
        return 0.0, 0.0, 0.0
    return pde, comp, absr
