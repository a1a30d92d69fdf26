# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled nodal kernels; same contract as ``_kernels_py``."""

from libc.math cimport log, M_PI

cdef double INV_8PI2 = 1.0 / (8.0 * M_PI * M_PI)
cdef double INV_4PI = 1.0 / (4.0 * M_PI)


def density(double[:, ::1] msq, double k, double mu_sq, bint dim4, double eps,
            double[:, ::1] out_b, double[:, ::1] out_sigma):
    cdef Py_ssize_t i, j, n0 = msq.shape[0], n1 = msq.shape[1]
    cdef double arg, lg, floor = eps * mu_sq, k2 = k * k
    if not dim4:
        for i in range(n0):
            for j in range(n1):
                out_b[i, j] = k * INV_4PI * (k2 + msq[i, j])
                out_sigma[i, j] = k * INV_4PI
        return -1
    for i in range(n0):
        for j in range(n1):
            arg = k2 + msq[i, j]
            if not arg > floor:
                return i * n1 + j
    for i in range(n0):
        for j in range(n1):
            arg = k2 + msq[i, j]
            lg = log(arg / mu_sq)
            out_b[i, j] = k * INV_8PI2 * arg * lg
            out_sigma[i, j] = k * INV_8PI2 * (lg + 1.0)
    return -1


def scalar_rhs(double[:, ::1] u, double hx, double hy, double k, double mu_sq, double eps,
               double[:, ::1] out_rhs, double[:, ::1] out_m1, double[:, ::1] out_m2,
               double[:, ::1] out_s1, double[:, ::1] out_s2):
    cdef Py_ssize_t i, j, n0 = u.shape[0] - 2, n1 = u.shape[1] - 2
    cdef double c, a1, a2, l1, l2, k2 = k * k, floor = eps * mu_sq
    cdef double ihx2 = 1.0 / (hx * hx), ihy2 = 1.0 / (hy * hy), pre = k * INV_8PI2
    cdef Py_ssize_t bad = -1
    for i in range(n0):
        for j in range(n1):
            c = u[i + 1, j + 1]
            out_m1[i, j] = (u[i + 2, j + 1] - 2.0 * c + u[i, j + 1]) * ihx2
            out_m2[i, j] = (u[i + 1, j + 2] - 2.0 * c + u[i + 1, j]) * ihy2
            if bad < 0 and not (k2 + out_m1[i, j] > floor and k2 + out_m2[i, j] > floor):
                bad = i * n1 + j
    if bad >= 0:
        return bad
    for i in range(n0):
        for j in range(n1):
            a1 = k2 + out_m1[i, j]
            a2 = k2 + out_m2[i, j]
            l1 = log(a1 / mu_sq)
            l2 = log(a2 / mu_sq)
            out_rhs[i, j] = pre * (a1 * l1 + a2 * l2)
            out_s1[i, j] = pre * (l1 + 1.0)
            out_s2[i, j] = pre * (l2 + 1.0)
    return -1


def mixed_difference(double[:, ::1] u, double hx, double hy, double[:, ::1] out):
    cdef Py_ssize_t i, j, n0 = u.shape[0] - 2, n1 = u.shape[1] - 2
    cdef double s = 1.0 / (4.0 * hx * hy)
    for i in range(n0):
        for j in range(n1):
            out[i, j] = (u[i + 2, j + 2] - u[i + 2, j] - u[i, j + 2] + u[i, j]) * s
