# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit kernels.  Contracts match _kernels_py exactly."""

from libc.math cimport sin, cos, floor, M_PI

import numpy as np

IMPL = "cython"


cdef inline double _lift_step(double x, double omega,
                              double[::1] A, double[::1] B) nogil:
    cdef double acc = omega + x
    cdef double t
    cdef Py_ssize_t k
    for k in range(A.shape[0]):
        t = 2.0 * M_PI * (k + 1) * x
        acc += A[k] * sin(t) + B[k] * (1.0 - cos(t))
    return acc


def lift_step(double x, double omega, A, B):
    cdef double[::1] Av = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[::1] Bv = np.ascontiguousarray(B, dtype=np.float64)
    return _lift_step(x, omega, Av, Bv)


def orbit_fill(double omega, A, B, double x0, Py_ssize_t n, out):
    cdef double[::1] Av = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[::1] Bv = np.ascontiguousarray(B, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double x = x0
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            x = _lift_step(x, omega, Av, Bv)
            ov[i] = x
    return x


def orbit_delta_count(double omega, A, B, double c, double x0, Py_ssize_t n):
    cdef double[::1] Av = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[::1] Bv = np.ascontiguousarray(B, dtype=np.float64)
    cdef double x = x0
    cdef Py_ssize_t count = 0
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            if x - floor(x) < c:
                count += 1
            x = _lift_step(x, omega, Av, Bv)
    return x, count


cdef double _chain_eval(long[::1] types, double[:, ::1] coeffs,
                        long[::1] lens, double[::1] los, double[::1] his,
                        double w, double *escape) nogil:
    cdef Py_ssize_t i, j, s, nc
    cdef double lo, hi, d, t, b0, b1, b2
    for i in range(types.shape[0]):
        s = types[i]
        if s < 0:
            w = w * w * w
            continue
        lo = los[s]
        hi = his[s]
        d = lo - w
        if w - hi > d:
            d = w - hi
        if d > escape[0]:
            escape[0] = d
        if w < lo:
            w = lo
        elif w > hi:
            w = hi
        t = (2.0 * w - (lo + hi)) / (hi - lo)
        nc = lens[s]
        b1 = 0.0
        b2 = 0.0
        for j in range(nc - 1, 0, -1):
            b0 = 2.0 * t * b1 - b2 + coeffs[s, j]
            b2 = b1
            b1 = b0
        w = t * b1 - b2 + coeffs[s, 0]
    return w


def chain_eval_scalar(types, coeffs, lens, los, his, double x):
    cdef long[::1] tv = types
    cdef double[:, ::1] cv = coeffs
    cdef long[::1] lv = lens
    cdef double[::1] lov = los
    cdef double[::1] hiv = his
    cdef double escape = 0.0
    cdef double w = _chain_eval(tv, cv, lv, lov, hiv, x, &escape)
    return w, escape


def glued_orbit_count(eta_types, eta_coeffs, eta_lens, eta_los, eta_his,
                      xi_types, xi_coeffs, xi_lens, xi_los, xi_his,
                      double x0, Py_ssize_t n, double a1lo, double a1hi,
                      double a2lo, double a2hi, out=None):
    cdef long[::1] et = eta_types
    cdef double[:, ::1] ec = eta_coeffs
    cdef long[::1] el = eta_lens
    cdef double[::1] elo = eta_los
    cdef double[::1] ehi = eta_his
    cdef long[::1] xt = xi_types
    cdef double[:, ::1] xc = xi_coeffs
    cdef long[::1] xl = xi_lens
    cdef double[::1] xlo = xi_los
    cdef double[::1] xhi = xi_his
    cdef double[::1] ov
    cdef bint fill = out is not None
    if fill:
        ov = out
    cdef double x = x0
    cdef double escape = 0.0
    cdef Py_ssize_t count = 0
    cdef Py_ssize_t i
    for i in range(n):
        if (a1lo <= x < a1hi) or (a2lo <= x < a2hi):
            count += 1
        if fill:
            ov[i] = x
        if x < 0.0:
            x = _chain_eval(xt, xc, xl, xlo, xhi, x, &escape)
        x = _chain_eval(et, ec, el, elo, ehi, x, &escape)
    return x, count, escape
