# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same signatures and results as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, log, sqrt, copysign, hypot, exp, atan2, cos, sin

cnp.import_array()


def riesz_cell_matrix(x, edges, double beta):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] ev = np.ascontiguousarray(edges, dtype=np.float64)
    cdef Py_ssize_t nx = xv.shape[0], ne = ev.shape[0], i, j
    out = np.empty((nx, ne - 1), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef double u, prev, cur, inv = 1.0 / beta
    with nogil:
        for i in range(nx):
            u = xv[i] - ev[0]
            prev = copysign(pow(fabs(u), beta), u) * inv
            for j in range(ne - 1):
                u = xv[i] - ev[j + 1]
                cur = copysign(pow(fabs(u), beta), u) * inv
                ov[i, j] = prev - cur
                prev = cur
    return out


def power_gram(z, w, double alpha, Py_ssize_t nterms):
    cdef const double complex[::1] zv = np.ascontiguousarray(z, dtype=np.complex128)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t J = zv.shape[0], j, k, n
    coef_arr = (1.0 + np.arange(nterms + 1, dtype=np.float64)) ** alpha
    cdef const double[::1] coef = coef_arr
    out = np.empty((J, J), dtype=np.complex128)
    cdef double complex[:, ::1] ov = out
    cdef double complex x, term, acc
    cdef double ax, tail, c
    with nogil:
        for j in range(J):
            for k in range(j, J):
                x = zv[j] * zv[k].conjugate()
                ax = hypot(x.real, x.imag)
                term = 1.0
                acc = 0.0
                for n in range(nterms + 1):
                    c = coef[n]
                    acc = acc + c * term
                    if n % 16 == 15:
                        tail = hypot(term.real, term.imag) * ax * (c if c > 1.0 else 1.0)
                        if ax < 1.0:
                            tail = tail / (1.0 - ax)
                            if tail <= 1e-16 * (hypot(acc.real, acc.imag) + 1e-300):
                                break
                    term = term * x
                acc = acc * sqrt(wv[j] * wv[k])
                ov[j, k] = acc
                ov[k, j] = acc.conjugate()
    return out


def green_potential(z, v, rho, a):
    cdef const double complex[::1] zv = np.ascontiguousarray(z, dtype=np.complex128)
    cdef const double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef const double[::1] rv = np.ascontiguousarray(rho, dtype=np.float64)
    cdef const double complex[::1] av = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t na = av.shape[0], nz = zv.shape[0], i, j
    out = np.empty(na, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double complex aa, zz, q
    cdef double d, g, acc, r
    with nogil:
        for i in range(na):
            aa = av[i]
            acc = 0.0
            for j in range(nz):
                zz = zv[j]
                d = hypot(zz.real - aa.real, zz.imag - aa.imag)
                r = rv[j]
                if d < r:
                    g = -log(r) + 0.5 * (1.0 - (d / r) * (d / r))
                else:
                    g = -log(d)
                q = 1.0 - aa.conjugate() * zz
                g = g + log(hypot(q.real, q.imag))
                acc = acc + vv[j] * g
            ov[i] = acc
    return out


def witness_sum(z, edges, jumps, double beta):
    cdef const double complex[::1] zv = np.ascontiguousarray(z, dtype=np.complex128)
    cdef const double[::1] ev = np.ascontiguousarray(edges, dtype=np.float64)
    cdef const double[::1] jv = np.ascontiguousarray(jumps, dtype=np.float64)
    cdef Py_ssize_t nz = zv.shape[0], ne = ev.shape[0], i, j
    out = np.empty(nz, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double pr, pi, mag, ang, sr, si, m
    with nogil:
        for i in range(nz):
            sr = 0.0
            si = 0.0
            # p = -i (z - e) = Im z + i (e - Re z); Re p > 0
            pr = zv[i].imag
            for j in range(ne):
                if jv[j] == 0.0:
                    continue
                pi = ev[j] - zv[i].real
                mag = pow(pr * pr + pi * pi, 0.5 * beta)
                ang = beta * atan2(pi, pr)
                m = jv[j] * mag
                sr = sr + m * cos(ang)
                si = si + m * sin(ang)
            ov[i] = sr + 1j * si
    return out
