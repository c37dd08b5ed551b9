# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled atom-sum kernels. Same contracts as ``_kernels_py``."""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def herglotz_atoms(const double[::1] x, const double[::1] w,
                   const double[::1] zre, const double[::1] zim):
    cdef Py_ssize_t m = zre.shape[0], n = x.shape[0], i, k
    cdef double[::1] re = np.empty(m)
    cdef double[::1] im = np.empty(m)
    cdef double d, eta, den, sr, si
    with nogil:
        for i in range(m):
            sr = 0.0
            si = 0.0
            eta = zim[i]
            for k in range(n):
                d = x[k] - zre[i]
                den = d * d + eta * eta
                sr = sr + w[k] * d / den - w[k] * x[k] / (1.0 + x[k] * x[k])
                si = si + w[k] * eta / den
            re[i] = sr
            im[i] = si
    return np.asarray(re), np.asarray(im)


def gn_atoms(const double[::1] x, const double[::1] w,
             const double[::1] lam, double eta):
    cdef Py_ssize_t m = lam.shape[0], n = x.shape[0], i, k
    cdef double[::1] out = np.empty(m)
    cdef double d, s, e2 = eta * eta
    with nogil:
        for i in range(m):
            s = 0.0
            for k in range(n):
                d = x[k] - lam[i]
                s = s + w[k] / (d * d + e2)
            out[i] = s
    return np.asarray(out)


cdef inline double _stieltjes(const double[::1] x, const double[::1] w,
                              double y) noexcept nogil:
    cdef Py_ssize_t k
    cdef double s = 0.0
    for k in range(x.shape[0]):
        s = s + w[k] / (x[k] - y)
    return s


def stieltjes_real(const double[::1] x, const double[::1] w,
                   const double[::1] y):
    cdef Py_ssize_t m = y.shape[0], i
    cdef double[::1] out = np.empty(m)
    with nogil:
        for i in range(m):
            out[i] = _stieltjes(x, w, y[i])
    return np.asarray(out)


def gn_ladder(const double[::1] x, const double[::1] w,
              const double[::1] y, int kmax):
    cdef Py_ssize_t m = y.shape[0], n = x.shape[0], i, k
    cdef int j
    cdef double[:, ::1] out = np.empty((m, kmax + 1))
    cdef double[::1] inv_n2 = 4.0 ** -np.arange(kmax + 1, dtype=np.float64)
    cdef double d2, s, e2
    with nogil:
        for i in range(m):
            for j in range(kmax + 1):
                e2 = inv_n2[j]
                s = 0.0
                for k in range(n):
                    d2 = (x[k] - y[i]) * (x[k] - y[i])
                    s = s + w[k] / (d2 + e2)
                out[i, j] = s
    return np.asarray(out)


def bisect_stieltjes(const double[::1] x, const double[::1] w,
                     const double[::1] lo_in, const double[::1] hi_in,
                     const double[::1] target, double tol, int maxiter):
    cdef Py_ssize_t m = lo_in.shape[0], i
    cdef int it
    cdef double[::1] out = np.empty(m)
    cdef double lo, hi, mid
    with nogil:
        for i in range(m):
            lo = lo_in[i]
            hi = hi_in[i]
            for it in range(maxiter):
                mid = 0.5 * (lo + hi)
                if not (hi - lo > tol and mid > lo and mid < hi):
                    break
                if _stieltjes(x, w, mid) < target[i]:
                    lo = mid
                else:
                    hi = mid
            out[i] = 0.5 * (lo + hi)
    return np.asarray(out)
