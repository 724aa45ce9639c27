# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for truncated multivariate Taylor arithmetic.

Both kernels work on batches: row ``k`` of every 2-d argument is one jet,
stored as its Taylor coefficients in graded monomial order.  The product
table ``(ia, ib, ic)`` lists every pair of monomials whose product survives
truncation, sorted by output index.
"""
import numpy as np

ctypedef fused scalar_t:
    double
    double complex


def mul(const scalar_t[:, ::1] a, const scalar_t[:, ::1] b,
        const int[::1] ia, const int[::1] ib, const int[::1] ic, int ncoef):
    """Row-wise truncated product of two coefficient batches."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = ia.shape[0]
    cdef Py_ssize_t k, t
    if scalar_t is double:
        out = np.zeros((n, ncoef), dtype=np.float64)
    else:
        out = np.zeros((n, ncoef), dtype=np.complex128)
    cdef scalar_t[:, ::1] o = out
    with nogil:
        for k in range(n):
            for t in range(m):
                o[k, ic[t]] += a[k, ia[t]] * b[k, ib[t]]
    return out


def compose(const scalar_t[:, ::1] h, const scalar_t[:, ::1] g,
            const int[::1] ia, const int[::1] ib, const int[::1] ic):
    """Evaluate ``sum_j g[:, j] * h**j`` by Horner's rule.

    ``h`` must have a zero constant term (the nilpotent part of the inner
    jet); ``g`` holds the outer function's Taylor coefficients per row.
    """
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t nc = h.shape[1]
    cdef Py_ssize_t kmax = g.shape[1] - 1
    cdef Py_ssize_t m = ia.shape[0]
    cdef Py_ssize_t k, t, c, j
    if scalar_t is double:
        out = np.zeros((n, nc), dtype=np.float64)
        tmp_arr = np.zeros(nc, dtype=np.float64)
    else:
        out = np.zeros((n, nc), dtype=np.complex128)
        tmp_arr = np.zeros(nc, dtype=np.complex128)
    cdef scalar_t[:, ::1] o = out
    cdef scalar_t[::1] tmp = tmp_arr
    with nogil:
        for k in range(n):
            o[k, 0] = g[k, kmax]
            for j in range(kmax - 1, -1, -1):
                for c in range(nc):
                    tmp[c] = 0
                for t in range(m):
                    tmp[ic[t]] += o[k, ia[t]] * h[k, ib[t]]
                for c in range(nc):
                    o[k, c] = tmp[c]
                o[k, 0] += g[k, j]
    return out
