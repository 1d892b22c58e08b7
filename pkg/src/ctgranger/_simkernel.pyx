# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loop of the lagged linear recursion used by ``ctgranger.sim``."""
from libc.math cimport fabs


def recursion(double[:, ::1] x, Py_ssize_t[::1] lags, double[:, :, ::1] mats,
              double[:, ::1] noise, Py_ssize_t start, double limit):
    """Fill ``x[start:]`` in place with x_k = Σ_j M_j x_{k-lag_j} + noise_k.

    Returns the first row whose magnitude exceeds ``limit``, or -1.
    """
    cdef Py_ssize_t n_rows = x.shape[0], n = x.shape[1], n_lags = lags.shape[0]
    cdef Py_ssize_t k, i, j, l, row
    cdef double acc
    cdef Py_ssize_t bad = -1
    with nogil:
        for k in range(start, n_rows):
            for i in range(n):
                acc = noise[k, i]
                for j in range(n_lags):
                    row = k - lags[j]
                    for l in range(n):
                        acc = acc + mats[j, i, l] * x[row, l]
                x[k, i] = acc
                if not fabs(acc) <= limit:
                    bad = k
            if bad >= 0:
                break
    return bad
