# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementation of the SGD kernel contract (see package docstring)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, isfinite, log


def sgd_epochs(const double[:, ::1] X, const cnp.int64_t[::1] y,
               double[:, ::1] W, double[::1] b,
               double lr, double l2, Py_ssize_t batch_size,
               const cnp.int64_t[:, ::1] order, double[::1] loss_out):
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    cdef Py_ssize_t k = W.shape[0]
    cdef Py_ssize_t epochs = order.shape[0]
    cdef Py_ssize_t e, start, stop, m, r, row, j, c, yr
    cdef Py_ssize_t step = 0
    cdef double z, mx, z_sum, logit_y, ce_sum, wsq, loss, coef, inv_m
    cdef double epoch_total

    gw_arr = np.zeros((k, d), dtype=np.float64)
    gb_arr = np.zeros(k, dtype=np.float64)
    zrow_arr = np.empty(k, dtype=np.float64)
    cdef double[:, ::1] gW = gw_arr
    cdef double[::1] gb = gb_arr
    cdef double[::1] zrow = zrow_arr

    for e in range(epochs):
        epoch_total = 0.0
        start = 0
        while start < n:
            stop = start + batch_size
            if stop > n:
                stop = n
            m = stop - start
            for j in range(k):
                gb[j] = 0.0
                for c in range(d):
                    gW[j, c] = 0.0
            ce_sum = 0.0
            for r in range(start, stop):
                row = order[e, r]
                yr = y[row]
                mx = -1e308
                for j in range(k):
                    z = b[j]
                    for c in range(d):
                        z += W[j, c] * X[row, c]
                    zrow[j] = z
                    if z > mx:
                        mx = z
                logit_y = zrow[yr]
                z_sum = 0.0
                for j in range(k):
                    z = exp(zrow[j] - mx)
                    zrow[j] = z
                    z_sum += z
                ce_sum += log(z_sum) - (logit_y - mx)
                for j in range(k):
                    coef = zrow[j] / z_sum
                    if j == yr:
                        coef -= 1.0
                    gb[j] += coef
                    for c in range(d):
                        gW[j, c] += coef * X[row, c]
            wsq = 0.0
            for j in range(k):
                for c in range(d):
                    wsq += W[j, c] * W[j, c]
            inv_m = 1.0 / m
            loss = ce_sum * inv_m + 0.5 * l2 * wsq
            if not isfinite(loss):
                return step
            epoch_total += loss * m
            for j in range(k):
                b[j] -= lr * gb[j] * inv_m
                for c in range(d):
                    W[j, c] -= lr * (gW[j, c] * inv_m + l2 * W[j, c])
            step += 1
            start = stop
        loss_out[e] = epoch_total / n
    return -1
