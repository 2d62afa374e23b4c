# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled GRU recurrence. Same contract as ``_gru_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport tanh

cnp.import_array()


cdef inline double _sigmoid(double x) nogil:
    return 0.5 * (tanh(0.5 * x) + 1.0)


def gru_forward(double[:, ::1] gx, double[:, ::1] w_h, double[::1] b_h):
    cdef Py_ssize_t length = gx.shape[0]
    cdef Py_ssize_t h = w_h.shape[0]
    cdef Py_ssize_t t, i, k
    cdef double acc_r, acc_z, acc_n, hp
    hs_arr = np.zeros((length + 1, h))
    r_arr = np.empty((length, h))
    z_arr = np.empty((length, h))
    n_arr = np.empty((length, h))
    ghn_arr = np.empty((length, h))
    cdef double[:, ::1] hs = hs_arr
    cdef double[:, ::1] r = r_arr
    cdef double[:, ::1] z = z_arr
    cdef double[:, ::1] n = n_arr
    cdef double[:, ::1] ghn = ghn_arr
    with nogil:
        for t in range(length):
            for i in range(h):
                acc_r = b_h[i]
                acc_z = b_h[h + i]
                acc_n = b_h[2 * h + i]
                for k in range(h):
                    hp = hs[t, k]
                    acc_r = acc_r + hp * w_h[k, i]
                    acc_z = acc_z + hp * w_h[k, h + i]
                    acc_n = acc_n + hp * w_h[k, 2 * h + i]
                r[t, i] = _sigmoid(gx[t, i] + acc_r)
                z[t, i] = _sigmoid(gx[t, h + i] + acc_z)
                ghn[t, i] = acc_n
                n[t, i] = tanh(gx[t, 2 * h + i] + r[t, i] * acc_n)
            for i in range(h):
                hs[t + 1, i] = (1.0 - z[t, i]) * n[t, i] + z[t, i] * hs[t, i]
    return hs_arr, r_arr, z_arr, n_arr, ghn_arr


def gru_backward(double[:, ::1] dout, double[:, ::1] hs, double[:, ::1] r,
                 double[:, ::1] z, double[:, ::1] n, double[:, ::1] ghn,
                 double[:, ::1] w_h):
    cdef Py_ssize_t length = dout.shape[0]
    cdef Py_ssize_t h = dout.shape[1]
    cdef Py_ssize_t t, i, k, j
    cdef double dh, dn, dz, acc
    dgx_arr = np.zeros((length, 3 * h))
    dw_arr = np.zeros((h, 3 * h))
    db_arr = np.zeros(3 * h)
    cdef double[:, ::1] dgx = dgx_arr
    cdef double[:, ::1] dw_h = dw_arr
    cdef double[::1] db_h = db_arr
    cdef double[::1] dh_next = np.zeros(h)
    cdef double[::1] dh_cur = np.zeros(h)
    cdef double[::1] dgh = np.zeros(3 * h)
    with nogil:
        for t in range(length - 1, -1, -1):
            for i in range(h):
                dh = dout[t, i] + dh_next[i]
                dh_cur[i] = dh
                dn = dh * (1.0 - z[t, i])
                dz = dh * (hs[t, i] - n[t, i])
                dgx[t, 2 * h + i] = dn * (1.0 - n[t, i] * n[t, i])
                dgx[t, i] = dgx[t, 2 * h + i] * ghn[t, i] * r[t, i] * (1.0 - r[t, i])
                dgx[t, h + i] = dz * z[t, i] * (1.0 - z[t, i])
                dgh[i] = dgx[t, i]
                dgh[h + i] = dgx[t, h + i]
                dgh[2 * h + i] = dgx[t, 2 * h + i] * r[t, i]
            for j in range(3 * h):
                db_h[j] += dgh[j]
            for k in range(h):
                for j in range(3 * h):
                    dw_h[k, j] += hs[t, k] * dgh[j]
                acc = dh_cur[k] * z[t, k]
                for j in range(3 * h):
                    acc = acc + dgh[j] * w_h[k, j]
                dh_next[k] = acc
    return dgx_arr, dw_arr, db_arr
