# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled LSTM recurrence and LCS kernels.

Same contracts as ``_pykernels``. Recurrent products go through BLAS dgemv;
row-major ``w_h`` (H, 4H) is read as a column-major (4H, H) matrix.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, tanh
from scipy.linalg.cython_blas cimport dgemv

cnp.import_array()


cdef inline double _sigmoid(double x) noexcept nogil:
    cdef double e
    if x >= 0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


def lstm_forward(const double[:, ::1] pre, const double[:, ::1] w_h,
                 const double[::1] h0, const double[::1] c0):
    cdef Py_ssize_t steps = pre.shape[0]
    cdef int hidden = <int>w_h.shape[0]
    cdef int four_h = 4 * hidden
    hs_arr = np.empty((steps, hidden))
    cs_arr = np.empty((steps, hidden))
    gates_arr = np.empty((steps, four_h))
    z_arr = np.empty(four_h)
    h_arr = np.array(h0, dtype=np.float64)
    cdef double[:, ::1] hs = hs_arr
    cdef double[:, ::1] cs = cs_arr
    cdef double[:, ::1] gates = gates_arr
    cdef double[::1] z = z_arr
    cdef double[::1] h = h_arr
    cdef Py_ssize_t t, k
    cdef double one = 1.0, c_prev, i, f, o, g, c
    cdef int inc = 1
    cdef char trans = b'N'
    with nogil:
        for t in range(steps):
            for k in range(four_h):
                z[k] = pre[t, k]
            dgemv(&trans, &four_h, &hidden, &one, <double*>&w_h[0, 0], &four_h,
                  &h[0], &inc, &one, &z[0], &inc)
            for k in range(hidden):
                i = _sigmoid(z[k])
                f = _sigmoid(z[hidden + k])
                o = _sigmoid(z[2 * hidden + k])
                g = tanh(z[3 * hidden + k])
                c_prev = cs[t - 1, k] if t > 0 else c0[k]
                c = f * c_prev + i * g
                cs[t, k] = c
                h[k] = o * tanh(c)
                hs[t, k] = h[k]
                gates[t, k] = i
                gates[t, hidden + k] = f
                gates[t, 2 * hidden + k] = o
                gates[t, 3 * hidden + k] = g
    return hs_arr, cs_arr, gates_arr


def lstm_backward(const double[:, ::1] d_hs, const double[:, ::1] w_h,
                  const double[::1] c0, const double[:, ::1] cs,
                  const double[:, ::1] gates):
    cdef Py_ssize_t steps = d_hs.shape[0]
    cdef int hidden = <int>w_h.shape[0]
    cdef int four_h = 4 * hidden
    d_pre_arr = np.empty((steps, four_h))
    dh_arr = np.zeros(hidden)
    dc_arr = np.zeros(hidden)
    cdef double[:, ::1] d_pre = d_pre_arr
    cdef double[::1] dh_next = dh_arr
    cdef double[::1] dc_next = dc_arr
    cdef Py_ssize_t t, k
    cdef double one = 1.0, zero = 0.0
    cdef double i, f, o, g, tc, dh, dc, c_prev
    cdef int inc = 1
    cdef char trans = b'T'
    with nogil:
        for t in range(steps - 1, -1, -1):
            for k in range(hidden):
                i = gates[t, k]
                f = gates[t, hidden + k]
                o = gates[t, 2 * hidden + k]
                g = gates[t, 3 * hidden + k]
                c_prev = cs[t - 1, k] if t > 0 else c0[k]
                tc = tanh(cs[t, k])
                dh = d_hs[t, k] + dh_next[k]
                dc = dc_next[k] + dh * o * (1.0 - tc * tc)
                d_pre[t, k] = dc * g * i * (1.0 - i)
                d_pre[t, hidden + k] = dc * c_prev * f * (1.0 - f)
                d_pre[t, 2 * hidden + k] = dh * tc * o * (1.0 - o)
                d_pre[t, 3 * hidden + k] = dc * i * (1.0 - g * g)
                dc_next[k] = dc * f
            dgemv(&trans, &four_h, &hidden, &one, <double*>&w_h[0, 0], &four_h,
                  &d_pre[t, 0], &inc, &zero, &dh_next[0], &inc)
    return d_pre_arr, dh_arr, dc_arr


def lcs_length(a, b):
    cdef cnp.int64_t[::1] xa = np.ascontiguousarray(a, dtype=np.int64)
    cdef cnp.int64_t[::1] xb = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t n = xa.shape[0], m = xb.shape[0], i, j
    if n == 0 or m == 0:
        return 0
    prev_arr = np.zeros(m + 1, dtype=np.int64)
    cur_arr = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] prev = prev_arr
    cdef cnp.int64_t[::1] cur = cur_arr
    cdef cnp.int64_t[::1] tmp
    for i in range(n):
        cur[0] = 0
        for j in range(m):
            if xa[i] == xb[j]:
                cur[j + 1] = prev[j] + 1
            elif prev[j + 1] >= cur[j]:
                cur[j + 1] = prev[j + 1]
            else:
                cur[j + 1] = cur[j]
        tmp = prev
        prev = cur
        cur = tmp
    return int(prev[m])
