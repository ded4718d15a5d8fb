# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled time-step kernels: LSTM recurrence and biquad cascade.

Same contracts as cirpeaks.kernels._pure; the recurrent matmuls go through
BLAS (scipy's cython bindings) and the gate math runs in fused C loops.
"""

import numpy as np

from libc.math cimport exp
from libc.string cimport memcpy
from scipy.linalg.cython_blas cimport dgemm

NAME = "cython"

ACT_RELU = 0
ACT_LINEAR = 1


cdef inline double _sig(double z) noexcept nogil:
    cdef double ez
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    ez = exp(z)
    return ez / (1.0 + ez)


def lstm_forward(double[:, :, ::1] zx, double[:, ::1] u, int act):
    """See cirpeaks.kernels._pure.lstm_forward."""
    cdef int B = zx.shape[0]
    cdef int T = zx.shape[1]
    cdef int H4 = zx.shape[2]
    cdef int H = H4 // 4

    hs_arr = np.empty((B, T, H))
    cs_arr = np.empty((B, T, H))
    gates_arr = np.empty((B, T, H4))
    z_arr = np.empty((B, H4))
    cdef double[:, :, ::1] hs = hs_arr
    cdef double[:, :, ::1] cs = cs_arr
    cdef double[:, :, ::1] gates = gates_arr
    cdef double[:, ::1] z = z_arr

    cdef int t, b, j
    cdef int ldh = T * H
    cdef double alpha = 1.0, beta = 1.0
    cdef double iv, fv, ov, gv, cv, av, cprev
    cdef char *tA = b"T"
    cdef char *nB = b"N"

    with nogil:
        for t in range(T):
            for b in range(B):
                memcpy(&z[b, 0], &zx[b, t, 0], H4 * sizeof(double))
            if t > 0:
                # z += h_{t-1} @ u.T  (row-major via column-major BLAS views)
                dgemm(tA, nB, &H4, &B, &H, &alpha,
                      &u[0, 0], &H, &hs[0, t - 1, 0], &ldh, &beta, &z[0, 0], &H4)
            for b in range(B):
                for j in range(H):
                    iv = _sig(z[b, j])
                    fv = _sig(z[b, H + j])
                    ov = _sig(z[b, 2 * H + j])
                    gv = z[b, 3 * H + j]
                    if act == 0 and gv < 0.0:
                        gv = 0.0
                    cprev = cs[b, t - 1, j] if t > 0 else 0.0
                    cv = fv * cprev + iv * gv
                    av = cv
                    if act == 0 and av < 0.0:
                        av = 0.0
                    hs[b, t, j] = ov * av
                    cs[b, t, j] = cv
                    gates[b, t, j] = iv
                    gates[b, t, H + j] = fv
                    gates[b, t, 2 * H + j] = ov
                    gates[b, t, 3 * H + j] = gv
    return hs_arr, cs_arr, gates_arr


def lstm_backward(double[:, :, ::1] gates, double[:, :, ::1] cs, double[:, ::1] u,
                  double[:, :, ::1] dhs, int act):
    """See cirpeaks.kernels._pure.lstm_backward."""
    cdef int B = gates.shape[0]
    cdef int T = gates.shape[1]
    cdef int H4 = gates.shape[2]
    cdef int H = H4 // 4

    dzx_arr = np.empty((B, T, H4))
    dh_arr = np.zeros((B, H))
    dc_arr = np.zeros((B, H))
    cdef double[:, :, ::1] dzx = dzx_arr
    cdef double[:, ::1] dh_rec = dh_arr
    cdef double[:, ::1] dc_rec = dc_arr

    cdef int t, b, j
    cdef int ld4 = T * H4
    cdef double alpha = 1.0, beta = 0.0
    cdef double iv, fv, ov, gv, cv, av, cprev, dh, do, da, dc, dgv
    cdef char *nA = b"N"

    with nogil:
        for t in range(T - 1, -1, -1):
            for b in range(B):
                for j in range(H):
                    iv = gates[b, t, j]
                    fv = gates[b, t, H + j]
                    ov = gates[b, t, 2 * H + j]
                    gv = gates[b, t, 3 * H + j]
                    cv = cs[b, t, j]
                    cprev = cs[b, t - 1, j] if t > 0 else 0.0
                    dh = dhs[b, t, j] + dh_rec[b, j]
                    av = cv
                    if act == 0 and av < 0.0:
                        av = 0.0
                    do = dh * av
                    da = dh * ov
                    if act == 0 and cv <= 0.0:
                        dc = dc_rec[b, j]
                    else:
                        dc = dc_rec[b, j] + da
                    dzx[b, t, j] = (dc * gv) * iv * (1.0 - iv)
                    dzx[b, t, H + j] = (dc * cprev) * fv * (1.0 - fv)
                    dzx[b, t, 2 * H + j] = do * ov * (1.0 - ov)
                    dgv = dc * iv
                    if act == 0 and gv <= 0.0:
                        dgv = 0.0
                    dzx[b, t, 3 * H + j] = dgv
                    dc_rec[b, j] = dc * fv
            # dh_rec = dzx[:, t, :] @ u
            dgemm(nA, nA, &H, &B, &H4, &alpha,
                  &u[0, 0], &H, &dzx[0, t, 0], &ld4, &beta, &dh_rec[0, 0], &H)
    return dzx_arr


def biquad_pass(double[:, ::1] sections, double[::1] x, double[:, ::1] zi):
    """See cirpeaks.kernels._pure.biquad_pass."""
    cdef int S = sections.shape[0]
    cdef int n = x.shape[0]
    y_arr = np.array(x, dtype=np.float64)
    cdef double[::1] y = y_arr
    cdef int s, idx
    cdef double b0, b1, b2, a1, a2, z1, z2, xn, yn
    with nogil:
        for s in range(S):
            b0 = sections[s, 0]
            b1 = sections[s, 1]
            b2 = sections[s, 2]
            a1 = sections[s, 3]
            a2 = sections[s, 4]
            z1 = zi[s, 0]
            z2 = zi[s, 1]
            for idx in range(n):
                xn = y[idx]
                yn = b0 * xn + z1
                z1 = b1 * xn - a1 * yn + z2
                z2 = b2 * xn - a2 * yn
                y[idx] = yn
    return y_arr
