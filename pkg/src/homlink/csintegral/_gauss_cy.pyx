# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integrand kernel; arithmetic mirrors _gauss_py step for
step so both backends are bit-for-bit identical."""

import numpy as np

cimport cython
from libc.math cimport M_PI, fabs, floor, sqrt

cdef double FOURPI = 4.0 * M_PI


def kernel_block(
    double[:, ::1] tvals,
    double[:, :, ::1] free_pos,
    double[:, :, ::1] points,
    long[::1] nseg,
    double[:, ::1] dirin,
    double[:, ::1] dirout,
    long[::1] col_strand,
    long[::1] e_tail_kind,
    long[::1] e_tail_idx,
    long[::1] e_head_kind,
    long[::1] e_head_idx,
):
    cdef Py_ssize_t B = tvals.shape[0]
    cdef Py_ssize_t Q = tvals.shape[1]
    cdef Py_ssize_t T = free_pos.shape[1]
    cdef Py_ssize_t E = e_tail_kind.shape[0]
    cdef Py_ssize_t W = Q + 3 * T
    cdef Py_ssize_t R = 2 * E

    out_arr = np.empty(B, dtype=np.float64)
    cdef double[::1] out = out_arr
    pos_arr = np.empty((Q, 3), dtype=np.float64)
    tang_arr = np.empty((Q, 3), dtype=np.float64)
    M_arr = np.empty((R, W), dtype=np.float64)
    cdef double[:, ::1] pos = pos_arr
    cdef double[:, ::1] tang = tang_arr
    cdef double[:, ::1] M = M_arr

    cdef Py_ssize_t b, col, s, k, e, c, i, j, row, base, which, bi
    cdef long ji, jc, tk, ti, hk, hi
    cdef double halfk, t, tp1, u, jf, frac, d0, d1, d2, r2, inv, r
    cdef double a0, a1, a2, w0, w1, w2, wn2, wn, e10, e11, e12
    cdef double f0, f1, f2, e20, e21, e22, v0, v1, v2, dot
    cdef double xt0, xt1, xt2, xh0, xh1, xh2, prod_inv, det
    cdef double best, piv, psafe, f, tmp

    for b in range(B):
        for col in range(Q):
            s = col_strand[col]
            k = nseg[s]
            halfk = k / 2.0
            t = tvals[b, col]
            tp1 = t + 1.0
            u = tp1 * halfk
            jf = floor(u)
            ji = <long> jf
            if ji < 0:
                for c in range(3):
                    pos[col, c] = points[s, 0, c] + tp1 * dirin[s, c]
                    tang[col, c] = dirin[s, c]
            elif ji >= k:
                for c in range(3):
                    pos[col, c] = points[s, k, c] + (t - 1.0) * dirout[s, c]
                    tang[col, c] = dirout[s, c]
            else:
                jc = ji
                frac = u - jc
                for c in range(3):
                    tmp = points[s, jc + 1, c] - points[s, jc, c]
                    pos[col, c] = points[s, jc, c] + frac * tmp
                    tang[col, c] = tmp * halfk

        for row in range(R):
            for i in range(W):
                M[row, i] = 0.0
        prod_inv = 1.0

        for e in range(E):
            tk = e_tail_kind[e]
            ti = e_tail_idx[e]
            hk = e_head_kind[e]
            hi = e_head_idx[e]
            if tk:
                xt0 = free_pos[b, ti, 0]
                xt1 = free_pos[b, ti, 1]
                xt2 = free_pos[b, ti, 2]
            else:
                xt0 = pos[ti, 0]
                xt1 = pos[ti, 1]
                xt2 = pos[ti, 2]
            if hk:
                xh0 = free_pos[b, hi, 0]
                xh1 = free_pos[b, hi, 1]
                xh2 = free_pos[b, hi, 2]
            else:
                xh0 = pos[hi, 0]
                xh1 = pos[hi, 1]
                xh2 = pos[hi, 2]
            d0 = xh0 - xt0
            d1 = xh1 - xt1
            d2 = xh2 - xt2
            r2 = (d0 * d0 + d1 * d1) + d2 * d2
            if r2 == 0.0:
                inv = 0.0
                r = 1.0
            else:
                inv = 1.0 / (FOURPI * r2)
                r = sqrt(r2)
            prod_inv = prod_inv * inv

            a0 = fabs(d0)
            a1 = fabs(d1)
            a2 = fabs(d2)
            c = 0
            best = a0
            if a1 < best:
                c = 1
                best = a1
            if a2 < best:
                c = 2
            if c == 0:
                w0 = 0.0
                w1 = -d2
                w2 = d1
            elif c == 1:
                w0 = d2
                w1 = 0.0
                w2 = -d0
            else:
                w0 = -d1
                w1 = d0
                w2 = 0.0
            wn2 = (w0 * w0 + w1 * w1) + w2 * w2
            if wn2 == 0.0:
                wn = 1.0
            else:
                wn = sqrt(wn2)
            e10 = w0 / wn
            e11 = w1 / wn
            e12 = w2 / wn
            f0 = d1 * e12 - d2 * e11
            f1 = d2 * e10 - d0 * e12
            f2 = d0 * e11 - d1 * e10
            e20 = f0 / r
            e21 = f1 / r
            e22 = f2 / r

            for which in range(2):
                row = 2 * e + which
                if which == 0:
                    v0 = e10
                    v1 = e11
                    v2 = e12
                else:
                    v0 = e20
                    v1 = e21
                    v2 = e22
                if hk:
                    base = Q + 3 * hi
                    M[row, base] = v0
                    M[row, base + 1] = v1
                    M[row, base + 2] = v2
                else:
                    dot = (v0 * tang[hi, 0] + v1 * tang[hi, 1]) + v2 * tang[hi, 2]
                    M[row, hi] = dot
                if tk:
                    base = Q + 3 * ti
                    M[row, base] = M[row, base] - v0
                    M[row, base + 1] = M[row, base + 1] - v1
                    M[row, base + 2] = M[row, base + 2] - v2
                else:
                    dot = (v0 * tang[ti, 0] + v1 * tang[ti, 1]) + v2 * tang[ti, 2]
                    M[row, ti] = M[row, ti] - dot

        det = 1.0
        for k in range(W):
            bi = k
            best = fabs(M[k, k])
            for i in range(k + 1, W):
                if fabs(M[i, k]) > best:
                    best = fabs(M[i, k])
                    bi = i
            if bi != k:
                for j in range(W):
                    tmp = M[k, j]
                    M[k, j] = M[bi, j]
                    M[bi, j] = tmp
                det = det * -1.0
            piv = M[k, k]
            det = det * piv
            if k + 1 < W:
                if piv == 0.0:
                    psafe = 1.0
                else:
                    psafe = piv
                for i in range(k + 1, W):
                    f = M[i, k] / psafe
                    for j in range(k, W):
                        M[i, j] = M[i, j] - f * M[k, j]

        out[b] = prod_inv * det
    return out_arr
