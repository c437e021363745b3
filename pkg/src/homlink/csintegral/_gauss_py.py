"""Vectorized integrand kernel.

Computes, per sample, prod_e 1/(4 pi r_e^2) times the determinant of
the frame-projection matrix.  Every arithmetic step (operand order,
association, guards, pivot choice) mirrors the compiled kernel exactly
so the two backends produce bit-identical output.
"""

from __future__ import annotations

import math

import numpy as np

_FOURPI = 4.0 * math.pi


def _positions(tvals, points, nseg, dirin, dirout, col_strand):
    B, Q = tvals.shape
    pos = np.empty((B, Q, 3), dtype=np.float64)
    tang = np.empty((B, Q, 3), dtype=np.float64)
    for col in range(Q):
        s = int(col_strand[col])
        k = int(nseg[s])
        halfk = k / 2.0
        t = tvals[:, col]
        u = (t + 1.0) * halfk
        j = np.floor(u)
        ji = j.astype(np.int64)
        below = ji < 0
        above = ji >= k
        jc = np.clip(ji, 0, k - 1)
        base = points[s, jc]
        diff = points[s, jc + 1] - points[s, jc]
        frac = u - jc
        pbody = base + frac[:, None] * diff
        tbody = diff * halfk
        pin = points[s, 0] + (t + 1.0)[:, None] * dirin[s]
        pout = points[s, k] + (t - 1.0)[:, None] * dirout[s]
        sel_in = below[:, None]
        sel_out = above[:, None]
        pos[:, col] = np.where(sel_in, pin, np.where(sel_out, pout, pbody))
        tang[:, col] = np.where(
            sel_in,
            np.broadcast_to(dirin[s], (B, 3)),
            np.where(sel_out, np.broadcast_to(dirout[s], (B, 3)), tbody),
        )
    return pos, tang


def kernel_block(
    tvals,
    free_pos,
    points,
    nseg,
    dirin,
    dirout,
    col_strand,
    e_tail_kind,
    e_tail_idx,
    e_head_kind,
    e_head_idx,
):
    B, Q = tvals.shape
    T = free_pos.shape[1]
    E = len(e_tail_kind)
    W = Q + 3 * T
    pos, tang = _positions(tvals, points, nseg, dirin, dirout, col_strand)

    M = np.zeros((B, 2 * E, W), dtype=np.float64)
    prod_inv = np.ones(B, dtype=np.float64)

    for e in range(E):
        tk, ti = int(e_tail_kind[e]), int(e_tail_idx[e])
        hk, hi = int(e_head_kind[e]), int(e_head_idx[e])
        xt = free_pos[:, ti] if tk else pos[:, ti]
        xh = free_pos[:, hi] if hk else pos[:, hi]
        d0 = xh[:, 0] - xt[:, 0]
        d1 = xh[:, 1] - xt[:, 1]
        d2 = xh[:, 2] - xt[:, 2]
        r2 = (d0 * d0 + d1 * d1) + d2 * d2
        zero = r2 == 0.0
        r2s = np.where(zero, 1.0, r2)
        inv = np.where(zero, 0.0, 1.0 / (_FOURPI * r2s))
        prod_inv = prod_inv * inv
        r = np.sqrt(r2s)

        a0 = np.abs(d0)
        a1 = np.abs(d1)
        a2 = np.abs(d2)
        c = np.argmin(np.stack((a0, a1, a2), axis=1), axis=1)
        is0 = c == 0
        is1 = c == 1
        w0 = np.where(is0, 0.0, np.where(is1, d2, -d1))
        w1 = np.where(is0, -d2, np.where(is1, 0.0, d0))
        w2 = np.where(is0, d1, np.where(is1, -d0, 0.0))
        wn2 = (w0 * w0 + w1 * w1) + w2 * w2
        wn = np.sqrt(np.where(wn2 == 0.0, 1.0, wn2))
        e10 = w0 / wn
        e11 = w1 / wn
        e12 = w2 / wn
        f0 = d1 * e12 - d2 * e11
        f1 = d2 * e10 - d0 * e12
        f2 = d0 * e11 - d1 * e10
        e20 = f0 / r
        e21 = f1 / r
        e22 = f2 / r

        for which, v0, v1, v2 in ((0, e10, e11, e12), (1, e20, e21, e22)):
            row = 2 * e + which
            if hk:
                base = Q + 3 * hi
                M[:, row, base] = v0
                M[:, row, base + 1] = v1
                M[:, row, base + 2] = v2
            else:
                tg = tang[:, hi]
                M[:, row, hi] = (v0 * tg[:, 0] + v1 * tg[:, 1]) + v2 * tg[:, 2]
            if tk:
                base = Q + 3 * ti
                M[:, row, base] = M[:, row, base] - v0
                M[:, row, base + 1] = M[:, row, base + 1] - v1
                M[:, row, base + 2] = M[:, row, base + 2] - v2
            else:
                tg = tang[:, ti]
                dot = (v0 * tg[:, 0] + v1 * tg[:, 1]) + v2 * tg[:, 2]
                M[:, row, ti] = M[:, row, ti] - dot

    det = np.ones(B, dtype=np.float64)
    ar = np.arange(B)
    for k in range(W):
        col = np.abs(M[:, k:, k])
        rel = np.argmax(col, axis=1)
        idx = rel + k
        swap = idx != k
        rows_k = M[ar, k, :].copy()
        M[ar, k, :] = M[ar, idx, :]
        M[ar, idx, :] = rows_k
        det = det * np.where(swap, -1.0, 1.0)
        piv = M[:, k, k].copy()
        det = det * piv
        if k + 1 < W:
            psafe = np.where(piv == 0.0, 1.0, piv)
            f = M[:, k + 1 :, k] / psafe[:, None]
            M[:, k + 1 :, k:] = M[:, k + 1 :, k:] - f[:, :, None] * M[:, k, k:][:, None, :]
    return prod_inv * det
