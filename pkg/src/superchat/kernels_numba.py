"""Numba-jitted kernels, semantically identical to kernels_numpy.

Accumulation runs kernel-offset major so results match the NumPy path
bit for bit. cache=True persists compiled code across processes.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def im2col3x3(xp):
    C, Hp, Wp = xp.shape
    H, W = Hp - 2, Wp - 2
    cols = np.empty((C * 9, H * W), dtype=xp.dtype)
    for c in range(C):
        for k in range(9):
            di = k // 3
            dj = k % 3
            row = c * 9 + k
            for y in range(H):
                base = y * W
                for x in range(W):
                    cols[row, base + x] = xp[c, di + y, dj + x]
    return cols


@njit(cache=True)
def col2im3x3(cols, C, H, W):
    gpad = np.zeros((C, H + 2, W + 2), dtype=cols.dtype)
    for c in range(C):
        for k in range(9):
            di = k // 3
            dj = k % 3
            row = c * 9 + k
            for y in range(H):
                base = y * W
                for x in range(W):
                    gpad[c, di + y, dj + x] += cols[row, base + x]
    return gpad


@njit(cache=True)
def maxpool2_forward(x):
    C, H, W = x.shape
    H2, W2 = H // 2, W // 2
    out = np.empty((C, H2, W2), dtype=x.dtype)
    idx = np.empty((C, H2, W2), dtype=np.int64)
    for c in range(C):
        for i in range(H2):
            for j in range(W2):
                best = x[c, 2 * i, 2 * j]
                best_k = 0
                for k in range(1, 4):
                    v = x[c, 2 * i + k // 2, 2 * j + k % 2]
                    if v > best:  # strict: first maximum wins ties
                        best = v
                        best_k = k
                out[c, i, j] = best
                idx[c, i, j] = best_k
    return out, idx


@njit(cache=True)
def maxpool2_backward(dout, idx):
    C, H2, W2 = dout.shape
    dx = np.zeros((C, H2 * 2, W2 * 2), dtype=dout.dtype)
    for c in range(C):
        for i in range(H2):
            for j in range(W2):
                k = idx[c, i, j]
                dx[c, 2 * i + k // 2, 2 * j + k % 2] = dout[c, i, j]
    return dx
