"""Pure NumPy kernels: patch extraction/scatter for 3x3 convolutions and
2x2 max pooling.

These are the fallback path when numba is unavailable or disabled. Both
paths accumulate in the same per-element order (kernel-offset major), so
they produce bit-identical results; the conv matmuls themselves run
through BLAS in network.py regardless of the kernel path.
"""

import numpy as np


def im2col3x3(xp: np.ndarray) -> np.ndarray:
    """(C, H+2, W+2) padded image -> (C*9, H*W) patch matrix.

    Row (c*9 + 3*di + dj) holds the input channel c shifted by the kernel
    offset (di, dj), matching a (out, C, 3, 3) weight tensor flattened in
    C order.
    """
    C, Hp, Wp = xp.shape
    H, W = Hp - 2, Wp - 2
    cols = np.empty((C, 9, H * W), dtype=xp.dtype)
    for di in range(3):
        for dj in range(3):
            cols[:, 3 * di + dj, :] = xp[:, di : di + H, dj : dj + W].reshape(C, H * W)
    return cols.reshape(C * 9, H * W)


def col2im3x3(cols: np.ndarray, C: int, H: int, W: int) -> np.ndarray:
    """Adjoint of im2col3x3: scatter-add patches back to a padded (C, H+2, W+2) grid."""
    gpad = np.zeros((C, H + 2, W + 2), dtype=cols.dtype)
    view = cols.reshape(C, 9, H, W)
    for k in range(9):
        di, dj = divmod(k, 3)
        gpad[:, di : di + H, dj : dj + W] += view[:, k]
    return gpad


def maxpool2_forward(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """2x2/stride-2 max pool. Returns (pooled, argmax index in 0..3).

    Ties select the first maximum in (0,0), (0,1), (1,0), (1,1) order.
    """
    C, H, W = x.shape
    H2, W2 = H // 2, W // 2
    windows = (
        x.reshape(C, H2, 2, W2, 2).transpose(0, 1, 3, 2, 4).reshape(C, H2, W2, 4)
    )
    idx = windows.argmax(axis=3)
    out = np.take_along_axis(windows, idx[..., None], axis=3)[..., 0]
    return out, idx.astype(np.int64)


def maxpool2_backward(dout: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Route pooled gradients back to the winning positions."""
    C, H2, W2 = dout.shape
    dwin = np.zeros((C, H2, W2, 4), dtype=dout.dtype)
    np.put_along_axis(dwin, idx[..., None], dout[..., None], axis=3)
    return (
        dwin.reshape(C, H2, W2, 2, 2)
        .transpose(0, 1, 3, 2, 4)
        .reshape(C, H2 * 2, W2 * 2)
    )
