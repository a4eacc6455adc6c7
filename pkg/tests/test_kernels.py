"""Backend equivalence: the numba kernels must match the NumPy fallback
bit for bit, and both must satisfy basic adjoint/pooling identities."""

import numpy as np
import pytest

from superchat import kernels_numpy as knp

try:
    from superchat import kernels_numba as knb

    BACKENDS = [("numpy", knp), ("numba", knb)]
except ImportError:
    knb = None
    BACKENDS = [("numpy", knp)]


def _pad(x):
    C, H, W = x.shape
    xp = np.zeros((C, H + 2, W + 2))
    xp[:, 1:-1, 1:-1] = x
    return xp


@pytest.mark.parametrize("name,mod", BACKENDS)
def test_im2col_places_patches(name, mod):
    x = np.arange(16, dtype=np.float64).reshape(1, 4, 4)
    cols = mod.im2col3x3(_pad(x))
    assert cols.shape == (9, 16)
    # center offset (1,1) reproduces the image itself
    assert (cols[4] == x.ravel()).all()


@pytest.mark.parametrize("name,mod", BACKENDS)
def test_col2im_is_adjoint_of_im2col(name, mod):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(3, 6, 6))
    cols = mod.im2col3x3(_pad(x))
    c = rng.normal(size=cols.shape)
    # <im2col(x), c> == <x_padded, col2im(c)>
    lhs = float((cols * c).sum())
    rhs = float((_pad(x) * mod.col2im3x3(c, 3, 6, 6)).sum())
    assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("name,mod", BACKENDS)
def test_maxpool_forward_and_ties(name, mod):
    x = np.array([[[1.0, 2.0], [2.0, 0.0]]])
    out, idx = mod.maxpool2_forward(x)
    assert out[0, 0, 0] == 2.0
    assert idx[0, 0, 0] == 1  # first max in (0,0),(0,1),(1,0),(1,1) order


@pytest.mark.parametrize("name,mod", BACKENDS)
def test_maxpool_backward_routes_to_winner(name, mod):
    rng = np.random.default_rng(1)
    x = rng.normal(size=(2, 4, 4))
    out, idx = mod.maxpool2_forward(x)
    d = rng.normal(size=out.shape)
    dx = mod.maxpool2_backward(d, idx)
    assert dx.shape == x.shape
    # each window receives exactly its pooled gradient, at the max position
    for c in range(2):
        for i in range(2):
            for j in range(2):
                win = dx[c, 2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
                assert np.count_nonzero(win) <= 1
                assert win.sum() == pytest.approx(d[c, i, j])
                src = x[c, 2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
                assert src.ravel()[np.abs(win).ravel().argmax()] == src.max()


@pytest.mark.skipif(knb is None, reason="numba unavailable")
def test_backends_bit_identical():
    rng = np.random.default_rng(42)
    for C, H, W in [(1, 8, 8), (3, 12, 12), (8, 28, 28)]:
        x = rng.normal(size=(C, H, W))
        xp = _pad(x)
        assert (knp.im2col3x3(xp) == knb.im2col3x3(xp)).all()
        cols = rng.normal(size=(C * 9, H * W))
        assert (knp.col2im3x3(cols, C, H, W) == knb.col2im3x3(cols, C, H, W)).all()
        o1, i1 = knp.maxpool2_forward(x)
        o2, i2 = knb.maxpool2_forward(x)
        assert (o1 == o2).all() and (i1 == i2).all()
        d = rng.normal(size=o1.shape)
        assert (knp.maxpool2_backward(d, i1) == knb.maxpool2_backward(d, i2)).all()


def test_dispatcher_exposes_backend():
    from superchat.kernels import backend_name

    assert backend_name() in ("numpy", "numba")
