"""Benchmark the numba kernels against the pure NumPy fallback.

Times im2col / col2im / max-pool on desk-profile shapes and a full
training step (batch 5, desk model), verifying along the way that both
backends produce bit-identical results. If numba is unavailable the
script still runs the NumPy path and says so.

Run:

    python benchmarks/bench_kernels.py
"""

import statistics
import time

import numpy as np

from superchat import kernels_numpy as knp

try:
    from superchat import kernels_numba as knb

    HAVE_NUMBA = True
except ImportError:
    knb = None
    HAVE_NUMBA = False

# (C, H, W) per desk-model conv stage input
STAGE_SHAPES = [(1, 112, 112), (8, 56, 56), (16, 28, 28)]
REPEATS = 30


def _pad(x):
    C, H, W = x.shape
    xp = np.zeros((C, H + 2, W + 2))
    xp[:, 1:-1, 1:-1] = x
    return xp


def bench(fn, *args, repeats=REPEATS):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.mean(times), statistics.pstdev(times)


def verify_backends(rng):
    for C, H, W in STAGE_SHAPES:
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
    print("[verify] numba and NumPy kernels agree bit-exactly on all shapes")


def kernel_benchmarks(rng):
    rows = []
    for C, H, W in STAGE_SHAPES:
        x = rng.normal(size=(C, H, W))
        xp = _pad(x)
        cols = rng.normal(size=(C * 9, H * W))
        pooled, idx = knp.maxpool2_forward(x)
        d = rng.normal(size=pooled.shape)
        cases = [
            (f"im2col {C}x{H}x{W}", (xp,), "im2col3x3"),
            (f"col2im {C}x{H}x{W}", (cols, C, H, W), "col2im3x3"),
            (f"pool fwd {C}x{H}x{W}", (x,), "maxpool2_forward"),
            (f"pool bwd {C}x{H}x{W}", (d, idx), "maxpool2_backward"),
        ]
        for name, args, attr in cases:
            np_mean, np_std = bench(getattr(knp, attr), *args)
            if HAVE_NUMBA:
                getattr(knb, attr)(*args)  # warm-up / JIT compile
                nb_mean, nb_std = bench(getattr(knb, attr), *args)
            else:
                nb_mean = nb_std = None
            rows.append((name, np_mean, np_std, nb_mean, nb_std))
    return rows


def train_step_benchmark():
    """One desk-scale batch-5 gradient step through whichever backend
    superchat.kernels selected (controlled by SUPERCHAT_NUMBA)."""
    from superchat.kernels import backend_name
    from superchat.network import ModelConfig, init_model, loss_and_gradient, normalize_pixels

    cfg = ModelConfig(
        input_px=112, input_channels=1, conv_filters=(8, 16, 32),
        fc_width=128, num_classes=26, seed=0,
    )
    ck = init_model(cfg)
    rng = np.random.default_rng(0)
    batch = [
        (normalize_pixels(rng.integers(0, 256, size=(112, 112, 1), dtype=np.uint8), cfg),
         int(rng.integers(0, 26)))
        for _ in range(5)
    ]
    params = ck.parameters.astype(np.float64)
    scratch = np.empty_like(params)

    def step():
        total = np.zeros_like(params)
        for x, label in batch:
            _, g = loss_and_gradient(params, cfg, x, label, grad_out=scratch)
            total += g
        return total

    step()  # warm-up
    mean, std = bench(step, repeats=10)
    print(f"\nfull batch-5 train step [{backend_name()} backend]: "
          f"{mean * 1e3:.1f} ± {std * 1e3:.1f} ms")


def main():
    rng = np.random.default_rng(42)
    if HAVE_NUMBA:
        verify_backends(rng)
    else:
        print("[info] numba not importable; benchmarking the NumPy path only")

    rows = kernel_benchmarks(rng)
    header = f"{'kernel':24s} {'numpy (ms)':>14s} {'numba (ms)':>14s} {'speedup':>9s}"
    print("\n" + header)
    print("-" * len(header))
    for name, np_mean, np_std, nb_mean, nb_std in rows:
        np_cell = f"{np_mean * 1e3:8.3f}±{np_std * 1e3:.3f}"
        if nb_mean is not None:
            nb_cell = f"{nb_mean * 1e3:8.3f}±{nb_std * 1e3:.3f}"
            speed = f"{np_mean / nb_mean:8.2f}x"
        else:
            nb_cell, speed = "-", "-"
        print(f"{name:24s} {np_cell:>14s} {nb_cell:>14s} {speed:>9s}")

    train_step_benchmark()


if __name__ == "__main__":
    main()
