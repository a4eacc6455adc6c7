"""From-scratch convolutional classifier over chat images.

Architecture: N conv stages (3x3 same-padding conv -> ReLU -> 2x2 max
pool), a ReLU hidden layer, and a linear output layer sized to the
vocabulary. Parameters live in a single flat float32 array whose layout
is given by parameter_layout(); all arithmetic upcasts to float64 so
analytic gradients match finite differences tightly.

Pixel preprocessing is fixed: x/255, then standardized with mean 0.5 and
scale 0.5.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, LabelError, ShapeError
from .kernels import col2im3x3, im2col3x3, maxpool2_backward, maxpool2_forward

KERNEL_PX = 3  # all conv stages use 3x3 kernels

# Smallest positive double; keeps softmax outputs strictly positive even
# for logit spreads around 2e4, without disturbing the sum.
_PROB_FLOOR = 5e-324


@dataclass(frozen=True)
class ModelConfig:
    input_px: int
    input_channels: int
    conv_filters: tuple[int, ...]  # one stage per entry; pool halves each stage
    fc_width: int
    num_classes: int
    seed: int = 0

    def __post_init__(self):
        if self.num_classes < 2:
            raise ConfigError(f"num_classes must be >= 2, got {self.num_classes}")
        if not self.conv_filters:
            raise ConfigError("need at least one conv stage")
        if self.input_channels not in (1, 3):
            raise ConfigError(f"input_channels must be 1 or 3, got {self.input_channels}")
        if self.fc_width < 1:
            raise ConfigError(f"fc_width must be >= 1, got {self.fc_width}")
        object.__setattr__(self, "conv_filters", tuple(int(f) for f in self.conv_filters))
        px = self.input_px
        for i in range(len(self.conv_filters)):
            if px % 2 != 0:
                raise ConfigError(
                    f"input_px {self.input_px} not divisible by 2^{len(self.conv_filters)} "
                    f"(pool stage {i} sees odd size {px})"
                )
            px //= 2

    @property
    def final_px(self) -> int:
        return self.input_px // (2 ** len(self.conv_filters))

    @property
    def flat_dim(self) -> int:
        return self.final_px * self.final_px * self.conv_filters[-1]


def parameter_layout(config: ModelConfig) -> list[tuple[str, tuple[int, ...]]]:
    """Ordered (name, shape) table of every parameter tensor.

    The flat parameter array is the concatenation of these tensors in
    C order; the same table defines checkpoint payload order.
    """
    chans = (config.input_channels, *config.conv_filters)
    table = []
    for i, f in enumerate(config.conv_filters):
        table.append((f"conv{i}.weight", (f, chans[i], KERNEL_PX, KERNEL_PX)))
        table.append((f"conv{i}.bias", (f,)))
    table.append(("fc1.weight", (config.fc_width, config.flat_dim)))
    table.append(("fc1.bias", (config.fc_width,)))
    table.append(("out.weight", (config.num_classes, config.fc_width)))
    table.append(("out.bias", (config.num_classes,)))
    return table


def parameter_count(config: ModelConfig) -> int:
    return sum(int(np.prod(shape)) for _, shape in parameter_layout(config))


@dataclass
class ModelCheckpoint:
    config: ModelConfig
    parameters: np.ndarray  # float32, flat, parameter_layout order
    trained_examples: int
    vocab_fingerprint: str

    def __post_init__(self):
        expected = parameter_count(self.config)
        if self.parameters.shape != (expected,):
            raise ConfigError(
                f"parameter array has shape {self.parameters.shape}, "
                f"expected ({expected},)"
            )
        if self.parameters.dtype != np.float32:
            raise ConfigError("parameters must be float32")


def init_model(config: ModelConfig, vocab_fingerprint: str = "") -> ModelCheckpoint:
    """Seeded fan-in-scaled uniform init; biases start at zero."""
    rng = np.random.default_rng(config.seed)
    chans = (config.input_channels, *config.conv_filters)
    chunks = []
    for i, (name, shape) in enumerate(parameter_layout(config)):
        if name.endswith(".bias"):
            chunks.append(np.zeros(shape, dtype=np.float64))
            continue
        if name.startswith("conv"):
            stage = int(name[4:].split(".")[0])
            fan_in = chans[stage] * KERNEL_PX * KERNEL_PX
        elif name == "fc1.weight":
            fan_in = config.flat_dim
        else:
            fan_in = config.fc_width
        limit = np.sqrt(6.0 / fan_in)
        chunks.append(rng.uniform(-limit, limit, size=shape))
    flat = np.concatenate([c.ravel() for c in chunks]).astype(np.float32)
    return ModelCheckpoint(
        config=config,
        parameters=flat,
        trained_examples=0,
        vocab_fingerprint=vocab_fingerprint,
    )


_SLICE_CACHE: dict[ModelConfig, list[tuple[str, int, int, tuple[int, ...]]]] = {}


def _slices(config: ModelConfig) -> list[tuple[str, int, int, tuple[int, ...]]]:
    cached = _SLICE_CACHE.get(config)
    if cached is None:
        cached = []
        offset = 0
        for name, shape in parameter_layout(config):
            size = int(np.prod(shape))
            cached.append((name, offset, offset + size, shape))
            offset += size
        _SLICE_CACHE[config] = cached
    return cached


def _views(params: np.ndarray, config: ModelConfig) -> dict[str, np.ndarray]:
    return {
        name: params[start:stop].reshape(shape)
        for name, start, stop, shape in _slices(config)
    }


def normalize_pixels(pixels: np.ndarray, config: ModelConfig) -> np.ndarray:
    """uint8 (H, W, C) image -> float64 (C, H, W) standardized input."""
    if pixels.ndim == 2:
        pixels = pixels[:, :, None]
    h, w, c = pixels.shape
    if (h, w, c) != (config.input_px, config.input_px, config.input_channels):
        raise ShapeError(
            f"image is {h}x{w}x{c}, model expects "
            f"{config.input_px}x{config.input_px}x{config.input_channels}"
        )
    x = pixels.astype(np.float64) / 255.0
    return ((x - 0.5) / 0.5).transpose(2, 0, 1).copy()


def _forward_cached(params64: np.ndarray, config: ModelConfig, x: np.ndarray):
    """Forward pass keeping every intermediate needed by the backward pass."""
    views = _views(params64, config)
    stages = []
    for i, f in enumerate(config.conv_filters):
        C, H, W = x.shape
        xp = np.zeros((C, H + 2, W + 2), dtype=np.float64)
        xp[:, 1:-1, 1:-1] = x
        cols = im2col3x3(xp)
        w = views[f"conv{i}.weight"].reshape(f, C * 9)
        z = w @ cols + views[f"conv{i}.bias"][:, None]
        z = z.reshape(f, H, W)
        a = np.maximum(z, 0.0)
        pooled, idx = maxpool2_forward(a)
        stages.append({"cols": cols, "z": z, "idx": idx, "in_shape": (C, H, W)})
        x = pooled
    v = x.reshape(-1)
    views_fc1 = views["fc1.weight"]
    h_pre = views_fc1 @ v + views["fc1.bias"]
    h = np.maximum(h_pre, 0.0)
    logits = views["out.weight"] @ h + views["out.bias"]
    cache = {"stages": stages, "v": v, "h_pre": h_pre, "h": h, "views": views}
    return logits, cache


def forward(checkpoint: ModelCheckpoint, image) -> np.ndarray:
    """Logits over the vocabulary for one image.

    `image` is a SuperChatImage or a (H, W, C) uint8 array.
    """
    pixels = getattr(image, "pixels", image)
    x = normalize_pixels(pixels, checkpoint.config)
    params64 = checkpoint.parameters.astype(np.float64)
    logits, _ = _forward_cached(params64, checkpoint.config, x)
    return logits


def softmax(logits: np.ndarray) -> np.ndarray:
    """Max-subtracted softmax; outputs strictly positive, sum within 1e-6 of 1."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max()
    e = np.exp(shifted)
    p = e / e.sum()
    return np.maximum(p, _PROB_FLOOR)


def cross_entropy(probabilities: np.ndarray, label: int) -> float:
    if not 0 <= label < len(probabilities):
        raise LabelError(
            f"label {label} outside 0..{len(probabilities) - 1}"
        )
    return float(-np.log(probabilities[label]))


def loss_and_gradient(
    params64: np.ndarray,
    config: ModelConfig,
    x: np.ndarray,
    label: int,
    grad_out: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Cross-entropy loss and its exact gradient w.r.t. every parameter.

    `params64` is the float64 parameter vector, `x` the normalized input.
    `grad_out` may provide a reusable buffer; every element is overwritten.
    """
    logits, cache = _forward_cached(params64, config, x)
    p = softmax(logits)
    loss = cross_entropy(p, label)
    views = cache["views"]

    grad = np.empty_like(params64) if grad_out is None else grad_out
    gviews = _views(grad, config)

    dlogits = p.copy()
    dlogits[label] -= 1.0

    np.multiply(dlogits[:, None], cache["h"][None, :], out=gviews["out.weight"])
    gviews["out.bias"][:] = dlogits
    dh = views["out.weight"].T @ dlogits
    dh_pre = dh * (cache["h_pre"] > 0.0)
    np.multiply(dh_pre[:, None], cache["v"][None, :], out=gviews["fc1.weight"])
    gviews["fc1.bias"][:] = dh_pre
    dv = views["fc1.weight"].T @ dh_pre

    dx = dv.reshape(
        config.conv_filters[-1], config.final_px, config.final_px
    )
    for i in range(len(config.conv_filters) - 1, -1, -1):
        stage = cache["stages"][i]
        C, H, W = stage["in_shape"]
        f = config.conv_filters[i]
        da = maxpool2_backward(dx, stage["idx"])
        dz = da * (stage["z"] > 0.0)
        dzf = dz.reshape(f, H * W)
        np.matmul(dzf, stage["cols"].T, out=gviews[f"conv{i}.weight"].reshape(f, C * 9))
        gviews[f"conv{i}.bias"][:] = dzf.sum(axis=1)
        w = views[f"conv{i}.weight"].reshape(f, C * 9)
        dcols = w.T @ dzf
        dxp = col2im3x3(dcols, C, H, W)
        dx = dxp[:, 1:-1, 1:-1]

    return loss, grad


def backward(checkpoint: ModelCheckpoint, image, label: int) -> np.ndarray:
    """Gradient of cross_entropy(softmax(forward(image)), label)."""
    if not 0 <= label < checkpoint.config.num_classes:
        raise LabelError(
            f"label {label} outside 0..{checkpoint.config.num_classes - 1}"
        )
    pixels = getattr(image, "pixels", image)
    x = normalize_pixels(pixels, checkpoint.config)
    params64 = checkpoint.parameters.astype(np.float64)
    _, grad = loss_and_gradient(params64, checkpoint.config, x, label)
    return grad
