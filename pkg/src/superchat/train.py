"""SGD-with-momentum training over manifest examples.

Images are materialized on the fly from (pair_id, prefix_len) through a
RenderContext with a small LRU cache; nothing rendered is ever persisted.
Batch gradients are accumulated in batch order and epoch order is a
seeded permutation, so a (seed, config, data) triple fully determines the
final parameters.
"""

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .corpus import DialoguePair, TrainingExample, Vocabulary
from .errors import DataError, VocabMismatchError
from .glyphs import GlyphSource
from .layout import LayoutConfig
from .network import ModelCheckpoint, loss_and_gradient, normalize_pixels
from .render import render


class RenderContext:
    """Renders (pair_id, prefix_len) examples to pixel arrays, with caching."""

    def __init__(
        self,
        layout: LayoutConfig,
        glyphs: GlyphSource,
        pairs: list[DialoguePair],
        vocab: Vocabulary,
        cache_size: int = 4096,
    ):
        self.layout = layout
        self.glyphs = glyphs
        self.vocab = vocab
        self.pairs_by_id = {p.pair_id: p for p in pairs}
        self._cache: OrderedDict[tuple[int, int], np.ndarray] = OrderedDict()
        self._cache_size = cache_size

    def pair(self, pair_id: int) -> DialoguePair:
        return self.pairs_by_id[pair_id]

    def image_for(self, pair_id: int, prefix_len: int) -> np.ndarray:
        key = (pair_id, prefix_len)
        cached = self._cache.get(key)
        if cached is not None:
            self._cache.move_to_end(key)
            return cached
        pair = self.pairs_by_id[pair_id]
        pixels = render(
            self.layout, self.glyphs, pair.input, pair.response[:prefix_len]
        ).pixels
        self._cache[key] = pixels
        if len(self._cache) > self._cache_size:
            self._cache.popitem(last=False)
        return pixels


@dataclass
class Hyperparams:
    batch_size: int = 5
    learning_rate: float = 0.005
    momentum: float = 0.9
    epochs: int = 10
    seed: int = 0
    # Plumbing beyond the core optimizer knobs:
    max_iterations: int | None = None
    eval_interval: int | None = 500  # learning-curve sampling; None disables
    stop_train_accuracy: float | None = None
    accuracy_check_interval: int = 100

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")


def _check_fingerprint(checkpoint: ModelCheckpoint, ctx: RenderContext) -> None:
    have = ctx.vocab.fingerprint()
    if checkpoint.vocab_fingerprint and checkpoint.vocab_fingerprint != have:
        raise VocabMismatchError(
            f"checkpoint vocabulary fingerprint {checkpoint.vocab_fingerprint} "
            f"does not match manifest vocabulary {have}"
        )


def sum_gradients(
    params64: np.ndarray,
    checkpoint: ModelCheckpoint,
    ctx: RenderContext,
    batch: list[TrainingExample],
    scratch: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Summed loss and gradient over a batch, accumulated in batch order."""
    total = np.zeros_like(params64)
    scratch = np.empty_like(params64) if scratch is None else scratch
    loss_sum = 0.0
    for ex in batch:
        x = normalize_pixels(ctx.image_for(ex.pair_id, ex.prefix_len), checkpoint.config)
        loss, grad = loss_and_gradient(
            params64, checkpoint.config, x, ex.label, grad_out=scratch
        )
        total += grad
        loss_sum += loss
    return loss_sum, total


def _accuracy(
    params64: np.ndarray,
    checkpoint: ModelCheckpoint,
    ctx: RenderContext,
    examples: list[TrainingExample],
) -> float:
    from .network import _forward_cached

    correct = 0
    for ex in examples:
        x = normalize_pixels(ctx.image_for(ex.pair_id, ex.prefix_len), checkpoint.config)
        logits, _ = _forward_cached(params64, checkpoint.config, x)
        if int(np.argmax(logits)) == ex.label:
            correct += 1
    return correct / len(examples)


def evaluate(
    checkpoint: ModelCheckpoint,
    examples: list[TrainingExample],
    ctx: RenderContext,
    split: str,
) -> float:
    """Fraction of `split` examples whose argmax logit matches the label."""
    _check_fingerprint(checkpoint, ctx)
    chosen = [ex for ex in examples if ex.split == split]
    if not chosen:
        raise DataError(f"split {split!r} is empty")
    return _accuracy(
        checkpoint.parameters.astype(np.float64), checkpoint, ctx, chosen
    )


def train(
    checkpoint: ModelCheckpoint,
    examples: list[TrainingExample],
    ctx: RenderContext,
    hyper: Hyperparams,
    curve_split: str = "test",
) -> tuple[ModelCheckpoint, list[tuple[int, float]]]:
    """Run SGD with momentum; returns the trained checkpoint and the
    (iteration, accuracy) learning curve sampled every eval_interval."""
    _check_fingerprint(checkpoint, ctx)
    train_examples = [ex for ex in examples if ex.split == "train"]
    if not train_examples:
        raise DataError("train split is empty")
    curve_examples = [ex for ex in examples if ex.split == curve_split]

    params32 = checkpoint.parameters.copy()
    params64 = params32.astype(np.float64)
    velocity = np.zeros_like(params64)
    scratch = np.empty_like(params64)
    curve: list[tuple[int, float]] = []
    iteration = 0
    consumed = 0
    stop = False

    for epoch in range(hyper.epochs):
        order = np.random.default_rng([hyper.seed, epoch]).permutation(
            len(train_examples)
        )
        for start in range(0, len(order), hyper.batch_size):
            batch = [train_examples[i] for i in order[start : start + hyper.batch_size]]
            _, grad = sum_gradients(params64, checkpoint, ctx, batch, scratch=scratch)
            grad /= len(batch)
            velocity = hyper.momentum * velocity + grad
            params64 -= hyper.learning_rate * velocity
            params32 = params64.astype(np.float32)
            params64 = params32.astype(np.float64)
            iteration += 1
            consumed += len(batch)

            if hyper.eval_interval and iteration % hyper.eval_interval == 0 and curve_examples:
                acc = _accuracy(params64, checkpoint, ctx, curve_examples)
                curve.append((iteration, acc))
            if (
                hyper.stop_train_accuracy is not None
                and iteration % hyper.accuracy_check_interval == 0
                and _accuracy(params64, checkpoint, ctx, train_examples)
                >= hyper.stop_train_accuracy
            ):
                stop = True
            if hyper.max_iterations is not None and iteration >= hyper.max_iterations:
                stop = True
            if stop:
                break
        if stop:
            break

    trained = ModelCheckpoint(
        config=checkpoint.config,
        parameters=params32,
        trained_examples=checkpoint.trained_examples + consumed,
        vocab_fingerprint=checkpoint.vocab_fingerprint,
    )
    return trained, curve


def write_curve(path, curve: list[tuple[int, float]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("iteration,accuracy\n")
        for iteration, acc in curve:
            f.write(f"{iteration},{acc:.6f}\n")
