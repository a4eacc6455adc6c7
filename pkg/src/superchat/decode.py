"""Iterative response generation: render, classify, append, repeat.

Decoding starts from an empty partial response. Each step renders the
(input, partial) pair, classifies it, and either appends the predicted
character or stops on the EOS class; hitting the response capacity also
stops. Greedy takes the argmax (ties to the lowest class index); beam
search keeps the best `beam_width` class sequences by summed log
probability.
"""

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .corpus import EOS_TOKEN, Vocabulary
from .errors import CapacityError, InputError, ParameterError
from .glyphs import GlyphSource
from .layout import LayoutConfig
from .network import ModelCheckpoint, forward, softmax
from .render import render

# predict_fn(partial class sequence) -> probability vector over classes
PredictFn = Callable[[tuple[int, ...]], np.ndarray]


@dataclass(frozen=True)
class DecodeStep:
    position: int
    chosen_class: int
    probability: float
    top_k: tuple[tuple[int, float], ...]  # (class, probability), best first


@dataclass(frozen=True)
class BeamHypothesis:
    partial: tuple[int, ...]  # class sequence; EOS may only appear last
    log_score: float
    finished: bool

    def text_classes(self) -> tuple[int, ...]:
        if self.partial and self.finished and self.partial[-1] == 0:
            return self.partial[:-1]
        return self.partial


def predict_next(
    checkpoint: ModelCheckpoint,
    layout: LayoutConfig,
    glyphs: GlyphSource,
    input_text: str,
    partial_response: str,
) -> np.ndarray:
    """Class distribution for the next response character."""
    image = render(layout, glyphs, input_text, partial_response)
    return softmax(forward(checkpoint, image))


def _classes_to_text(classes: Sequence[int], vocab: Vocabulary) -> str:
    return "".join(vocab.char_of(c) for c in classes)


def _make_predict_fn(
    checkpoint: ModelCheckpoint,
    vocab: Vocabulary,
    layout: LayoutConfig,
    glyphs: GlyphSource,
    input_text: str,
) -> PredictFn:
    def predict(partial: tuple[int, ...]) -> np.ndarray:
        return predict_next(
            checkpoint, layout, glyphs, input_text, _classes_to_text(partial, vocab)
        )

    return predict


def top_k_classes(probs: np.ndarray, k: int) -> tuple[tuple[int, float], ...]:
    """Best k (class, probability), descending probability, ties to the
    lower class index."""
    order = sorted(range(len(probs)), key=lambda c: (-probs[c], c))
    return tuple((c, float(probs[c])) for c in order[:k])


def greedy_core(
    predict: PredictFn, eos_index: int, capacity: int, top_k: int = 5
) -> tuple[list[int], list[DecodeStep]]:
    partial: list[int] = []
    steps: list[DecodeStep] = []
    while True:
        probs = predict(tuple(partial))
        chosen = int(np.argmax(probs))  # first maximum = lowest class on ties
        steps.append(
            DecodeStep(
                position=len(partial),
                chosen_class=chosen,
                probability=float(probs[chosen]),
                top_k=top_k_classes(probs, top_k),
            )
        )
        if chosen == eos_index:
            break
        partial.append(chosen)
        if len(partial) >= capacity:
            break
    return partial, steps


def decode_greedy(
    checkpoint: ModelCheckpoint,
    vocab: Vocabulary,
    layout: LayoutConfig,
    glyphs: GlyphSource,
    input_text: str,
) -> tuple[str, list[DecodeStep]]:
    """Greedy decode; returns the response text and the per-step trace."""
    _check_input(input_text, layout)
    predict = _make_predict_fn(checkpoint, vocab, layout, glyphs, input_text)
    classes, steps = greedy_core(predict, vocab.eos_index, layout.response_capacity)
    return _classes_to_text(classes, vocab), steps


def beam_core(
    predict: PredictFn,
    eos_index: int,
    num_classes: int,
    capacity: int,
    beam_width: int,
    length_normalize: bool = False,
) -> list[BeamHypothesis]:
    """Beam search over class sequences. Returns retired + surviving
    hypotheses sorted best first."""
    if beam_width < 1:
        raise ParameterError(f"beam_width must be >= 1, got {beam_width}")

    def rank_key(hyp: BeamHypothesis):
        score = hyp.log_score
        if length_normalize:
            score /= max(len(hyp.text_classes()), 1)
        return (-score, hyp.partial)

    active = [BeamHypothesis(partial=(), log_score=0.0, finished=False)]
    completed: list[BeamHypothesis] = []
    while active:
        expansions: list[BeamHypothesis] = []
        for hyp in active:
            probs = predict(hyp.partial)
            with np.errstate(divide="ignore"):
                logp = np.log(probs)
            for cls in range(num_classes):
                seq = hyp.partial + (cls,)
                finished = cls == eos_index or len(seq) >= capacity
                expansions.append(
                    BeamHypothesis(
                        partial=seq,
                        log_score=hyp.log_score + float(logp[cls]),
                        finished=finished,
                    )
                )
        expansions.sort(key=rank_key)
        kept = expansions[:beam_width]
        completed.extend(h for h in kept if h.finished)
        active = [h for h in kept if not h.finished]
    pool = completed if completed else active
    return sorted(pool, key=rank_key)


def decode_beam(
    checkpoint: ModelCheckpoint,
    vocab: Vocabulary,
    layout: LayoutConfig,
    glyphs: GlyphSource,
    input_text: str,
    beam_width: int,
    length_normalize: bool = False,
) -> tuple[str, list[BeamHypothesis]]:
    """Beam decode; returns the best finished hypothesis's text and the
    final ranked beam."""
    _check_input(input_text, layout)
    predict = _make_predict_fn(checkpoint, vocab, layout, glyphs, input_text)
    beam = beam_core(
        predict,
        vocab.eos_index,
        vocab.size,
        layout.response_capacity,
        beam_width,
        length_normalize=length_normalize,
    )
    return _classes_to_text(beam[0].text_classes(), vocab), beam


def trace_for_classes(
    predict: PredictFn, classes: Sequence[int], top_k: int = 5
) -> list[DecodeStep]:
    """Replay a chosen class sequence (terminal EOS included when present),
    recording the classifier's view at each position. Used to trace beam
    results; a beam's pick may fall outside the per-step top-k, in which
    case it is merged in."""
    steps: list[DecodeStep] = []
    prefix: tuple[int, ...] = ()
    for cls in classes:
        probs = predict(prefix)
        top = top_k_classes(probs, top_k)
        if all(c != cls for c, _ in top):
            top = tuple(
                sorted(top + ((cls, float(probs[cls])),), key=lambda t: (-t[1], t[0]))
            )
        steps.append(
            DecodeStep(
                position=len(prefix),
                chosen_class=cls,
                probability=float(probs[cls]),
                top_k=top,
            )
        )
        prefix = prefix + (cls,)
    return steps


def format_trace(steps: list[DecodeStep], vocab: Vocabulary) -> str:
    """Line-oriented trace: position, chosen character, probability, top-5."""
    lines = []
    for s in steps:
        alts = " ".join(
            f"{vocab.char_of(c)}:{p:.4f}" for c, p in s.top_k
        )
        lines.append(
            f"{s.position}\t{vocab.char_of(s.chosen_class)}\t"
            f"{s.probability:.4f}\t{alts}"
        )
    return "\n".join(lines)


def _check_input(input_text: str, layout: LayoutConfig) -> None:
    if not input_text:
        raise InputError("input text is empty after normalization")
    if len(input_text) > layout.input_capacity:
        raise CapacityError(
            f"input portion overflow: {len(input_text)} chars > "
            f"capacity {layout.input_capacity}"
        )


EOS_DISPLAY = EOS_TOKEN
