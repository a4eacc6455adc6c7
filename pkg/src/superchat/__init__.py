"""Dialogue generation by two-dimensional text embedding.

An input sentence and the partial response are drawn as glyphs onto one
image; a CNN classifies the image to predict the next response character,
iterating until end-of-sentence.
"""

__version__ = "0.1.0"

from .corpus import (
    CorpusStats,
    DialoguePair,
    TrainingExample,
    Vocabulary,
    build_vocabulary,
    expand_pair,
    filter_pairs,
    ingest,
    normalize,
    split_examples,
)
from .decode import BeamHypothesis, DecodeStep, decode_beam, decode_greedy, predict_next
from .glyphs import FontGlyphSource, ProceduralGlyphSource, parse_glyph_spec
from .layout import LayoutConfig, cell_origin, compute_layout
from .manifest import read_manifest, write_manifest
from .network import (
    ModelCheckpoint,
    ModelConfig,
    backward,
    cross_entropy,
    forward,
    init_model,
    softmax,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .render import SuperChatImage, export_png, render
from .train import Hyperparams, RenderContext, evaluate, train

__all__ = [
    "BeamHypothesis",
    "CorpusStats",
    "DecodeStep",
    "DialoguePair",
    "FontGlyphSource",
    "Hyperparams",
    "LayoutConfig",
    "ModelCheckpoint",
    "ModelConfig",
    "ProceduralGlyphSource",
    "RenderContext",
    "SuperChatImage",
    "TrainingExample",
    "Vocabulary",
    "backward",
    "build_vocabulary",
    "cell_origin",
    "compute_layout",
    "cross_entropy",
    "decode_beam",
    "decode_greedy",
    "evaluate",
    "expand_pair",
    "export_png",
    "filter_pairs",
    "forward",
    "ingest",
    "init_model",
    "load_checkpoint",
    "normalize",
    "parse_glyph_spec",
    "predict_next",
    "read_manifest",
    "render",
    "save_checkpoint",
    "softmax",
    "split_examples",
    "train",
    "write_manifest",
]
