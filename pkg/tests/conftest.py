from pathlib import Path

import pytest

from superchat import corpus as C
from superchat.glyphs import ProceduralGlyphSource
from superchat.layout import compute_layout
from superchat.network import ModelConfig, init_model
from superchat.train import Hyperparams, RenderContext, train

DATA = Path(__file__).parent / "data"
TOY_CORPUS = DATA / "toy_corpus.tsv"

# Desk-profile hyperparameters known to memorize the toy corpus in ~120
# iterations (see the learning-rate notes in README).
TOY_HYPER = dict(
    batch_size=5,
    learning_rate=0.005,
    momentum=0.9,
    epochs=1000,
    seed=0,
    eval_interval=None,
    stop_train_accuracy=1.0,
    accuracy_check_interval=25,
    max_iterations=5000,
)


class ToyBundle:
    """Prepared toy corpus plus desk-profile rendering context."""

    def __init__(self):
        raw = C.ingest(TOY_CORPUS, "tsv")
        self.pairs = C.normalize_pairs(raw)
        self.vocab = C.build_vocabulary(self.pairs, min_frequency=1)
        self.filtered = C.filter_pairs(self.pairs, self.vocab, 18, 18)
        self.examples = C.assign_all_train(C.expand_pairs(self.filtered, self.vocab))
        self.layout = compute_layout(112, 8, 6, 6, 3, 1)
        self.glyphs = ProceduralGlyphSource(0)
        self.ctx = RenderContext(self.layout, self.glyphs, self.filtered, self.vocab)
        self.model_config = ModelConfig(
            input_px=112,
            input_channels=1,
            conv_filters=(8, 16, 32),
            fc_width=128,
            num_classes=self.vocab.size,
            seed=0,
        )


@pytest.fixture(scope="session")
def toy():
    return ToyBundle()


@pytest.fixture(scope="session")
def toy_checkpoint(toy):
    """Desk model trained to train-accuracy 1.0 on the toy corpus."""
    ck = init_model(toy.model_config, vocab_fingerprint=toy.vocab.fingerprint())
    trained, _ = train(ck, toy.examples, toy.ctx, Hyperparams(**TOY_HYPER))
    return trained
