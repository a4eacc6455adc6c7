import numpy as np
import pytest

from superchat import corpus as C
from superchat.checkpoint import (
    checkpoint_fingerprint,
    checkpoint_from_bytes,
    checkpoint_to_bytes,
    load_checkpoint,
    save_checkpoint,
)
from superchat.errors import CheckpointError, VocabMismatchError
from superchat.network import ModelConfig, forward, init_model

CFG = ModelConfig(
    input_px=16, input_channels=1, conv_filters=(2,), fc_width=8, num_classes=4, seed=2
)


@pytest.fixture
def ck():
    return init_model(CFG, vocab_fingerprint="0123456789abcdef")


def probe_images(n=10, px=16, channels=1):
    rng = np.random.default_rng(0)
    return [
        rng.integers(0, 256, size=(px, px, channels), dtype=np.uint8) for _ in range(n)
    ]


def test_round_trip_bit_exact(ck, tmp_path):
    path = tmp_path / "model.ckpt"
    save_checkpoint(ck, path)
    loaded = load_checkpoint(path)
    assert loaded.config == ck.config
    assert loaded.trained_examples == ck.trained_examples
    assert loaded.vocab_fingerprint == ck.vocab_fingerprint
    assert loaded.parameters.tobytes() == ck.parameters.tobytes()
    for img in probe_images():
        a = forward(ck, img)
        b = forward(loaded, img)
        assert (a == b).all()


def test_bytes_round_trip_stable(ck):
    data = checkpoint_to_bytes(ck)
    again = checkpoint_to_bytes(checkpoint_from_bytes(data))
    assert data == again


def test_fingerprint_tracks_content(ck):
    fp = checkpoint_fingerprint(ck)
    other = init_model(
        ModelConfig(input_px=16, input_channels=1, conv_filters=(2,),
                    fc_width=8, num_classes=4, seed=3),
        vocab_fingerprint="0123456789abcdef",
    )
    assert fp != checkpoint_fingerprint(other)
    assert fp == checkpoint_fingerprint(ck)


def test_bad_magic_rejected(ck):
    data = b"XXXX" + checkpoint_to_bytes(ck)[4:]
    with pytest.raises(CheckpointError, match="magic"):
        checkpoint_from_bytes(data)


def test_bad_version_rejected(ck):
    import struct

    data = checkpoint_to_bytes(ck)
    bad = data[:4] + struct.pack("<I", 99) + data[8:]
    with pytest.raises(CheckpointError, match="version"):
        checkpoint_from_bytes(bad)


def test_truncated_payload_rejected(ck, tmp_path):
    path = tmp_path / "model.ckpt"
    save_checkpoint(ck, path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) - 17])
    with pytest.raises(CheckpointError, match="payload"):
        load_checkpoint(path)


def test_truncated_header_rejected(ck):
    data = checkpoint_to_bytes(ck)[:20]
    with pytest.raises(CheckpointError):
        checkpoint_from_bytes(data)


def test_vocab_mismatch_at_decode(ck, tmp_path):
    path = tmp_path / "model.ckpt"
    save_checkpoint(ck, path)
    pairs = [C.DialoguePair(0, "x", "ab")]
    other_vocab = C.build_vocabulary(pairs, 1)
    with pytest.raises(VocabMismatchError):
        load_checkpoint(path, vocab=other_vocab)


def test_missing_file_is_checkpoint_error(tmp_path):
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "absent.ckpt")
