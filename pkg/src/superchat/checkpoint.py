"""Checkpoint container: text header + little-endian float32 payload.

Layout:

    bytes 0..3    magic "SCHK"
    bytes 4..7    format version, uint32 LE
    bytes 8..11   header length in bytes, uint32 LE
    header        UTF-8 key=value lines (config, trained_examples,
                  vocab_fingerprint, param_count)
    payload       param_count float32 values, little-endian, in
                  parameter_layout() order

load(save(x)) is bit-exact; parameters are stored and held as float32.
"""

import hashlib
import struct
from pathlib import Path

import numpy as np

from .errors import CheckpointError, VocabMismatchError
from .network import ModelCheckpoint, ModelConfig, parameter_count

MAGIC = b"SCHK"
VERSION = 1


def checkpoint_to_bytes(checkpoint: ModelCheckpoint) -> bytes:
    cfg = checkpoint.config
    header_lines = [
        f"input_px={cfg.input_px}",
        f"input_channels={cfg.input_channels}",
        "conv_filters=" + ",".join(str(f) for f in cfg.conv_filters),
        f"fc_width={cfg.fc_width}",
        f"num_classes={cfg.num_classes}",
        f"seed={cfg.seed}",
        f"trained_examples={checkpoint.trained_examples}",
        f"vocab_fingerprint={checkpoint.vocab_fingerprint}",
        f"param_count={checkpoint.parameters.size}",
    ]
    header = ("\n".join(header_lines) + "\n").encode("utf-8")
    payload = checkpoint.parameters.astype("<f4").tobytes()
    return MAGIC + struct.pack("<II", VERSION, len(header)) + header + payload


def checkpoint_from_bytes(data: bytes, vocab=None) -> ModelCheckpoint:
    if len(data) < 12 or data[:4] != MAGIC:
        raise CheckpointError("bad magic: not a superchat checkpoint")
    version, header_len = struct.unpack("<II", data[4:12])
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    if len(data) < 12 + header_len:
        raise CheckpointError("truncated checkpoint header")
    try:
        header_text = data[12 : 12 + header_len].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CheckpointError(f"undecodable header: {exc}") from exc
    fields = {}
    for line in header_text.splitlines():
        if not line.strip():
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise CheckpointError(f"malformed header line {line!r}")
        fields[key] = value
    try:
        config = ModelConfig(
            input_px=int(fields["input_px"]),
            input_channels=int(fields["input_channels"]),
            conv_filters=tuple(int(f) for f in fields["conv_filters"].split(",")),
            fc_width=int(fields["fc_width"]),
            num_classes=int(fields["num_classes"]),
            seed=int(fields["seed"]),
        )
        trained_examples = int(fields["trained_examples"])
        fingerprint = fields["vocab_fingerprint"]
        param_count_field = int(fields["param_count"])
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"bad checkpoint header: {exc}") from exc
    expected = parameter_count(config)
    if param_count_field != expected:
        raise CheckpointError(
            f"header param_count {param_count_field} != config-derived {expected}"
        )
    payload = data[12 + header_len :]
    if len(payload) != 4 * expected:
        raise CheckpointError(
            f"payload holds {len(payload)} bytes, expected {4 * expected}"
        )
    params = np.frombuffer(payload, dtype="<f4").astype(np.float32)
    ckpt = ModelCheckpoint(
        config=config,
        parameters=params,
        trained_examples=trained_examples,
        vocab_fingerprint=fingerprint,
    )
    if vocab is not None and vocab.fingerprint() != fingerprint:
        raise VocabMismatchError(
            f"checkpoint was trained against vocabulary {fingerprint}, "
            f"got {vocab.fingerprint()}"
        )
    return ckpt


def save_checkpoint(checkpoint: ModelCheckpoint, path) -> None:
    Path(path).write_bytes(checkpoint_to_bytes(checkpoint))


def load_checkpoint(path, vocab=None) -> ModelCheckpoint:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    return checkpoint_from_bytes(data, vocab=vocab)


def checkpoint_fingerprint(checkpoint: ModelCheckpoint) -> str:
    """Stable identifier of a checkpoint's exact content (model_id)."""
    return hashlib.sha256(checkpoint_to_bytes(checkpoint)).hexdigest()[:16]
