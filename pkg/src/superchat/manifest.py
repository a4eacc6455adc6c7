"""Line-oriented manifest file set: pairs, vocabulary, examples.

A manifest is a directory holding four UTF-8 files:

    manifest.txt   key=value header (schema, version, counts, fingerprint)
    pairs.tsv      pair_id TAB input TAB response
    vocab.tsv      class_index TAB U+XXXX|<EOS> TAB frequency
    examples.tsv   pair_id TAB prefix_len TAB label TAB split

Writes are deterministic so identical inputs produce byte-identical
manifests. Reads reject version mismatches, referential breakage, and
non-canonical vocabulary ordering.
"""

from pathlib import Path

from .corpus import (
    EOS_TOKEN,
    DialoguePair,
    TrainingExample,
    VocabEntry,
    Vocabulary,
)
from .errors import ManifestError

SCHEMA = "superchat-manifest"
VERSION = 1

_FILES = ("manifest.txt", "pairs.tsv", "vocab.tsv", "examples.tsv")


def write_manifest(
    examples: list[TrainingExample],
    pairs: list[DialoguePair],
    vocab: Vocabulary,
    path,
) -> None:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)

    header = [
        f"schema={SCHEMA}",
        f"version={VERSION}",
        f"min_frequency={vocab.min_frequency}",
        f"vocab_fingerprint={vocab.fingerprint()}",
        f"pairs={len(pairs)}",
        f"vocab_entries={len(vocab.entries)}",
        f"examples={len(examples)}",
    ]
    (out / "manifest.txt").write_text("\n".join(header) + "\n", encoding="utf-8")

    with open(out / "pairs.tsv", "w", encoding="utf-8", newline="\n") as f:
        for p in pairs:
            f.write(f"{p.pair_id}\t{p.input}\t{p.response}\n")

    with open(out / "vocab.tsv", "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{vocab.eos_index}\t{EOS_TOKEN}\t0\n")
        for e in vocab.entries:
            f.write(f"{e.class_index}\tU+{ord(e.codepoint):04X}\t{e.frequency}\n")

    with open(out / "examples.tsv", "w", encoding="utf-8", newline="\n") as f:
        for ex in examples:
            if ex.split not in ("train", "test"):
                raise ManifestError(
                    f"example (pair {ex.pair_id}, prefix {ex.prefix_len}) has "
                    f"no split assignment"
                )
            f.write(f"{ex.pair_id}\t{ex.prefix_len}\t{ex.label}\t{ex.split}\n")


def read_manifest(path):
    """Load and validate a manifest directory.

    Returns (examples, pairs, vocab).
    """
    root = Path(path)
    for name in _FILES:
        if not (root / name).is_file():
            raise ManifestError(f"missing manifest file {root / name}")

    header = _read_header(root / "manifest.txt")
    if header.get("schema") != SCHEMA:
        raise ManifestError(f"bad schema {header.get('schema')!r}")
    if header.get("version") != str(VERSION):
        raise ManifestError(
            f"manifest version {header.get('version')!r} != {VERSION}"
        )

    pairs = _read_pairs(root / "pairs.tsv")
    vocab = _read_vocab(root / "vocab.tsv", int(header["min_frequency"]))
    examples = _read_examples(root / "examples.tsv")

    if len(pairs) != int(header["pairs"]):
        raise ManifestError("pair count differs from header")
    if len(vocab.entries) != int(header["vocab_entries"]):
        raise ManifestError("vocab entry count differs from header")
    if len(examples) != int(header["examples"]):
        raise ManifestError("example count differs from header")
    if vocab.fingerprint() != header["vocab_fingerprint"]:
        raise ManifestError("vocabulary fingerprint differs from header")

    by_id = {p.pair_id: p for p in pairs}
    for ex in examples:
        pair = by_id.get(ex.pair_id)
        if pair is None:
            raise ManifestError(f"example references unknown pair_id {ex.pair_id}")
        if not 0 <= ex.prefix_len <= len(pair.response):
            raise ManifestError(
                f"example (pair {ex.pair_id}) prefix_len {ex.prefix_len} "
                f"exceeds response length {len(pair.response)}"
            )
        if not 0 <= ex.label < vocab.size:
            raise ManifestError(
                f"example (pair {ex.pair_id}) label {ex.label} outside "
                f"vocabulary of size {vocab.size}"
            )
    return examples, pairs, vocab


def _read_header(path) -> dict:
    header = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ManifestError(f"{path}:{lineno}: not a key=value line")
        header[key] = value
    for key in ("schema", "version", "min_frequency", "vocab_fingerprint",
                "pairs", "vocab_entries", "examples"):
        if key not in header:
            raise ManifestError(f"{path}: missing header key {key!r}")
    return header


def _read_pairs(path) -> list[DialoguePair]:
    pairs = []
    seen = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        fields = line.split("\t")
        if len(fields) != 3:
            raise ManifestError(f"{path}:{lineno}: expected 3 fields")
        pair_id = _int_field(fields[0], path, lineno)
        if pair_id in seen:
            raise ManifestError(f"{path}:{lineno}: duplicate pair_id {pair_id}")
        seen.add(pair_id)
        pairs.append(DialoguePair(pair_id=pair_id, input=fields[1], response=fields[2]))
    return pairs


def _read_vocab(path, min_frequency: int) -> Vocabulary:
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ManifestError(f"{path}: empty vocabulary")
    first = lines[0].split("\t")
    if first[:2] != ["0", EOS_TOKEN]:
        raise ManifestError(f"{path}: first vocab line must be the EOS class 0")
    entries = []
    for lineno, line in enumerate(lines[1:], 2):
        fields = line.split("\t")
        if len(fields) != 3:
            raise ManifestError(f"{path}:{lineno}: expected 3 fields")
        class_index = _int_field(fields[0], path, lineno)
        if class_index != lineno - 1:
            raise ManifestError(
                f"{path}:{lineno}: class index {class_index} out of order "
                f"(expected {lineno - 1})"
            )
        if not fields[1].startswith("U+"):
            raise ManifestError(f"{path}:{lineno}: bad codepoint field {fields[1]!r}")
        ch = chr(int(fields[1][2:], 16))
        entries.append(
            VocabEntry(
                codepoint=ch,
                frequency=_int_field(fields[2], path, lineno),
                class_index=class_index,
            )
        )
    # Manifests are canonical: reject orderings the builder could not produce.
    key = [(-e.frequency, e.codepoint) for e in entries]
    if key != sorted(key):
        raise ManifestError(f"{path}: vocabulary is not in canonical order")
    for e in entries:
        if e.frequency < min_frequency:
            raise ManifestError(
                f"{path}: entry U+{ord(e.codepoint):04X} frequency "
                f"{e.frequency} below min_frequency {min_frequency}"
            )
    return Vocabulary(entries=tuple(entries), min_frequency=min_frequency)


def _read_examples(path) -> list[TrainingExample]:
    examples = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        fields = line.split("\t")
        if len(fields) != 4:
            raise ManifestError(f"{path}:{lineno}: expected 4 fields")
        if fields[3] not in ("train", "test"):
            raise ManifestError(f"{path}:{lineno}: bad split {fields[3]!r}")
        examples.append(
            TrainingExample(
                pair_id=_int_field(fields[0], path, lineno),
                prefix_len=_int_field(fields[1], path, lineno),
                label=_int_field(fields[2], path, lineno),
                split=fields[3],
            )
        )
    return examples


def _int_field(text: str, path, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ManifestError(f"{path}:{lineno}: expected integer, got {text!r}")
