"""Dialogue corpus preparation.

Pipeline: ingest -> normalize -> build_vocabulary -> filter_pairs ->
expand_pair -> split_examples. Prediction classes are response-side
characters above a frequency cutoff plus the end-of-sentence class at
index 0; every (pair, response prefix) becomes one labeled example, with
the final prefix labeled EOS.
"""

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import IngestError, VocabularyError

EOS_INDEX = 0
EOS_TOKEN = "<EOS>"

# Unicode blocks removed by normalize(): emoticons, pictographs,
# transport/map, supplemental symbols, dingbats, misc symbols, plus the
# emoji variation selectors.
_EMOTICON_RANGES = (
    (0x1F300, 0x1F5FF),
    (0x1F600, 0x1F64F),
    (0x1F680, 0x1F6FF),
    (0x1F900, 0x1F9FF),
    (0x2600, 0x26FF),
    (0x2700, 0x27BF),
    (0xFE0E, 0xFE0F),
)


@dataclass(frozen=True)
class DialoguePair:
    pair_id: int
    input: str
    response: str


@dataclass(frozen=True)
class VocabEntry:
    codepoint: str  # single character
    frequency: int
    class_index: int


@dataclass(frozen=True)
class Vocabulary:
    """Frequency-filtered response character set.

    Class 0 is EOS; character classes occupy 1..V-1 ordered by descending
    response-side frequency, ties broken by ascending codepoint.
    """

    entries: tuple[VocabEntry, ...]
    min_frequency: int
    eos_index: int = EOS_INDEX
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {e.codepoint: e.class_index for e in self.entries}
        )

    @property
    def size(self) -> int:
        return len(self.entries) + 1  # + EOS

    def class_of(self, ch: str) -> int | None:
        return self._index.get(ch)

    def __contains__(self, ch: str) -> bool:
        return ch in self._index

    def char_of(self, class_index: int) -> str:
        if class_index == self.eos_index:
            return EOS_TOKEN
        return self.entries[class_index - 1].codepoint

    def fingerprint(self) -> str:
        """Stable hash of the canonical vocabulary content."""
        h = hashlib.sha256()
        h.update(f"min_frequency={self.min_frequency}\n".encode())
        for e in self.entries:
            h.update(f"{e.class_index}\tU+{ord(e.codepoint):04X}\t{e.frequency}\n".encode())
        return h.hexdigest()[:16]


@dataclass
class TrainingExample:
    pair_id: int
    prefix_len: int
    label: int
    split: str = ""  # "train" or "test" once assigned


@dataclass(frozen=True)
class CorpusStats:
    total_pairs: int
    distinct_response_chars: int
    chars_below_min_freq: int
    vocab_size: int
    filtered_pairs: int
    total_examples: int
    train_examples: int
    test_examples: int

    def report(self) -> str:
        lines = [f"{k}={v}" for k, v in vars(self).items()]
        return "\n".join(lines)


def normalize(text: str) -> str:
    """Strip emoticon blocks, trim, and collapse whitespace runs to one space."""
    kept = []
    for ch in text:
        cp = ord(ch)
        if any(lo <= cp <= hi for lo, hi in _EMOTICON_RANGES):
            continue
        kept.append(ch)
    return " ".join("".join(kept).split())


def ingest(path, fmt: str) -> list[DialoguePair]:
    """Read dialogue pairs from a TSV or conv-block file.

    tsv: one pair per line, input TAB response.
    conv: blocks of a line "E" followed by two lines "M <text>".
    pair_id is assigned in file order starting at 0.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise IngestError(f"{path}: not valid UTF-8: {exc}") from exc
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if fmt == "tsv":
        return _ingest_tsv(lines, path)
    if fmt == "conv":
        return _ingest_conv(lines, path)
    raise IngestError(f"unknown corpus format {fmt!r} (expected tsv or conv)")


def _ingest_tsv(lines: list[str], path) -> list[DialoguePair]:
    pairs = []
    for lineno, line in enumerate(lines, start=1):
        if line == "":
            continue
        left, tab, right = line.partition("\t")
        if not tab:
            raise IngestError(f"{path}:{lineno}: no TAB separator")
        pairs.append(DialoguePair(pair_id=len(pairs), input=left, response=right))
    return pairs


def _ingest_conv(lines: list[str], path) -> list[DialoguePair]:
    pairs = []
    i = 0
    n = len(lines)
    while i < n:
        line = lines[i]
        if line.strip() == "":
            i += 1
            continue
        if line.rstrip() != "E":
            raise IngestError(f"{path}:{i + 1}: expected block marker 'E', got {line!r}")
        block = []
        j = i + 1
        while j < n and lines[j].startswith("M"):
            m = lines[j]
            if not m.startswith("M "):
                raise IngestError(f"{path}:{j + 1}: malformed 'M ' line: {m!r}")
            block.append(m[2:])
            j += 1
        if len(block) != 2:
            raise IngestError(
                f"{path}:{i + 1}: block has {len(block)} 'M' lines, expected 2"
            )
        pairs.append(DialoguePair(pair_id=len(pairs), input=block[0], response=block[1]))
        i = j
    return pairs


def normalize_pairs(pairs: list[DialoguePair]) -> list[DialoguePair]:
    """Normalize both sides of each pair, dropping pairs that empty out.

    pair_ids of the survivors are preserved.
    """
    out = []
    for p in pairs:
        inp = normalize(p.input)
        resp = normalize(p.response)
        if inp and resp:
            out.append(DialoguePair(pair_id=p.pair_id, input=inp, response=resp))
    return out


def response_char_frequencies(pairs: list[DialoguePair]) -> Counter:
    counts: Counter = Counter()
    for p in pairs:
        counts.update(p.response)
    return counts


def build_vocabulary(pairs: list[DialoguePair], min_frequency: int) -> Vocabulary:
    """Select response characters with frequency >= min_frequency as classes."""
    counts = response_char_frequencies(pairs)
    selected = sorted(
        ((ch, n) for ch, n in counts.items() if n >= min_frequency),
        key=lambda item: (-item[1], item[0]),
    )
    if not selected:
        raise VocabularyError(
            f"no response character reaches frequency {min_frequency}"
        )
    entries = tuple(
        VocabEntry(codepoint=ch, frequency=n, class_index=i + 1)
        for i, (ch, n) in enumerate(selected)
    )
    return Vocabulary(entries=entries, min_frequency=min_frequency)


def filter_pairs(
    pairs: list[DialoguePair],
    vocab: Vocabulary,
    input_cut: int,
    response_cut: int,
) -> list[DialoguePair]:
    """Keep pairs within the cut lengths whose response is fully in-vocabulary.

    Input characters are rendered, never predicted, so they are not
    required to be in the vocabulary. Order and pair_ids are preserved.
    """
    return [
        p
        for p in pairs
        if len(p.input) <= input_cut
        and len(p.response) <= response_cut
        and all(ch in vocab for ch in p.response)
    ]


def expand_pair(pair: DialoguePair, vocab: Vocabulary) -> list[TrainingExample]:
    """One example per response prefix: label is the next character's class,
    and the full-response prefix is labeled EOS."""
    examples = []
    for k, ch in enumerate(pair.response):
        label = vocab.class_of(ch)
        if label is None:
            raise VocabularyError(
                f"pair {pair.pair_id}: response char {ch!r} not in vocabulary "
                "(filter_pairs contract violated)"
            )
        examples.append(TrainingExample(pair_id=pair.pair_id, prefix_len=k, label=label))
    examples.append(
        TrainingExample(
            pair_id=pair.pair_id, prefix_len=len(pair.response), label=vocab.eos_index
        )
    )
    return examples


def expand_pairs(pairs: list[DialoguePair], vocab: Vocabulary) -> list[TrainingExample]:
    out = []
    for p in pairs:
        out.extend(expand_pair(p, vocab))
    return out


def split_examples(
    examples: list[TrainingExample], train_fraction: float, seed: int
) -> list[TrainingExample]:
    """Assign train/test per class, deterministically from the seed.

    Within each class floor(count * train_fraction) examples go to train
    (at least 1 when the class has >= 2 examples), the rest to test.
    Returns new examples in the original order.
    """
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    by_label: dict[int, list[int]] = {}
    for i, ex in enumerate(examples):
        by_label.setdefault(ex.label, []).append(i)
    split = [""] * len(examples)
    for label in sorted(by_label):
        idxs = by_label[label]
        n = len(idxs)
        n_train = math.floor(n * train_fraction)
        if n >= 2:
            n_train = max(n_train, 1)
        rng = np.random.default_rng([seed, label])
        perm = rng.permutation(n)
        chosen = {idxs[j] for j in perm[:n_train]}
        for i in idxs:
            split[i] = "train" if i in chosen else "test"
    return [replace_split(ex, split[i]) for i, ex in enumerate(examples)]


def replace_split(ex: TrainingExample, split: str) -> TrainingExample:
    return replace(ex, split=split)


def assign_all_train(examples: list[TrainingExample]) -> list[TrainingExample]:
    """Put every example in the train split (no held-out set)."""
    return [replace(ex, split="train") for ex in examples]


def compute_stats(
    pairs: list[DialoguePair],
    normalized: list[DialoguePair],
    vocab: Vocabulary,
    filtered: list[DialoguePair],
    examples: list[TrainingExample],
) -> CorpusStats:
    counts = response_char_frequencies(normalized)
    below = sum(1 for n in counts.values() if n < vocab.min_frequency)
    train = sum(1 for ex in examples if ex.split == "train")
    test = sum(1 for ex in examples if ex.split == "test")
    return CorpusStats(
        total_pairs=len(pairs),
        distinct_response_chars=len(counts),
        chars_below_min_freq=below,
        vocab_size=vocab.size,
        filtered_pairs=len(filtered),
        total_examples=len(examples),
        train_examples=train,
        test_examples=test,
    )
