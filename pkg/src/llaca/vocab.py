"""Counted vocabularies built from LLM segmentations, PMI filtering, TSV I/O."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import SENTINEL
from .errors import ConfigError, DataError
from .suffix_index import SuffixIndex

DEFAULT_TOP_RATIO = 0.99

_WS = re.compile(r"\s")
_COUNT = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class VocabEntry:
    word: str
    count: int
    pmi: float | None = None

    def __post_init__(self) -> None:
        if not self.word or _WS.search(self.word) or SENTINEL in self.word:
            raise DataError(f"invalid vocabulary word {self.word!r}")
        if self.count < 1:
            raise DataError(f"count for {self.word!r} must be positive, got {self.count}")


@dataclass(frozen=True)
class Vocabulary:
    entries: Mapping[str, VocabEntry] = field(default_factory=dict)

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "Vocabulary":
        return cls({w: VocabEntry(w, int(c)) for w, c in counts.items()})

    @property
    def total_count(self) -> int:
        return sum(e.count for e in self.entries.values())

    def counts(self) -> dict[str, int]:
        return {w: e.count for w, e in self.entries.items()}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: object) -> bool:
        return word in self.entries

    def __getitem__(self, word: str) -> VocabEntry:
        return self.entries[word]

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self.counts() == other.counts()


def _squash(s: str) -> str:
    return _WS.sub("", s)


def parse_llm_lines(raw: Sequence[str], output_lines: Sequence[str]) -> tuple[list[list[str]], int]:
    """Keep the LLM lines whose characters reproduce their source sentence.

    Returns ``(accepted, rejected_count)``. Missing output lines count as
    rejections, as do translations, paraphrases and any added chatter.
    """
    padded = list(output_lines)[: len(raw)]
    padded += [""] * (len(raw) - len(padded))
    accepted, rejected = [], 0
    for sentence, line in zip(raw, padded):
        tokens = line.split()
        if tokens and "".join(tokens) == _squash(sentence):
            accepted.append(tokens)
        else:
            rejected += 1
    return accepted, rejected


def count_words(accepted: Iterable[Sequence[str]]) -> Vocabulary:
    counts: Counter[str] = Counter()
    for tokens in accepted:
        counts.update(tokens)
    return Vocabulary.from_counts(counts)


def merge(a: Vocabulary, b: Vocabulary) -> Vocabulary:
    counts = Counter(a.counts())
    counts.update(b.counts())
    return Vocabulary.from_counts(counts)


def pmi_filter(v: Vocabulary, index: SuffixIndex, top_ratio: float = DEFAULT_TOP_RATIO) -> Vocabulary:
    """Score every word with PMI and keep the top ``top_ratio`` multi-char words.

    Unattested words (-inf) are always dropped; single characters are always
    kept. Ties rank by higher count, then by the word itself.
    """
    if not 0 < top_ratio <= 1:
        raise ConfigError(f"top_ratio must lie in (0, 1], got {top_ratio}")
    scored = [VocabEntry(e.word, e.count, index.pmi(e.word)) for e in v.entries.values()]
    singles = [e for e in scored if len(e.word) == 1 and e.pmi != -math.inf]
    multi = [e for e in scored if len(e.word) > 1 and e.pmi != -math.inf]
    multi.sort(key=lambda e: (-e.pmi, -e.count, e.word))
    kept = multi[: math.ceil(top_ratio * len(multi))]
    return Vocabulary({e.word: e for e in sorted(singles + kept, key=lambda e: e.word)})


def save_tsv(v: Vocabulary, path: str | Path) -> None:
    lines = [f"{w}\t{v.entries[w].count}\n" for w in sorted(v.entries)]
    Path(path).write_text("".join(lines), encoding="utf-8")


def load_tsv(path: str | Path) -> Vocabulary:
    counts: Counter[str] = Counter()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: invalid UTF-8 at byte offset {exc.start}") from exc
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not _COUNT.fullmatch(parts[1]) or int(parts[1]) < 1:
            raise DataError(f"{path}:{lineno}: malformed vocabulary line {line!r}")
        word = parts[0]
        if not word or _WS.search(word) or SENTINEL in word:
            raise DataError(f"{path}:{lineno}: invalid word {word!r}")
        counts[word] += int(parts[1])
    return Vocabulary.from_counts(counts)
