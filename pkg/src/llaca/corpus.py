"""Raw and gold corpora, and the span form of a segmentation."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import IngestionError

SENTINEL = "\x00"


@dataclass(frozen=True)
class Span:
    start: int
    end: int

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span ({self.start}, {self.end})")


@dataclass(frozen=True)
class RawCorpus:
    sentences: tuple[str, ...]
    id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "sentences", tuple(self.sentences))
        for i, s in enumerate(self.sentences):
            if SENTINEL in s or "\n" in s or "\r" in s:
                raise IngestionError(f"sentence {i} contains a reserved character")

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i: int) -> str:
        return self.sentences[i]


@dataclass(frozen=True)
class GoldCorpus:
    sentences: tuple[tuple[str, ...], ...]
    spans: tuple[tuple[Span, ...], ...] = field(default=())
    id: str = ""

    def __post_init__(self) -> None:
        toks = tuple(tuple(t) for t in self.sentences)
        object.__setattr__(self, "sentences", toks)
        object.__setattr__(self, "spans", tuple(tuple(spans_of(t)) for t in toks))

    def __len__(self) -> int:
        return len(self.sentences)


def spans_of(tokens: Iterable[str]) -> list[Span]:
    spans = []
    pos = 0
    for tok in tokens:
        spans.append(Span(pos, pos + len(tok)))
        pos += len(tok)
    return spans


def tokens_from_spans(text: str, spans: Iterable[Span]) -> list[str]:
    return [text[s.start:s.end] for s in spans]


def _read_text(path: str | Path) -> str:
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestionError(f"{path}: invalid UTF-8 at byte offset {exc.start}") from exc


def load_raw(path: str | Path, normalize: Callable[[str], str] | None = None) -> RawCorpus:
    """Read one sentence per non-empty line.

    ``normalize`` is an optional per-line hook (e.g. script conversion); by
    default text passes through untouched.
    """
    sentences = []
    for line in _read_text(path).split("\n"):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        if normalize is not None:
            line = normalize(line)
        sentences.append(line)
    return RawCorpus(tuple(sentences), id=str(path))


def parse_gold_lines(lines: Iterable[str]) -> list[list[str]]:
    out = []
    for line in lines:
        toks = line.split()
        if toks:
            out.append(toks)
    return out


def load_gold(path: str | Path) -> GoldCorpus:
    return GoldCorpus(tuple(tuple(t) for t in parse_gold_lines(_read_text(path).split("\n"))), id=str(path))


def strip_gold(gold: GoldCorpus) -> RawCorpus:
    return RawCorpus(tuple("".join(toks) for toks in gold.sentences), id=gold.id)


def save_raw(corpus: RawCorpus | Sequence[str], path: str | Path) -> None:
    Path(path).write_text("".join(s + "\n" for s in corpus), encoding="utf-8")


def save_segmented(token_lists: Iterable[Sequence[str]], path: str | Path) -> None:
    Path(path).write_text("".join(" ".join(t) + "\n" for t in token_lists), encoding="utf-8")
