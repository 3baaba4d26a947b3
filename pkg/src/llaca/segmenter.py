"""Segmentation DAG, Viterbi decoding, greedy baselines and perplexity."""

from __future__ import annotations

import math
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Sequence

from .automaton import Automaton, build
from .corpus import Span
from .vocab import Vocabulary

DECODERS = ("llaca", "uni", "fmm", "bmm")

# Scores closer than this are treated as ties.
TIE_EPS = 1e-12

_NUMBER = re.compile(r"[0-9]+(?:[.,%][0-9]+)*%?")
_LATIN = re.compile(r"[A-Za-z]+")


@dataclass
class SegDAG:
    length: int
    # edges[e] holds (start, log_prob) pairs sorted by start
    edges: list[list[tuple[int, float]]]
    hard_boundaries: set[int] = field(default_factory=set)

    def edge_set(self) -> dict[tuple[int, int], float]:
        return {(s, e): lp for e, lst in enumerate(self.edges) for s, lp in lst}


@dataclass(frozen=True)
class SentenceScore:
    log_p: float
    n: int


@dataclass(frozen=True)
class Segmentation:
    spans: tuple[Span, ...]
    score: float

    @property
    def length(self) -> int:
        return self.spans[-1].end if self.spans else 0

    @property
    def sentence_score(self) -> SentenceScore:
        return SentenceScore(self.score, self.length)

    def tokens(self, text: str) -> list[str]:
        return [text[s.start:s.end] for s in self.spans]


def is_boundary_char(ch: str) -> bool:
    """Punctuation, symbols and whitespace always stand alone."""
    return ch.isspace() or unicodedata.category(ch)[0] in "PSZ"


def _as_automaton(a: Automaton | Vocabulary) -> Automaton:
    return build(a) if isinstance(a, Vocabulary) else a


def build_dag(text: str, a: Automaton | Vocabulary, weighting: str = "llaca",
              preprocess: bool = True) -> SegDAG:
    """Candidate-word graph over ``text``.

    Edge weights come from the automaton (``weighting`` is ``"llaca"`` for the
    prefix-conditioned probability or ``"uni"`` for plain frequencies).
    Numbers and Latin runs become single log-0 edges unless a vocabulary
    match overlaps them; punctuation and whitespace are log-0 single
    characters that no other edge may cross. Any position left without a
    single-character edge gets a fallback edge.
    """
    a = _as_automaton(a)
    n = len(text)
    weights = a.log_prob if weighting == "llaca" else a.unigram_log_prob
    depth = a.depth
    matches = [(end - depth[node], end, weights[node]) for end, node in a.iter_matches(text)]

    hard: set[int] = set()
    blocked = bytearray(n + 1)  # positions strictly inside a locked run
    locked = bytearray(n)       # characters owned by a pre-processing edge
    fixed: list[tuple[int, int]] = []
    if preprocess:
        covered = bytearray(n)
        if matches:
            cover = [0] * (n + 1)
            for s, e, _ in matches:
                cover[s] += 1
                cover[e] -= 1
            running = 0
            for i in range(n):
                running += cover[i]
                covered[i] = running > 0
        for pattern in (_NUMBER, _LATIN):
            for m in pattern.finditer(text):
                s, e = m.span()
                if any(covered[s:e]) or any(locked[s:e]):
                    continue
                hard.update((s, e))
                for p in range(s + 1, e):
                    blocked[p] = 1
                for p in range(s, e):
                    locked[p] = 1
                fixed.append((s, e))
        for i, ch in enumerate(text):
            if not locked[i] and is_boundary_char(ch):
                hard.update((i, i + 1))
                locked[i] = 1
                fixed.append((i, i + 1))

    # next_hard[i]: smallest hard boundary strictly greater than i
    next_hard = [n + 1] * (n + 1)
    nxt = n + 1
    for i in range(n, -1, -1):
        next_hard[i] = nxt
        if i in hard:
            nxt = i

    edges: list[list[tuple[int, float]]] = [[] for _ in range(n + 1)]
    for s, e in fixed:
        edges[e].append((s, 0.0))
    has_single = bytearray(n)
    for s, e, lp in matches:
        if locked[s] or blocked[s] or blocked[e] or next_hard[s] < e:
            continue
        edges[e].append((s, lp))
        if e - s == 1:
            has_single[s] = 1
    fb = a.fallback_log_prob
    for i in range(n):
        if not locked[i] and not has_single[i]:
            edges[i + 1].append((i, fb))
    for lst in edges:
        lst.sort()
    return SegDAG(n, edges, hard)


def viterbi(dag: SegDAG) -> Segmentation:
    """Best tiling by total log-probability.

    Ties go to the longer final word at each position (smaller start).
    """
    n = dag.length
    neg = -math.inf
    best = [neg] * (n + 1)
    back = [-1] * (n + 1)
    best[0] = 0.0
    for e in range(1, n + 1):
        cur, arg = neg, -1
        for s, lp in dag.edges[e]:
            prev = best[s]
            if prev == neg:
                continue
            score = prev + lp
            if score > cur + TIE_EPS:
                cur, arg = score, s
        best[e], back[e] = cur, arg
    if n and back[n] < 0:
        raise AssertionError("segmentation DAG does not reach the final position")
    spans = []
    e = n
    while e > 0:
        s = back[e]
        spans.append(Span(s, e))
        e = s
    spans.reverse()
    return Segmentation(tuple(spans), best[n] if n else 0.0)


def segment_llaca(text: str, a: Automaton | Vocabulary, preprocess: bool = True) -> Segmentation:
    return viterbi(build_dag(text, a, "llaca", preprocess))


def segment_unigram(text: str, a: Automaton | Vocabulary, preprocess: bool = True) -> Segmentation:
    return viterbi(build_dag(text, a, "uni", preprocess))


def score_spans(text: str, a: Automaton | Vocabulary, spans: Sequence[Span],
                preprocess: bool = True) -> float:
    """Log-probability of a fixed tiling under the prefix-conditioned weights.

    Spans that are not DAG edges are charged one fallback per character.
    """
    a = _as_automaton(a)
    weights = build_dag(text, a, "llaca", preprocess).edge_set()
    fb = a.fallback_log_prob
    total = 0.0
    for sp in spans:
        lp = weights.get((sp.start, sp.end))
        total += (sp.end - sp.start) * fb if lp is None else lp
    return total


def _greedy(text: str, a: Automaton, forward: bool) -> list[Span]:
    words = a.word_index
    lengths = sorted({len(w) for w in words}, reverse=True)
    n = len(text)
    spans = []
    if forward:
        i = 0
        while i < n:
            step = next((L for L in lengths if i + L <= n and text[i:i + L] in words), 1)
            spans.append(Span(i, i + step))
            i += step
    else:
        j = n
        while j > 0:
            step = next((L for L in lengths if j - L >= 0 and text[j - L:j] in words), 1)
            spans.append(Span(j - step, j))
            j -= step
        spans.reverse()
    return spans


def segment_fmm(text: str, a: Automaton | Vocabulary) -> Segmentation:
    """Forward maximum matching: longest vocabulary word at the cursor."""
    a = _as_automaton(a)
    spans = _greedy(text, a, forward=True)
    return Segmentation(tuple(spans), score_spans(text, a, spans))


def segment_bmm(text: str, a: Automaton | Vocabulary) -> Segmentation:
    """Backward maximum matching, mirrored from the right end."""
    a = _as_automaton(a)
    spans = _greedy(text, a, forward=False)
    return Segmentation(tuple(spans), score_spans(text, a, spans))


def segment(text: str, a: Automaton, decoder: str = "llaca") -> Segmentation:
    if decoder == "llaca":
        return segment_llaca(text, a)
    if decoder == "uni":
        return segment_unigram(text, a)
    if decoder == "fmm":
        return segment_fmm(text, a)
    if decoder == "bmm":
        return segment_bmm(text, a)
    raise ValueError(f"unknown decoder {decoder!r}")


def output_tokens(text: str, seg: Segmentation) -> list[str]:
    """Tokens for the space-joined output format; whitespace spans dropped."""
    return [t for t in seg.tokens(text) if not t.isspace()]


def sentence_ppl(score: SentenceScore) -> float:
    return math.exp(-score.log_p / score.n)


def corpus_ppl(scores: Sequence[SentenceScore]) -> float:
    """Geometric mean of per-sentence perplexities."""
    if not scores:
        raise ValueError("corpus perplexity needs at least one sentence")
    return math.exp(sum(-s.log_p / s.n for s in scores) / len(scores))


def decode_corpus(sentences: Sequence[str], a: Automaton, decoder: str = "llaca"
                  ) -> tuple[list[list[str]], list[SentenceScore]]:
    """Decode every sentence; scores are always under the prefix-conditioned weights."""
    tokens, scores = [], []
    for text in sentences:
        seg = segment(text, a, decoder)
        log_p = score_spans(text, a, seg.spans) if decoder == "uni" else seg.score
        tokens.append(output_tokens(text, seg))
        scores.append(SentenceScore(log_p, len(text)))
    return tokens, scores
