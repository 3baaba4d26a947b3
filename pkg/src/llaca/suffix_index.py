"""Suffix array over a raw corpus, with substring counts and PMI.

Sentences are joined with U+0000, which sorts below every text character
and can never appear in a query, so no match spans two sentences.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .corpus import SENTINEL, RawCorpus
from .errors import DataError


def suffix_array(text: str) -> np.ndarray:
    """Prefix-doubling construction, O(n log^2 n) via numpy sorts."""
    n = len(text)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rank = np.frombuffer(text.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)
    sa = np.argsort(rank, kind="stable")
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        r1, r2 = rank[sa], second[sa]
        diff = np.empty(n, dtype=np.int64)
        diff[0] = 0
        diff[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[sa] = np.cumsum(diff)
        rank = new_rank
        if rank[sa[-1]] == n - 1 or k >= n:
            return sa
        k *= 2


@dataclass(frozen=True)
class SuffixIndex:
    buffer: str
    suffixes: tuple[int, ...]
    total_chars: int

    def _range(self, s: str) -> tuple[int, int]:
        buf, m = self.buffer, len(s)
        key = lambda i: buf[i:i + m]  # noqa: E731
        lo = bisect_left(self.suffixes, s, key=key)
        hi = bisect_right(self.suffixes, s, lo=lo, key=key)
        return lo, hi

    def occurrences(self, s: str) -> int:
        if not s:
            raise ValueError("query must be non-empty")
        if SENTINEL in s:
            return 0
        lo, hi = self._range(s)
        return hi - lo

    def unigram_p(self, s: str) -> float:
        if self.total_chars == 0:
            raise DataError("probability undefined on an empty index")
        return self.occurrences(s) / self.total_chars

    def pmi(self, w: str) -> float:
        """Minimum split log-ratio of p(w) against its two parts.

        Unseen words score -inf; attested single characters score +inf since
        there is nothing to split.
        """
        if not w:
            raise ValueError("word must be non-empty")
        occ = self.occurrences(w)
        if occ == 0:
            return -math.inf
        if len(w) == 1:
            return math.inf
        # log(p(w) / (p(a) p(b))) with p = count / N
        n = self.total_chars
        best = math.inf
        for i in range(1, len(w)):
            left = self.occurrences(w[:i])
            right = self.occurrences(w[i:])
            best = min(best, math.log(occ * n / (left * right)))
        return best


def build_index(corpus: RawCorpus) -> SuffixIndex:
    buffer = SENTINEL.join(corpus.sentences)
    sa = suffix_array(buffer)
    return SuffixIndex(buffer, tuple(int(i) for i in sa), sum(len(s) for s in corpus.sentences))


def occurrences(index: SuffixIndex, s: str) -> int:
    return index.occurrences(s)


def unigram_p(index: SuffixIndex, s: str) -> float:
    return index.unigram_p(s)


def pmi(index: SuffixIndex, w: str) -> float:
    return index.pmi(w)
