"""Weighted Aho-Corasick automaton over a counted vocabulary.

Besides the usual goto/fail/output structure every node knows its nearest
final ancestor (``prev_final``) and the total count of words below it
(``subtree_sum``). A word's probability is its count divided by the subtree
sum of its nearest final ancestor, the root standing in for the empty word.
With no nested words this reduces to plain unigram frequencies.

Nodes live in parallel lists indexed by id; node 0 is the root.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator

from .errors import NotInVocabularyError
from .vocab import Vocabulary

ROOT = 0
NO_LINK = -1


@dataclass(frozen=True)
class Node:
    id: int
    transitions: dict[str, int]
    fail: int
    is_final: bool
    count: int
    prev_final: int
    subtree_sum: int
    output_link: int
    depth: int


class Automaton:
    def __init__(self) -> None:
        self.goto: list[dict[str, int]] = [{}]
        # goto plus virtual transitions; characters absent here fall back to
        # the root's goto, which is what the fail chain would reach anyway
        self.delta: list[dict[str, int]] = [{}]
        self.fail: list[int] = [ROOT]
        self.parent: list[int] = [ROOT]
        self.depth: list[int] = [0]
        self.count: list[int] = [0]
        self.is_final: list[bool] = [True]
        self.prev_final: list[int] = [ROOT]
        self.subtree_sum: list[int] = [0]
        self.output_link: list[int] = [NO_LINK]
        self.word_index: dict[str, int] = {}
        self.log_prob: list[float] = [0.0]
        self.unigram_log_prob: list[float] = [0.0]
        self.order: list[int] = [ROOT]

    def __len__(self) -> int:
        return len(self.goto)

    @property
    def total_count(self) -> int:
        return self.subtree_sum[ROOT]

    @property
    def fallback_log_prob(self) -> float:
        """Log weight of a single unknown character: 1 / (total + 1)."""
        return -math.log(self.subtree_sum[ROOT] + 1)

    def node(self, i: int) -> Node:
        trans = dict(self.goto[ROOT])
        trans.update(self.delta[i])
        return Node(
            id=i,
            transitions=trans,
            fail=self.fail[i],
            is_final=self.is_final[i],
            count=self.count[i],
            prev_final=self.prev_final[i],
            subtree_sum=self.subtree_sum[i],
            output_link=self.output_link[i],
            depth=self.depth[i],
        )

    def string_of(self, i: int) -> str:
        chars = []
        while i != ROOT:
            p = self.parent[i]
            chars.append(next(c for c, v in self.goto[p].items() if v == i))
            i = p
        return "".join(reversed(chars))

    def step(self, state: int, ch: str) -> int:
        nxt = self.delta[state].get(ch)
        if nxt is None:
            nxt = self.goto[ROOT].get(ch, ROOT)
        return nxt

    def _insert(self, word: str, count: int) -> None:
        node = ROOT
        goto = self.goto
        for ch in word:
            nxt = goto[node].get(ch)
            if nxt is None:
                nxt = len(goto)
                goto[node][ch] = nxt
                goto.append({})
                self.parent.append(node)
                self.depth.append(self.depth[node] + 1)
                self.count.append(0)
                self.is_final.append(False)
            node = nxt
        self.count[node] += count
        self.is_final[node] = True
        self.word_index[word] = node

    def _link(self) -> None:
        """Breadth-first pass setting fail, virtual transitions and prev links."""
        n = len(self.goto)
        goto, parent, is_final = self.goto, self.parent, self.is_final
        fail = [ROOT] * n
        delta: list[dict[str, int]] = [{} for _ in range(n)]
        prev_final = [ROOT] * n
        output_link = [NO_LINK] * n
        root_goto = goto[ROOT]
        delta[ROOT] = root_goto
        order = [ROOT]
        queue = deque()
        for v in root_goto.values():
            queue.append(v)
        while queue:
            u = queue.popleft()
            order.append(u)
            p = parent[u]
            prev_final[u] = p if is_final[p] else prev_final[p]
            f = fail[u]
            if f == ROOT:
                delta[u] = goto[u]
            else:
                merged = dict(delta[f])
                merged.update(goto[u])
                delta[u] = merged
            output_link[u] = f if (f != ROOT and is_final[f]) else output_link[f]
            for ch, v in goto[u].items():
                if u != ROOT:
                    t = delta[f].get(ch)
                    fail[v] = root_goto.get(ch, ROOT) if t is None else t
                queue.append(v)
        self.fail, self.delta = fail, delta
        self.prev_final, self.output_link = prev_final, output_link
        self.order = order

    def _accumulate(self) -> None:
        sums = list(self.count)
        parent = self.parent
        for u in reversed(self.order):
            if u != ROOT:
                sums[parent[u]] += sums[u]
        self.subtree_sum = sums
        total = sums[ROOT]
        self.log_prob = [0.0] * len(sums)
        self.unigram_log_prob = [0.0] * len(sums)
        for u in self.word_index.values():
            c = self.count[u]
            self.log_prob[u] = math.log(c / sums[self.prev_final[u]])
            self.unigram_log_prob[u] = math.log(c / total)

    def word_prob(self, w: str) -> float:
        node = self.word_index.get(w)
        if node is None:
            raise NotInVocabularyError(w)
        return self.count[node] / self.subtree_sum[self.prev_final[node]]

    def iter_matches(self, text: str) -> Iterator[tuple[int, int]]:
        """Yield ``(end, node)`` for every vocabulary occurrence in ``text``."""
        delta, root_goto = self.delta, self.goto[ROOT]
        is_final, output_link = self.is_final, self.output_link
        state = ROOT
        for i, ch in enumerate(text, start=1):
            nxt = delta[state].get(ch)
            state = root_goto.get(ch, ROOT) if nxt is None else nxt
            if state == ROOT:
                continue
            node = state if is_final[state] else output_link[state]
            while node != NO_LINK:
                yield i, node
                node = output_link[node]

    def scan(self, text: str) -> list[tuple[int, int]]:
        """All matches as ``(end_position, word_length)`` pairs."""
        depth = self.depth
        return [(end, depth[node]) for end, node in self.iter_matches(text)]


def build(v: Vocabulary) -> Automaton:
    a = Automaton()
    for word in sorted(v.entries):
        a._insert(word, v.entries[word].count)
    a._link()
    a._accumulate()
    return a


def word_prob(a: Automaton, w: str) -> float:
    return a.word_prob(w)


def scan(a: Automaton, text: str) -> list[tuple[int, int]]:
    return a.scan(text)
