import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from llaca.automaton import build
from llaca.corpus import Span
from llaca.segmenter import (
    SegDAG, SentenceScore, build_dag, corpus_ppl, decode_corpus, score_spans, segment_bmm, segment_fmm,
    segment_llaca, segment_unigram, sentence_ppl, viterbi,
)
from llaca.vocab import Vocabulary

from oracles import best_tiling, naive_word_prob

CJK = "甲乙丙丁"


def auto(counts):
    if not isinstance(counts, dict):
        counts = {w: 1 for w in counts}
    return build(Vocabulary.from_counts(counts))


def spans(seg):
    return [(s.start, s.end) for s in seg.spans]


def oracle(text, counts, uni=False):
    total = sum(counts.values())
    fb = -math.log(total + 1)

    def weight(s, e):
        w = text[s:e]
        if w in counts:
            return math.log(counts[w] / total) if uni else math.log(naive_word_prob(counts, w))
        return fb if e - s == 1 else None

    return best_tiling(text, weight)


def test_dag_sherd():
    a = auto(["she", "he", "her"])
    dag = build_dag("sherd", a)
    edges = dag.edge_set()
    fb = -math.log(4)
    assert {(0, 3), (1, 3), (1, 4)} <= set(edges)
    assert [k for k, v in edges.items() if v == fb] == [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
    assert len(edges) == 8


def test_dag_number_run():
    dag = build_dag("2024年", build(Vocabulary()))
    edges = dag.edge_set()
    assert edges[(0, 4)] == 0.0
    assert not any(s < 4 < e or (0 < s < 4) or (0 < e < 4) for s, e in edges)


@pytest.mark.parametrize("text, run", [("3.14元", (0, 4)), ("1,000人", (0, 5)), ("50%的", (0, 3))])
def test_dag_number_separators(text, run):
    edges = build_dag(text, build(Vocabulary())).edge_set()
    assert edges[run] == 0.0


def test_dag_punctuation_is_hard():
    dag = build_dag("a,b", build(Vocabulary()))
    assert set(dag.edge_set()) == {(0, 1), (1, 2), (2, 3)}
    assert {1, 2} <= dag.hard_boundaries


def test_dag_vocab_cannot_cross_punctuation():
    a = auto(["甲，乙", "甲"])
    edges = build_dag("甲，乙", a).edge_set()
    assert (0, 3) not in edges
    assert edges[(1, 2)] == 0.0


def test_viterbi_prefers_worked_example_word():
    counts = {"a": 1, "ab": 2, "ac": 3, "bc": 4}
    seg = segment_llaca("ab", auto(counts))
    assert spans(seg) == [(0, 2)]
    assert seg.score == pytest.approx(math.log(1 / 3))
    score, best = oracle("ab", counts)
    assert best == [(0, 2)] and score == pytest.approx(seg.score)


def test_viterbi_sheher_matches_enumeration():
    counts = {"she": 1, "he": 1, "her": 1}
    seg = segment_llaca("sheher", auto(counts))
    score, best = oracle("sheher", counts)
    assert spans(seg) == best
    assert seg.score == pytest.approx(score, abs=1e-9)


def test_single_char_empty_vocab():
    seg = segment_llaca("x", build(Vocabulary()))
    assert spans(seg) == [(0, 1)]


def test_viterbi_unreachable_is_a_bug():
    with pytest.raises(AssertionError):
        viterbi(SegDAG(2, [[], [], []]))


WUHAN = {"武": 1, "市": 1, "长": 1, "武汉": 1, "市长": 1, "武汉市": 2}


def test_wuhan_mayor_ambiguity():
    # smallest counts (1..5 per word) where the two decoders disagree
    a = auto(WUHAN)
    assert segment_llaca("武汉市长", a).tokens("武汉市长") == ["武汉", "市长"]
    assert segment_unigram("武汉市长", a).tokens("武汉市长") == ["武汉市", "长"]
    for uni in (False, True):
        _, best = oracle("武汉市长", WUHAN, uni)
        seg = (segment_unigram if uni else segment_llaca)("武汉市长", a)
        assert spans(seg) == best


def test_empty_vocab_all_single():
    assert spans(segment_llaca("甲乙丙", build(Vocabulary()))) == [(0, 1), (1, 2), (2, 3)]


def test_whole_text_word():
    a = auto({"甲乙丙": 1, "甲": 5, "乙": 5, "丙": 5})
    assert spans(segment_llaca("甲乙丙", a)) == oracle("甲乙丙", {"甲乙丙": 1, "甲": 5, "乙": 5, "丙": 5})[1]
    assert spans(segment_llaca("甲乙丙", auto(["甲乙丙"]))) == [(0, 3)]


def test_unigram_weight_definition():
    a = auto({"a": 1, "ab": 2, "ac": 3, "bc": 4})
    edges = build_dag("ab", a, "uni").edge_set()
    assert edges[(0, 2)] == pytest.approx(math.log(2 / 10))


def test_fmm_bmm_sherd():
    a = auto(["she", "he", "her"])
    assert segment_fmm("sherd", a).tokens("sherd") == ["she", "r", "d"]
    assert segment_bmm("sherd", a).tokens("sherd") == ["s", "her", "d"]


@pytest.mark.parametrize("seg", [segment_fmm, segment_bmm])
def test_greedy_simple(seg):
    assert seg("xyz", auto(["ab"])).tokens("xyz") == ["x", "y", "z"]
    assert seg("abab", auto(["ab"])).tokens("abab") == ["ab", "ab"]
    assert seg("甲乙", auto(["甲乙"])).tokens("甲乙") == ["甲乙"]


def test_whitespace_is_own_span():
    a = auto(["甲乙"])
    seg = segment_llaca("甲乙 丙", a)
    assert seg.tokens("甲乙 丙") == ["甲乙", " ", "丙"]


@pytest.mark.parametrize("score, expected", [
    (SentenceScore(0.0, 5), 1.0),
    (SentenceScore(-3.0, 3), math.e),
    (SentenceScore(math.log(1 / 8), 3), 2.0),
])
def test_sentence_ppl(score, expected):
    assert sentence_ppl(score) == pytest.approx(expected)


def test_corpus_ppl():
    s2 = SentenceScore(math.log(1 / 4), 2)
    s8 = SentenceScore(math.log(1 / 64), 2)
    assert sentence_ppl(s2) == pytest.approx(2) and sentence_ppl(s8) == pytest.approx(8)
    assert corpus_ppl([s2, s8]) == pytest.approx(4)
    assert corpus_ppl([s8] * 7) == pytest.approx(8)
    assert corpus_ppl([s2]) == pytest.approx(sentence_ppl(s2))
    with pytest.raises(ValueError):
        corpus_ppl([])


@given(st.lists(st.tuples(st.floats(-20, 0), st.integers(1, 30)), min_size=1, max_size=6), st.data())
def test_ppl_monotone_in_edge_probability(items, data):
    scores = [SentenceScore(lp, n) for lp, n in items]
    i = data.draw(st.integers(0, len(scores) - 1))
    lowered = list(scores)
    lowered[i] = SentenceScore(scores[i].log_p - 0.5, scores[i].n)
    assert corpus_ppl(lowered) > corpus_ppl(scores)


def random_instance(rng):
    n = rng.randint(1, 10)
    text = "".join(rng.choice(CJK) for _ in range(n))
    vocab = {}
    for _ in range(rng.randint(0, 8)):
        if rng.random() < 0.6 and n > 1:
            i = rng.randrange(n)
            w = text[i:i + rng.randint(1, 4)]
        else:
            w = "".join(rng.choice(CJK) for _ in range(rng.randint(1, 3)))
        vocab[w] = rng.randint(1, 6)
    return text, vocab


def test_viterbi_matches_enumeration_random():
    rng = random.Random(11)
    for _ in range(300):
        text, vocab = random_instance(rng)
        a = build(Vocabulary.from_counts(vocab))
        for uni in (False, True):
            seg = (segment_unigram if uni else segment_llaca)(text, a)
            score, best = oracle(text, vocab, uni)
            assert abs(seg.score - score) < 1e-9
            assert spans(seg) == best


def test_all_decoders_tile():
    rng = random.Random(12)
    for _ in range(200):
        text, vocab = random_instance(rng)
        text = text + rng.choice(["", "，", " ", "12", "ab"]) + text
        a = build(Vocabulary.from_counts(vocab))
        for decode in (segment_llaca, segment_unigram, segment_fmm, segment_bmm):
            sp = decode(text, a).spans
            assert sp[0].start == 0 and sp[-1].end == len(text)
            assert all(x.end == y.start for x, y in zip(sp, sp[1:]))


def test_prefix_free_unigram_agrees_with_llaca():
    rng = random.Random(13)
    for _ in range(100):
        text, vocab = random_instance(rng)
        vocab = {w: c for w, c in vocab.items() if not any(x != w and w.startswith(x) for x in vocab)}
        a = build(Vocabulary.from_counts(vocab))
        assert spans(segment_llaca(text, a)) == spans(segment_unigram(text, a))


def test_llaca_path_has_lowest_ppl():
    rng = random.Random(14)
    for _ in range(100):
        text, vocab = random_instance(rng)
        a = build(Vocabulary.from_counts(vocab))
        best = score_spans(text, a, segment_llaca(text, a).spans)
        for decode in (segment_unigram, segment_fmm, segment_bmm):
            assert score_spans(text, a, decode(text, a).spans) <= best + 1e-9


def test_decode_corpus_scores_under_llaca_weights():
    a = build(Vocabulary.from_counts(WUHAN))
    toks, scores = decode_corpus(["武汉市长"], a, "uni")
    assert toks == [["武汉市", "长"]]
    assert scores[0].log_p == pytest.approx(math.log(2 / 3) + math.log(1 / 7))
    assert scores[0].n == 4


def test_score_spans_charges_fallback_for_non_edges():
    a = auto({"甲乙": 3})
    assert score_spans("甲乙丙", a, [Span(0, 3)]) == pytest.approx(3 * -math.log(4))
