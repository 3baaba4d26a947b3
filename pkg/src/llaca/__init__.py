"""Unsupervised word segmentation from LLM-sampled vocabularies.

A weighted Aho-Corasick automaton scores candidate words with a
prefix-conditioned (variable n-gram) probability and Viterbi picks the best
tiling of each sentence.
"""

from .automaton import Automaton, build
from .corpus import GoldCorpus, RawCorpus, Span, load_gold, load_raw, strip_gold
from .evaluate import EvalReport, token_prf
from .segmenter import (
    Segmentation,
    SentenceScore,
    corpus_ppl,
    segment_bmm,
    segment_fmm,
    segment_llaca,
    segment_unigram,
    sentence_ppl,
)
from .suffix_index import SuffixIndex, build_index
from .vocab import Vocabulary, count_words, load_tsv, merge, pmi_filter, save_tsv

__all__ = [
    "Automaton", "EvalReport", "GoldCorpus", "RawCorpus", "Segmentation", "SentenceScore",
    "Span", "SuffixIndex", "Vocabulary", "build", "build_index", "corpus_ppl", "count_words",
    "load_gold", "load_raw", "load_tsv", "merge", "pmi_filter", "save_tsv", "segment_bmm",
    "segment_fmm", "segment_llaca", "segment_unigram", "sentence_ppl", "strip_gold", "token_prf",
]
