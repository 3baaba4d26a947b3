"""Command-line driver: sample -> vocab -> build -> segment -> eval/ppl, and iterate."""

from __future__ import annotations

import argparse
import configparser
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import automaton as ac
from .corpus import (RawCorpus, load_gold, load_raw, parse_gold_lines, save_segmented, spans_of,
                     strip_gold)
from .errors import ConfigError, DataError, EmptyVocabularyError, LlacaError, UpstreamError
from .evaluate import token_prf, write_mismatches
from .llm_client import ClientConfig, Fixture, replay_fixture, sample
from .segmenter import DECODERS, SentenceScore, corpus_ppl, decode_corpus, score_spans
from .suffix_index import build_index
from .vocab import DEFAULT_TOP_RATIO, Vocabulary, count_words, load_tsv, merge, pmi_filter, save_tsv

log = logging.getLogger("llaca")

PATH_KEYS = ("raw", "gold", "vocab", "output", "fixture", "pred")
CLIENT_KEYS = {
    "endpoint": str, "model": str, "prompt_template": str, "temperature": float,
    "max_retries": int, "timeout": float, "concurrency": int, "backoff": float,
}


@dataclass
class RunConfig:
    paths: dict[str, str] = field(default_factory=dict)
    client: ClientConfig = field(default_factory=ClientConfig)
    top_ratio: float = DEFAULT_TOP_RATIO
    iterations: int = 1
    decoder: str = "llaca"

    def __post_init__(self) -> None:
        if self.decoder not in DECODERS:
            raise ConfigError(f"unknown decoder {self.decoder!r}; choose from {', '.join(DECODERS)}")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if not 0 < self.top_ratio <= 1:
            raise ConfigError(f"top_ratio must lie in (0, 1], got {self.top_ratio}")

    def path(self, key: str, required: bool = True) -> Path | None:
        value = self.paths.get(key)
        if value is None and required:
            raise ConfigError(f"missing required path: --{key}")
        return Path(value) if value is not None else None


def read_config_file(path: str | Path) -> dict[str, str]:
    """Read ``key = value`` lines; an optional ``[llaca]`` header is allowed."""
    text = Path(path).read_text(encoding="utf-8")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    if not text.lstrip().startswith("["):
        text = "[llaca]\n" + text
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    merged: dict[str, str] = {}
    for section in parser.sections():
        merged.update(parser[section])
    return merged


def make_run_config(args: argparse.Namespace) -> RunConfig:
    settings: dict[str, str] = {}
    if args.config:
        settings.update(read_config_file(args.config))
    for key, value in vars(args).items():
        if value is not None and key not in ("command", "config", "func", "verbose"):
            settings[key] = value
    try:
        client_kwargs = {k: conv(settings[k]) for k, conv in CLIENT_KEYS.items() if k in settings}
        if "prompt" in settings:
            client_kwargs["prompt_template"] = str(settings["prompt"]).replace("\\n", "\n")
        client_kwargs["seed"] = int(settings.get("seed", 0))
        return RunConfig(
            paths={k: str(settings[k]) for k in PATH_KEYS if k in settings},
            client=ClientConfig(**client_kwargs),
            top_ratio=float(settings.get("top_ratio", DEFAULT_TOP_RATIO)),
            iterations=int(settings.get("iterations", 1)),
            decoder=str(settings.get("decoder", "llaca")),
        )
    except LlacaError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _raw_corpus(cfg: RunConfig) -> RawCorpus:
    raw = cfg.path("raw", required=False)
    if raw is not None:
        return load_raw(raw)
    gold = cfg.path("gold", required=False)
    if gold is None:
        raise ConfigError("one of --raw or --gold is required")
    return strip_gold(load_gold(gold))


def _fixture(cfg: RunConfig) -> Fixture | None:
    path = cfg.path("fixture", required=False)
    return replay_fixture(path) if path is not None else None


def _load_vocab(cfg: RunConfig) -> Vocabulary:
    path = cfg.path("vocab")
    if not path.exists():
        raise DataError(f"vocabulary file not found: {path}")
    return load_tsv(path)


def _emit(line: str) -> None:
    print(line, flush=True)


def cmd_sample(cfg: RunConfig, record: str | None = None) -> list[list[str]]:
    corpus = _raw_corpus(cfg)
    if len(corpus) == 0:
        raise DataError("raw corpus is empty")
    fixture = _fixture(cfg)
    if record is not None:
        fixture = Fixture(record=True)
    result = sample(cfg.client, corpus, fixture)
    if len(result.failed_batches) == len(result.batch_stats):
        raise UpstreamError("every batch request failed")
    out = cfg.path("output")
    save_segmented(result.token_lists(), out)
    audit = [f"{i}\t{'accepted' if i in result.accepted else 'rejected'}\t{line}\n"
             for i, line in enumerate(result.lines)]
    Path(str(out) + ".audit.tsv").write_text("".join(audit), encoding="utf-8")
    n_rej = len(result.rejected)
    _emit(f"sampled={len(corpus)} accepted={len(result.accepted)} rejected={n_rej} "
          f"rejected_rate={n_rej / len(corpus):.4f} failed_batches={len(result.failed_batches)}")
    if record is not None:
        fixture.save(record)
    return result.token_lists()


def cmd_vocab(cfg: RunConfig, samples: Sequence[str]) -> Vocabulary:
    vocab = Vocabulary()
    all_tokens: list[list[str]] = []
    for path in samples:
        tokens = parse_gold_lines(load_raw(path).sentences) if Path(path).stat().st_size else []
        all_tokens.extend(tokens)
        vocab = merge(vocab, count_words(tokens))
    if len(vocab) == 0:
        raise EmptyVocabularyError("no accepted segmentations to count")
    if cfg.path("raw", required=False) or cfg.path("gold", required=False):
        corpus = _raw_corpus(cfg)
    else:
        corpus = RawCorpus(tuple("".join(t) for t in all_tokens))
    filtered = pmi_filter(vocab, build_index(corpus), cfg.top_ratio)
    save_tsv(filtered, cfg.path("vocab"))
    _emit(f"candidates={len(vocab)} kept={len(filtered)} total_count={filtered.total_count}")
    return filtered


def cmd_build(cfg: RunConfig) -> ac.Automaton:
    t0 = time.perf_counter()
    vocab = _load_vocab(cfg)
    a = ac.build(vocab)
    dt = time.perf_counter() - t0
    _emit(f"words={len(vocab)} nodes={len(a)} total_count={a.total_count} seconds={dt:.3f}")
    return a


def cmd_segment(cfg: RunConfig) -> list[list[str]]:
    a = ac.build(_load_vocab(cfg))
    corpus = _raw_corpus(cfg)
    tokens, _ = decode_corpus(corpus.sentences, a, cfg.decoder)
    save_segmented(tokens, cfg.path("output"))
    return tokens


def cmd_eval(cfg: RunConfig, mismatches: str | None = None):
    gold = load_gold(cfg.path("gold"))
    pred = parse_gold_lines(load_raw(cfg.path("pred")).sentences)
    report = token_prf(gold, pred)
    if mismatches:
        write_mismatches(report, mismatches)
    _emit(report.summary())
    return report


def cmd_ppl(cfg: RunConfig) -> float:
    a = ac.build(_load_vocab(cfg))
    pred_path = cfg.path("pred", required=False)
    if pred_path is not None:
        scores = []
        for toks in parse_gold_lines(load_raw(pred_path).sentences):
            text = "".join(toks)
            scores.append(SentenceScore(score_spans(text, a, spans_of(toks)), len(text)))
    else:
        _, scores = decode_corpus(_raw_corpus(cfg).sentences, a, cfg.decoder)
    value = corpus_ppl(scores)
    _emit(f"ppl={value:.4f} sentences={len(scores)}")
    return value


def cmd_iterate(cfg: RunConfig) -> list[dict]:
    """Resample each iteration, merge counts, re-filter, rebuild, decode with every decoder."""
    gold = load_gold(cfg.path("gold"))
    corpus = _raw_corpus(cfg)
    if len(corpus) == 0:
        raise DataError("raw corpus is empty")
    index = build_index(corpus)
    fixture = _fixture(cfg)
    cumulative = Vocabulary()
    reports = []
    _emit(f"# iteration semantics: cumulative count merge, PMI re-filter each iteration "
          f"(top_ratio={cfg.top_ratio}, seed={cfg.client.seed})")
    for t in range(1, cfg.iterations + 1):
        result = sample(cfg.client, corpus, fixture, seed=cfg.client.seed + t)
        cumulative = merge(cumulative, count_words(result.token_lists()))
        if len(cumulative) == 0:
            raise EmptyVocabularyError(f"iteration {t}: no accepted segmentations yet")
        vocab = pmi_filter(cumulative, index, cfg.top_ratio)
        a = ac.build(vocab)
        for decoder in DECODERS:
            tokens, scores = decode_corpus(corpus.sentences, a, decoder)
            rep = token_prf(gold, tokens)
            row = {"iter": t, "decoder": decoder, "P": rep.precision, "R": rep.recall,
                   "F": rep.f_measure, "ppl": corpus_ppl(scores), "vocab": len(vocab)}
            reports.append(row)
            _emit(f"iter={t} decoder={decoder} P={row['P']:.4f} R={row['R']:.4f} "
                  f"F={row['F']:.4f} ppl={row['ppl']:.4f} vocab={row['vocab']}")
    vocab_path = cfg.path("vocab", required=False)
    if vocab_path is not None:
        save_tsv(vocab, vocab_path)
    return reports


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file; flags override it")
    common.add_argument("--raw")
    common.add_argument("--gold")
    common.add_argument("--vocab")
    common.add_argument("--output")
    common.add_argument("--pred")
    common.add_argument("--fixture")
    common.add_argument("--decoder", choices=DECODERS)
    common.add_argument("--top-ratio", dest="top_ratio", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--iterations", type=int)
    common.add_argument("--endpoint")
    common.add_argument("--model")
    common.add_argument("--concurrency", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="llaca", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("sample", parents=[common], help="LLM segmentation of the raw corpus")
    p.add_argument("--record", help="call the endpoint and write answers to this fixture file")
    p = sub.add_parser("vocab", parents=[common], help="count + PMI-filter sampled lines into a TSV")
    p.add_argument("samples", nargs="+", help="segmented-lines files written by `sample`")
    sub.add_parser("build", parents=[common], help="build the automaton from a TSV and report stats")
    sub.add_parser("segment", parents=[common], help="decode raw sentences")
    p = sub.add_parser("eval", parents=[common], help="token P/R/F of --pred against --gold")
    p.add_argument("--mismatches", help="write one mismatch record per line here")
    sub.add_parser("ppl", parents=[common], help="corpus perplexity under the vocabulary")
    sub.add_parser("iterate", parents=[common], help="multi-iteration sampling with all decoders")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    extra = {k: getattr(args, k, None) for k in ("record", "samples", "mismatches")}
    for k in extra:
        if hasattr(args, k):
            delattr(args, k)
    try:
        cfg = make_run_config(args)
        if args.command == "sample":
            cmd_sample(cfg, record=extra["record"])
        elif args.command == "vocab":
            cmd_vocab(cfg, extra["samples"])
        elif args.command == "build":
            cmd_build(cfg)
        elif args.command == "segment":
            cmd_segment(cfg)
        elif args.command == "eval":
            cmd_eval(cfg, extra["mismatches"])
        elif args.command == "ppl":
            cmd_ppl(cfg)
        elif args.command == "iterate":
            cmd_iterate(cfg)
    except LlacaError as exc:
        print(f"llaca: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"llaca: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
