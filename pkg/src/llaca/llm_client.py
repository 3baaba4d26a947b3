"""LLM sampling: batch planning, chat-completions requests, fixture replay."""

from __future__ import annotations

import logging
import math
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import httpx

from .corpus import RawCorpus
from .errors import ConfigError, EmptyVocabularyError
from .suffix_index import SuffixIndex
from .vocab import DEFAULT_TOP_RATIO, Vocabulary, count_words, merge, parse_llm_lines, pmi_filter

log = logging.getLogger(__name__)

DEFAULT_PROMPT = (
    "Segment the following text into words. Separate words with single spaces. "
    "Output one line per input line, with no explanations. {TEXT}"
)
API_KEY_ENV = "LLACA_API_KEY"


@dataclass
class ClientConfig:
    endpoint: str = "http://localhost:8000/v1/chat/completions"
    model: str = "qwen1.5-7b-chat"
    prompt_template: str = DEFAULT_PROMPT
    temperature: float = 0.0
    max_retries: int = 3
    timeout: float = 60.0
    seed: int = 0
    concurrency: int = 1
    backoff: float = 1.0

    def __post_init__(self) -> None:
        if self.prompt_template.count("{TEXT}") != 1:
            raise ConfigError("prompt_template must contain exactly one {TEXT} slot")
        if self.temperature < 0:
            raise ConfigError("temperature must be non-negative")
        if self.max_retries < 0 or self.concurrency < 1:
            raise ConfigError("max_retries must be >= 0 and concurrency >= 1")

    def render(self, sentences: Sequence[str]) -> str:
        return self.prompt_template.replace("{TEXT}", "\n".join(sentences))


@dataclass(frozen=True)
class BatchPlan:
    batches: tuple[tuple[int, ...], ...]


def make_batches(corpus: RawCorpus | Sequence[str], seed: int = 0) -> BatchPlan:
    """Shuffle sentence indices and cut them into runs of ceil(sqrt(K))."""
    k = len(corpus)
    if k == 0:
        return BatchPlan(())
    order = list(range(k))
    random.Random(seed).shuffle(order)
    size = math.isqrt(k - 1) + 1
    return BatchPlan(tuple(tuple(order[i:i + size]) for i in range(0, k, size)))


class Fixture:
    """Sentence -> output-line map used in place of the network.

    In record mode, misses go to the live client and the answers are kept
    so :meth:`save` can write them out.
    """

    def __init__(self, mapping: dict[str, str] | None = None, record: bool = False) -> None:
        self.mapping = dict(mapping or {})
        self.record = record

    def __len__(self) -> int:
        return len(self.mapping)

    def lookup(self, sentence: str) -> str:
        return self.mapping.get(sentence, "")

    def save(self, path: str | Path) -> None:
        lines = []
        for src, out in self.mapping.items():
            lines.append(f">{src}\n<{out}\n")
        Path(path).write_text("".join(lines), encoding="utf-8")


def replay_fixture(path: str | Path) -> Fixture:
    """Load a fixture of alternating ``>sentence`` / ``<output`` lines."""
    mapping: dict[str, str] = {}
    pending: str | None = None
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if line.startswith(">"):
            pending = line[1:]
        elif line.startswith("<") and pending is not None:
            if pending in mapping:
                log.warning("%s:%d: duplicate fixture entry for %r, keeping the last", path, lineno, pending)
            mapping[pending] = line[1:]
            pending = None
    return Fixture(mapping)


def _post_chat(cfg: ClientConfig, prompt: str, client: httpx.Client) -> httpx.Response:
    headers = {"Content-Type": "application/json"}
    key = os.environ.get(API_KEY_ENV) or os.environ.get("OPENAI_API_KEY")
    if key:
        headers["Authorization"] = f"Bearer {key}"
    body = {
        "model": cfg.model,
        "temperature": cfg.temperature,
        "messages": [{"role": "user", "content": prompt}],
    }
    return client.post(cfg.endpoint, json=body, headers=headers, timeout=cfg.timeout)


def _response_lines(resp: httpx.Response) -> list[str]:
    try:
        content = resp.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError):
        return []
    if not isinstance(content, str):
        return []
    return content.strip("\n").split("\n")


@dataclass
class BatchResult:
    indices: tuple[int, ...]
    lines: list[str]
    failed: bool = False


def request_segmentation(cfg: ClientConfig, batch: Sequence[str], fixture: Fixture | None = None,
                         client: httpx.Client | None = None) -> list[str]:
    return _request(cfg, batch, fixture, client).lines


def _request(cfg: ClientConfig, batch: Sequence[str], fixture: Fixture | None,
             client: httpx.Client | None) -> BatchResult:
    if fixture is not None and not fixture.record:
        return BatchResult((), [fixture.lookup(s) for s in batch])
    own = client is None
    client = client or httpx.Client()
    lines: list[str] | None = None
    try:
        for attempt in range(cfg.max_retries + 1):
            try:
                resp = _post_chat(cfg, cfg.render(batch), client)
            except httpx.HTTPError as exc:
                log.warning("batch request failed (attempt %d): %s", attempt + 1, exc)
            else:
                if resp.is_success:
                    lines = _response_lines(resp)
                    break
                log.warning("batch request returned HTTP %d (attempt %d)", resp.status_code, attempt + 1)
            if attempt < cfg.max_retries:
                time.sleep(cfg.backoff * 2 ** attempt)
    finally:
        if own:
            client.close()
    failed = lines is None
    lines = (lines or [])[: len(batch)]
    lines += [""] * (len(batch) - len(lines))
    if fixture is not None and not failed:
        for s, out in zip(batch, lines):
            fixture.mapping[s] = out
    return BatchResult((), lines, failed)


@dataclass
class SampleResult:
    """Per-sentence outcome of one sampling pass, in corpus order."""
    lines: list[str]
    accepted: dict[int, list[str]] = field(default_factory=dict)
    failed_batches: list[int] = field(default_factory=list)
    batch_stats: list[tuple[int, int]] = field(default_factory=list)

    @property
    def rejected(self) -> list[int]:
        return [i for i in range(len(self.lines)) if i not in self.accepted]

    def token_lists(self) -> list[list[str]]:
        return [self.accepted[i] for i in sorted(self.accepted)]


def sample(cfg: ClientConfig, corpus: RawCorpus, fixture: Fixture | None = None,
           seed: int | None = None, client: httpx.Client | None = None) -> SampleResult:
    """Run one LLM-WS pass over the corpus and validate every line."""
    plan = make_batches(corpus, cfg.seed if seed is None else seed)
    sents = corpus.sentences

    def run(batch: tuple[int, ...]) -> BatchResult:
        res = _request(cfg, [sents[i] for i in batch], fixture, client)
        res.indices = batch
        return res

    if cfg.concurrency > 1 and len(plan.batches) > 1:
        with ThreadPoolExecutor(max_workers=cfg.concurrency) as pool:
            results = list(pool.map(run, plan.batches))
    else:
        results = [run(b) for b in plan.batches]

    out = SampleResult([""] * len(sents))
    for bno, res in enumerate(results):
        batch_raw = [sents[i] for i in res.indices]
        ok = 0
        for i, line in zip(res.indices, res.lines):
            out.lines[i] = line
            accepted, _ = parse_llm_lines([sents[i]], [line])
            if accepted:
                out.accepted[i] = accepted[0]
                ok += 1
        if res.failed:
            out.failed_batches.append(bno)
        out.batch_stats.append((ok, len(batch_raw) - ok))
        log.info("batch %d: accepted %d, rejected %d", bno, ok, len(batch_raw) - ok)
    return out


def run_llm_ws(cfg: ClientConfig, corpus: RawCorpus, index: SuffixIndex,
               top_ratio: float = DEFAULT_TOP_RATIO, fixture: Fixture | None = None,
               per_batch_filter: bool = False, seed: int | None = None,
               client: httpx.Client | None = None) -> Vocabulary:
    """Sample, count, PMI-filter. Pools all batches before filtering by default."""
    result = sample(cfg, corpus, fixture, seed, client)
    if not result.accepted:
        raise EmptyVocabularyError("no LLM output line survived validation")
    if not per_batch_filter:
        return pmi_filter(count_words(result.token_lists()), index, top_ratio)
    plan = make_batches(corpus, cfg.seed if seed is None else seed)
    vocab = Vocabulary()
    for batch in plan.batches:
        toks = [result.accepted[i] for i in batch if i in result.accepted]
        if toks:
            vocab = merge(vocab, pmi_filter(count_words(toks), index, top_ratio))
    return vocab
