"""Token-level precision, recall and F-measure over character spans."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import GoldCorpus, spans_of
from .errors import AlignmentError


@dataclass(frozen=True)
class Mismatch:
    index: int
    gold: tuple[str, ...]
    pred: tuple[str, ...]


@dataclass(frozen=True)
class EvalReport:
    correct: int
    predicted: int
    gold: int
    per_sentence: tuple[Mismatch, ...] = field(default=(), repr=False)

    @property
    def precision(self) -> float:
        return self.correct / self.predicted if self.predicted else 0.0

    @property
    def recall(self) -> float:
        return self.correct / self.gold if self.gold else 0.0

    @property
    def f_measure(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0

    def summary(self) -> str:
        return (f"P={self.precision:.4f} R={self.recall:.4f} F={self.f_measure:.4f} "
                f"correct={self.correct} pred={self.predicted} gold={self.gold}")


def token_prf(gold: GoldCorpus | Sequence[Sequence[str]], pred: Sequence[Sequence[str]]) -> EvalReport:
    """Micro-averaged span P/R/F; both sides must cover identical characters."""
    gold_sents = gold.sentences if isinstance(gold, GoldCorpus) else gold
    if len(gold_sents) != len(pred):
        raise AlignmentError(
            f"sentence count mismatch: gold has {len(gold_sents)}, prediction has {len(pred)}")
    correct = n_pred = n_gold = 0
    mismatches = []
    for i, (g, p) in enumerate(zip(gold_sents, pred)):
        if "".join(g) != "".join(p):
            raise AlignmentError(f"line {i + 1}: characters differ between gold and prediction")
        gs, ps = set(spans_of(g)), set(spans_of(p))
        hit = len(gs & ps)
        correct += hit
        n_pred += len(ps)
        n_gold += len(gs)
        if hit != len(gs) or hit != len(ps):
            mismatches.append(Mismatch(i, tuple(g), tuple(p)))
    return EvalReport(correct, n_pred, n_gold, tuple(mismatches))


def write_mismatches(report: EvalReport, path: str | Path) -> None:
    lines = [f"{m.index}\t{' '.join(m.gold)}\t{' '.join(m.pred)}\n" for m in report.per_sentence]
    Path(path).write_text("".join(lines), encoding="utf-8")
