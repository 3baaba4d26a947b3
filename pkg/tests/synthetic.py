"""Deterministic synthetic corpus with engineered segmentation ambiguities.

Run as a script to regenerate the bundled files under tests/data/.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

DATA = Path(__file__).parent / "data"

# Phrases whose character string has a competing split that greedy
# longest-match gets wrong in one direction or the other.
AMBIGUOUS = [
    ["武汉", "市长"],          # forward greedy: 武汉市 长
    ["研究", "生命", "起源"],  # forward greedy: 研究生 命 ...
    ["结合", "成", "分子"],    # backward greedy: 结 合成 分子
    ["他", "说", "的", "确实", "在理"],  # backward greedy: 的确 实在 ...
]
# Contexts that attest the competing words on their own.
SUPPORT = [
    ["武汉市", "的", "经济", "发展"],
    ["研究生", "参加", "会议"],
    ["长江", "很", "长"],
    ["合成", "材料", "很", "重要"],
    ["实在", "是", "好"],
    ["的确", "是", "问题"],
    # single characters that give 市长 and 武汉 a prefix context
    ["市", "里", "很", "好"],
    ["武", "功", "很", "好"],
]
FILLER_SUBJ = ["我们", "他们", "学生", "政府", "人民"]
FILLER_VERB = ["讨论", "参加", "研究", "支持"]
FILLER_OBJ = ["问题", "会议", "经济", "建设", "城市", "发展"]
ENDINGS = [["了"], ["。"], []]

NOISE_WORDS = ["the", "mayor", "of", "city", "river", "study", "life", "origin", "is", "good"]


def _sentence(rng: random.Random) -> list[str]:
    r = rng.random()
    if r < 0.45:
        core = list(rng.choice(AMBIGUOUS))
    elif r < 0.70:
        core = list(rng.choice(SUPPORT))
    else:
        core = [rng.choice(FILLER_SUBJ), rng.choice(FILLER_VERB), rng.choice(FILLER_OBJ)]
    if rng.random() < 0.5:
        core = [rng.choice(FILLER_SUBJ), "在"] + core if rng.random() < 0.3 else [rng.choice(FILLER_SUBJ)] + core
    return core + rng.choice(ENDINGS)


def generate(n: int = 240, seed: int = 7) -> list[list[str]]:
    """``n`` distinct sentences; fixtures are keyed by sentence text."""
    rng = random.Random(seed)
    seen: set[str] = set()
    out = []
    while len(out) < n:
        toks = _sentence(rng)
        if rng.random() < 0.5:
            toks = toks[:-1] if toks[-1] in ("了", "。") else toks
            toks = toks + ["，"] + _sentence(rng)
        key = "".join(toks)
        if key not in seen:
            seen.add(key)
            out.append(toks)
    return out


def translate(tokens: list[str], rng: random.Random) -> str:
    return " ".join(rng.choice(NOISE_WORDS) for _ in tokens)


def fixture_lines(gold: list[list[str]], noise: float = 0.0, seed: int = 11) -> list[str]:
    """Fixture records; a ``noise`` fraction of answers become 'translations'."""
    rng = random.Random(seed)
    k = round(noise * len(gold))
    noisy = set(rng.sample(range(len(gold)), k))
    out = []
    for i, toks in enumerate(gold):
        answer = translate(toks, rng) if i in noisy else " ".join(toks)
        out.append(f">{''.join(toks)}\n<{answer}\n")
    return out


def write_all(directory: Path = DATA) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    gold = generate()
    (directory / "synthetic_gold.txt").write_text("".join(" ".join(t) + "\n" for t in gold), encoding="utf-8")
    (directory / "fixture_clean.txt").write_text("".join(fixture_lines(gold)), encoding="utf-8")
    (directory / "fixture_noise10.txt").write_text("".join(fixture_lines(gold, 0.10)), encoding="utf-8")


if __name__ == "__main__":
    write_all(Path(sys.argv[1]) if len(sys.argv) > 1 else DATA)
