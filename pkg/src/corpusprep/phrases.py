"""Frequency + PMI phrase mining over corpus lemmas."""

from __future__ import annotations

import json
import math
from collections import Counter


def _corpus_lemmas(path) -> list[list[str]]:
    sentences = []
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != "tallor-corpus":
            raise ValueError(f"not a corpus file: {header.get('format')!r}")
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                sentences.append([t["lemma"] for t in rec["tokens"]])
    return sentences


def mine_phrases(corpus_path, min_count: int = 5, max_len: int = 3,
                 pmi_floor: float = 1.0) -> list[str]:
    """Lemma n-grams (2..max_len) that are frequent and cohesive.

    An n-gram qualifies when its count reaches ``min_count`` and the PMI
    of its worst internal split is at least ``pmi_floor``: the n-gram has
    to be more than the chance co-occurrence of its parts.
    """
    if min_count < 1 or max_len < 2:
        raise ValueError("need min_count >= 1 and max_len >= 2")
    sentences = _corpus_lemmas(corpus_path)
    total = sum(len(s) for s in sentences)
    if total == 0:
        return []
    grams: dict[int, Counter] = {k: Counter() for k in range(1, max_len + 1)}
    for lemmas in sentences:
        for k in range(1, max_len + 1):
            for i in range(len(lemmas) - k + 1):
                grams[k][tuple(lemmas[i:i + k])] += 1

    def prob(gram: tuple) -> float:
        return grams[len(gram)][gram] / total

    out = []
    for k in range(2, max_len + 1):
        for gram, count in grams[k].items():
            if count < min_count:
                continue
            worst = math.inf
            for split in range(1, k):
                left, right = gram[:split], gram[split:]
                denom = prob(left) * prob(right)
                if denom == 0:
                    continue
                worst = min(worst, math.log2(prob(gram) / denom))
            if worst >= pmi_floor:
                out.append(" ".join(gram))
    return sorted(out)


def write_lexicon(phrases: list[str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for phrase in phrases:
            fh.write(phrase + "\n")
