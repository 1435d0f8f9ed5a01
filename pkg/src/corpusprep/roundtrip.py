"""Structural verification of an emitted corpus file.

Re-implements the consumer's checks (header fields, embedding widths,
head indices, range bounds) against the raw JSONL so problems are caught
before the file ever reaches the tagger.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class RoundtripReport:
    passed: bool
    n_sentences: int
    per_sentence: dict[str, list[str]] = field(default_factory=dict)

    def summary(self) -> str:
        lines = [f"sentences: {self.n_sentences}"]
        for sid in sorted(self.per_sentence):
            problems = self.per_sentence[sid]
            if problems:
                lines.append(f"{sid}: FAIL ({'; '.join(problems)})")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _check_sentence(rec: dict, dim: int) -> list[str]:
    problems = []
    tokens = rec.get("tokens", [])
    n = len(tokens)
    if n == 0:
        problems.append("no tokens")
    for i, tok in enumerate(tokens):
        emb = tok.get("emb", [])
        if len(emb) != dim:
            problems.append(f"token {i}: embedding width {len(emb)} != {dim}")
        head = tok.get("head", -2)
        if head == i or head < -1 or head >= n:
            problems.append(f"token {i}: invalid head {head}")
        if not tok.get("lemma"):
            problems.append(f"token {i}: empty lemma")
    chunks = sorted(tuple(c) for c in rec.get("noun_chunks", []))
    for s, e in chunks:
        if not (0 <= s < e <= n):
            problems.append(f"noun_chunk [{s},{e}) out of bounds")
    for (s1, e1), (s2, e2) in zip(chunks, chunks[1:]):
        if s2 < e1:
            problems.append(f"noun_chunks [{s1},{e1}) and [{s2},{e2}) overlap")
    for item in rec.get("entities", []):
        s, e = int(item[0]), int(item[1])
        if not (0 <= s < e <= n):
            problems.append(f"entity [{s},{e}) out of bounds")
    return problems


def check_roundtrip(path) -> RoundtripReport:
    """Per-sentence structural report; never raises on bad content."""
    per_sentence: dict[str, list[str]] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            problems = []
            if header.get("format") != "tallor-corpus":
                problems.append(f"bad format {header.get('format')!r}")
            if header.get("version") != 1:
                problems.append(f"bad version {header.get('version')!r}")
            dim = int(header.get("dim", 0))
            if dim < 1:
                problems.append(f"bad dim {dim}")
            if problems:
                return RoundtripReport(False, 0, {"<header>": problems})
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                rec = json.loads(line)
                sid = str(rec.get("id", f"<line {lineno}>"))
                per_sentence[sid] = _check_sentence(rec, dim)
    except (OSError, ValueError) as exc:
        return RoundtripReport(False, len(per_sentence),
                               dict(per_sentence, **{"<file>": [str(exc)]}))
    passed = all(not p for p in per_sentence.values())
    return RoundtripReport(passed, len(per_sentence), per_sentence)
