"""Corpus loading and validation.

Corpus files are JSON Lines: the first line is a header record
``{"format": "tallor-corpus", "version": 1, "dim": D}`` and every
following line is one sentence object with fields
``id, tokens[{text,lemma,pos,head,deprel,emb}], noun_chunks, entities?``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

FORMAT_NAME = "tallor-corpus"
FORMAT_VERSION = 1


class CorpusFormatError(ValueError):
    """Raised when a corpus, lexicon, or seed file violates its format."""


@dataclass
class TokenRecord:
    text: str
    lemma: str
    pos: str
    head: int
    deprel: str
    emb: np.ndarray

    def to_json(self) -> dict:
        return {
            "text": self.text,
            "lemma": self.lemma,
            "pos": self.pos,
            "head": self.head,
            "deprel": self.deprel,
            "emb": [float(x) for x in self.emb],
        }


@dataclass
class Sentence:
    id: str
    tokens: list[TokenRecord]
    noun_chunks: list[tuple[int, int]] = field(default_factory=list)
    gold: list[tuple[int, int, str]] | None = None

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def lemmas(self) -> list[str]:
        return [t.lemma for t in self.tokens]

    @property
    def text(self) -> str:
        return " ".join(t.text for t in self.tokens)

    def to_json(self) -> dict:
        rec = {
            "id": self.id,
            "tokens": [t.to_json() for t in self.tokens],
            "noun_chunks": [list(c) for c in self.noun_chunks],
        }
        if self.gold is not None:
            rec["entities"] = [[s, e, lab] for s, e, lab in self.gold]
        return rec


@dataclass
class Corpus:
    dim: int
    sentences: list[Sentence]

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def by_id(self, sid: str) -> Sentence:
        if not hasattr(self, "_by_id"):
            self._by_id = {s.id: s for s in self.sentences}
        return self._by_id[sid]

    def has_gold(self) -> bool:
        return any(s.gold is not None for s in self.sentences)


@dataclass
class PhraseLexicon:
    phrases: set[str]

    def __len__(self) -> int:
        return len(self.phrases)

    def __contains__(self, phrase: str) -> bool:
        return phrase in self.phrases

    @property
    def max_len(self) -> int:
        return max((p.count(" ") + 1 for p in self.phrases), default=0)


@dataclass
class ValidationReport:
    passed: bool
    n_sentences: int
    n_tokens: int
    gold_present: bool
    gold_per_label: dict[str, int]
    problems: list[str]

    def summary(self) -> str:
        lines = [
            f"sentences: {self.n_sentences}",
            f"tokens: {self.n_tokens}",
            f"gold: {'present' if self.gold_present else 'absent'}",
        ]
        for lab in sorted(self.gold_per_label):
            lines.append(f"gold[{lab}]: {self.gold_per_label[lab]}")
        lines.extend(f"problem: {p}" for p in self.problems)
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _parse_ranges(raw, lineno: int, what: str) -> list[tuple[int, int]]:
    out = []
    for item in raw:
        if len(item) < 2:
            raise CorpusFormatError(f"line {lineno}: malformed {what} range {item!r}")
        out.append((int(item[0]), int(item[1])))
    return out


def _parse_sentence(rec: dict, dim: int, lineno: int) -> Sentence:
    try:
        sid = str(rec["id"])
        raw_tokens = rec["tokens"]
    except (KeyError, TypeError) as exc:
        raise CorpusFormatError(f"line {lineno}: missing sentence field {exc}") from None
    tokens = []
    for i, t in enumerate(raw_tokens):
        try:
            emb = np.asarray(t["emb"], dtype=np.float64)
            tok = TokenRecord(
                text=str(t["text"]),
                lemma=str(t["lemma"]),
                pos=str(t["pos"]),
                head=int(t["head"]),
                deprel=str(t.get("deprel", "")),
                emb=emb,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusFormatError(f"line {lineno}: malformed token {i}: {exc}") from None
        if emb.ndim != 1 or emb.shape[0] != dim:
            raise CorpusFormatError(
                f"line {lineno}: token {i} embedding dimension {emb.shape} != {dim}"
            )
        if not tok.lemma:
            raise CorpusFormatError(f"line {lineno}: token {i} has empty lemma")
        tok.lemma = tok.lemma.lower()
        tokens.append(tok)
    n = len(tokens)
    for i, tok in enumerate(tokens):
        if tok.head == i or tok.head < -1 or tok.head >= n:
            raise CorpusFormatError(
                f"line {lineno}: invalid head index {tok.head} for token {i} "
                f"in {n}-token sentence"
            )
    chunks = _parse_ranges(rec.get("noun_chunks", []), lineno, "noun_chunk")
    for s, e in chunks:
        if not (0 <= s < e <= n):
            raise CorpusFormatError(f"line {lineno}: noun_chunk [{s},{e}) out of bounds")
    chunks.sort()
    for (s1, e1), (s2, e2) in zip(chunks, chunks[1:]):
        if s2 < e1:
            raise CorpusFormatError(
                f"line {lineno}: overlapping noun chunks [{s1},{e1}) and [{s2},{e2})"
            )
    gold = None
    if "entities" in rec:
        gold = []
        for item in rec["entities"]:
            s, e, lab = int(item[0]), int(item[1]), str(item[2])
            gold.append((s, e, lab))
    return Sentence(id=sid, tokens=tokens, noun_chunks=chunks, gold=gold)


def load_corpus(path) -> Corpus:
    """Load a corpus JSONL file, enforcing all structural invariants."""
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise CorpusFormatError("line 1: missing header record")
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"line 1: malformed header: {exc}") from None
        if header.get("format") != FORMAT_NAME:
            raise CorpusFormatError(f"line 1: unknown format {header.get('format')!r}")
        if header.get("version") != FORMAT_VERSION:
            raise CorpusFormatError(f"line 1: unsupported version {header.get('version')!r}")
        dim = int(header["dim"])
        if dim < 1:
            raise CorpusFormatError("line 1: embedding dimension must be >= 1")
        sentences = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: malformed record: {exc}") from None
            sentences.append(_parse_sentence(rec, dim, lineno))
    corpus = Corpus(dim=dim, sentences=sentences)
    log.info("loaded corpus: %d sentences, %d tokens, dim=%d",
             len(corpus), corpus.n_tokens, dim)
    return corpus


def save_corpus(corpus: Corpus, path) -> None:
    """Write a corpus back to the JSONL format (round-trip safe)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"format": FORMAT_NAME, "version": FORMAT_VERSION,
                             "dim": corpus.dim}) + "\n")
        for sent in corpus.sentences:
            fh.write(json.dumps(sent.to_json()) + "\n")


def load_phrase_lexicon(path) -> PhraseLexicon:
    """Load a phrase lexicon: UTF-8, one lowercase lemmatized phrase per line.

    Single-token lines are not valid phrases; they are skipped with a warning.
    """
    phrases = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            phrase = " ".join(line.lower().split())
            if not phrase:
                continue
            if " " not in phrase:
                log.warning("line %d: single-token phrase %r skipped", lineno, phrase)
                continue
            phrases.add(phrase)
    return PhraseLexicon(phrases=phrases)


def validate_corpus(corpus: Corpus) -> ValidationReport:
    """Diagnostic check of a loaded corpus; never raises."""
    problems = []
    gold_per_label: dict[str, int] = {}
    gold_present = False
    for sent in corpus.sentences:
        n = len(sent)
        for tok in sent.tokens:
            if tok.emb.shape[0] != corpus.dim:
                problems.append(f"{sent.id}: embedding dim {tok.emb.shape[0]} != {corpus.dim}")
        if sent.gold is not None:
            gold_present = True
            for s, e, lab in sent.gold:
                if not (0 <= s < e <= n):
                    problems.append(f"{sent.id}: gold range [{s},{e}) out of bounds")
                else:
                    gold_per_label[lab] = gold_per_label.get(lab, 0) + 1
    return ValidationReport(
        passed=not problems,
        n_sentences=len(corpus),
        n_tokens=corpus.n_tokens,
        gold_present=gold_present,
        gold_per_label=gold_per_label,
        problems=problems,
    )
