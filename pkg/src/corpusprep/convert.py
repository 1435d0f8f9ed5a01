"""Plain-text / CoNLL readers and corpus JSONL writing."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .embeddings import make_embedder
from .pipeline import parse_sentence, split_sentences, tokenize

FORMAT_NAME = "tallor-corpus"
FORMAT_VERSION = 1


@dataclass
class PreprocessJob:
    input_path: str
    fmt: str = "plain"          # "plain" | "conll"
    lm: str = "hash"            # "hash" or a local transformers model id
    out_path: str = "corpus.jsonl"
    dim: int = 64               # embedding width for the hash encoder
    id_prefix: str = "d"


def read_plain(path) -> list[tuple[list[str], None]]:
    text = Path(path).read_text(encoding="utf-8")
    out = []
    for block in text.splitlines():
        for sent in split_sentences(block):
            words = tokenize(sent)
            if words:
                out.append((words, None))
    return out


def read_conll(path) -> list[tuple[list[str], list[tuple[int, int, str]]]]:
    """Two-column CoNLL: token TAB BIO-label, blank line between sentences."""
    sentences = []
    words: list[str] = []
    tags: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines() + [""]:
        line = line.strip()
        if not line:
            if words:
                sentences.append((words, _bio_to_spans(tags)))
            words, tags = [], []
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        words.append(parts[0])
        tags.append(parts[1] if len(parts) > 1 else "O")
    return sentences


def _bio_to_spans(tags: list[str]) -> list[tuple[int, int, str]]:
    spans = []
    start, label = None, None
    for i, tag in enumerate(tags + ["O"]):
        if tag.startswith("B-") or tag == "O" or (
                tag.startswith("I-") and label != tag[2:]):
            if start is not None:
                spans.append((start, i, label))
                start, label = None, None
        if tag.startswith("B-") or (tag.startswith("I-") and start is None):
            start, label = i, tag[2:]
    return spans


def preprocess_corpus(job: PreprocessJob) -> dict:
    """Run the pipeline over the input file and write corpus JSONL."""
    if job.fmt == "plain":
        raw = read_plain(job.input_path)
    elif job.fmt == "conll":
        raw = read_conll(job.input_path)
    else:
        raise ValueError(f"unknown input format {job.fmt!r}")
    embedder = make_embedder(job.lm, dim=job.dim)
    n_entities = 0
    with open(job.out_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"format": FORMAT_NAME, "version": FORMAT_VERSION,
                             "dim": embedder.dim}) + "\n")
        for i, (words, gold) in enumerate(raw):
            parsed = parse_sentence(words)
            lemmas = [t.lemma for t in parsed.tokens]
            embs = embedder.encode(words, lemmas)
            rec = {
                "id": f"{job.id_prefix}{i:04d}",
                "tokens": [
                    {"text": t.text, "lemma": t.lemma, "pos": t.pos,
                     "head": t.head, "deprel": t.deprel,
                     "emb": [round(float(x), 6) for x in embs[j]]}
                    for j, t in enumerate(parsed.tokens)
                ],
                "noun_chunks": [list(c) for c in parsed.noun_chunks],
            }
            if gold is not None:
                rec["entities"] = [[s, e, lab] for s, e, lab in gold]
                n_entities += len(gold)
            fh.write(json.dumps(rec) + "\n")
    return {"sentences": len(raw), "entities": n_entities,
            "dim": embedder.dim, "out": str(job.out_path)}
