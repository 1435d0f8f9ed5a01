"""Corpus preprocessor: raw text / CoNLL in, tagger-ready corpus JSONL out."""

from .pipeline import parse_sentence, split_sentences, tokenize
from .embeddings import HashEmbedder
from .phrases import mine_phrases
from .roundtrip import check_roundtrip

__all__ = [
    "parse_sentence",
    "split_sentences",
    "tokenize",
    "HashEmbedder",
    "mine_phrases",
    "check_roundtrip",
]
