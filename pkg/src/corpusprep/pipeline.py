"""Self-contained English analysis pipeline.

Everything here is deterministic and dependency-free: a regex tokenizer,
a suffix lemmatizer, a lexicon + shape POS tagger, heuristic dependency
heads, and chunker-style noun phrase detection.  The goal is not parser
accuracy -- it is a stable, reproducible front end that produces
structurally valid corpus records (heads in range, chunks non-overlapping)
for the rule-learning engine downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_TOKEN_RE = re.compile(r"\w+(?:[-']\w+)*|[^\w\s]")
_SENT_RE = re.compile(r"(?<=[.!?])\s+(?=[A-Z\"'(])")

# Closed-class word lists; everything else is tagged by shape and suffix.
_DETERMINERS = {"a", "an", "the", "this", "that", "these", "those", "his",
                "her", "its", "their", "our", "my", "your", "some", "any",
                "no", "each", "every"}
_PREPOSITIONS = {"in", "on", "at", "to", "of", "with", "from", "by", "for",
                 "into", "over", "under", "after", "before", "during",
                 "between", "through", "about", "against", "without"}
_PRONOUNS = {"i", "you", "he", "she", "it", "we", "they", "him", "them",
             "me", "us", "who", "whom"}
_CONJUNCTIONS = {"and", "or", "but", "nor", "so", "yet"}
_AUXILIARIES = {"is", "am", "are", "was", "were", "be", "been", "being",
                "has", "have", "had", "do", "does", "did", "will", "would",
                "can", "could", "may", "might", "shall", "should", "must"}
_COMMON_VERBS = {"said", "made", "found", "showed", "took", "gave", "went",
                 "got", "saw", "knew", "caused", "led", "held", "met",
                 "became", "began", "left", "felt", "kept", "ran", "moved",
                 "developed", "received", "reported", "treated", "improved",
                 "remained", "suffered", "confirmed", "administered"}
_ADVERBS = {"very", "also", "not", "never", "always", "often", "still",
            "already", "again", "here", "there", "now", "then", "too"}

_IRREGULAR_LEMMAS = {
    "was": "be", "were": "be", "is": "be", "are": "be", "am": "be",
    "been": "be", "being": "be", "has": "have", "had": "have",
    "does": "do", "did": "do", "went": "go", "said": "say", "made": "make",
    "found": "find", "showed": "show", "took": "take", "gave": "give",
    "got": "get", "saw": "see", "knew": "know", "led": "lead",
    "held": "hold", "met": "meet", "became": "become", "began": "begin",
    "left": "leave", "felt": "feel", "kept": "keep", "ran": "run",
    "men": "man", "women": "woman", "children": "child", "people": "person",
    "mice": "mouse", "feet": "foot", "teeth": "tooth",
}


@dataclass
class Token:
    text: str
    lemma: str = ""
    pos: str = ""
    head: int = -1
    deprel: str = ""


@dataclass
class ParsedSentence:
    tokens: list[Token]
    noun_chunks: list[tuple[int, int]] = field(default_factory=list)


def split_sentences(text: str) -> list[str]:
    parts = [p.strip() for p in _SENT_RE.split(text.strip())]
    return [p for p in parts if p]


def tokenize(sentence: str) -> list[str]:
    return _TOKEN_RE.findall(sentence)


def _tag(word: str, prev_pos: str, is_first: bool) -> str:
    low = word.lower()
    if re.fullmatch(r"\d+(?:[.,]\d+)*", word):
        return "NUM"
    if not any(ch.isalnum() for ch in word):
        return "PUNCT"
    if low in _DETERMINERS:
        return "DET"
    if low in _PREPOSITIONS:
        return "ADP"
    if low in _PRONOUNS:
        return "PRON"
    if low in _CONJUNCTIONS:
        return "CCONJ"
    if low in _AUXILIARIES:
        return "AUX"
    if low in _ADVERBS or low.endswith("ly"):
        return "ADV"
    if low in _COMMON_VERBS:
        return "VERB"
    if word[0].isupper() and not is_first:
        return "PROPN"
    if low.endswith(("ous", "ive", "ful", "less", "able", "ible", "al",
                     "ic", "ish")):
        return "ADJ"
    if low.endswith("ing") and prev_pos in ("AUX", "VERB", "PRON", "ADV"):
        return "VERB"
    if low.endswith("ed") and prev_pos in ("PRON", "PROPN", "NOUN", "AUX",
                                           "ADV", "NUM"):
        return "VERB"
    if is_first and word[0].isupper() and low.endswith(("s", "e", "n", "y",
                                                        "r", "l", "a", "o")):
        # Sentence-initial capitalized token: usually the subject.
        return "PROPN" if low not in _IRREGULAR_LEMMAS else "NOUN"
    return "NOUN"


def _lemma(word: str, pos: str) -> str:
    low = word.lower()
    if low in _IRREGULAR_LEMMAS:
        return _IRREGULAR_LEMMAS[low]
    if pos in ("VERB", "AUX"):
        if low.endswith("ied") and len(low) > 4:
            return low[:-3] + "y"
        if low.endswith("ed") and len(low) > 3:
            stem = low[:-2]
            if stem.endswith(("at", "iz", "is", "us", "in", "ur", "ov",
                              "eiv", "eat", "creas")):
                return stem + "e"
            if len(stem) > 2 and stem[-1] == stem[-2]:
                return stem[:-1]
            return stem
        if low.endswith("ing") and len(low) > 4:
            stem = low[:-3]
            if len(stem) > 2 and stem[-1] == stem[-2]:
                return stem[:-1]
            return stem
        if low.endswith("ies") and len(low) > 4:
            return low[:-3] + "y"
        if low.endswith("s") and not low.endswith("ss"):
            return low[:-1]
        return low
    if pos in ("NOUN", "PROPN"):
        if low.endswith("ies") and len(low) > 4:
            return low[:-3] + "y"
        if low.endswith(("ses", "xes", "zes", "ches", "shes")):
            return low[:-2]
        if low.endswith("s") and not low.endswith(("ss", "us", "is")):
            return low[:-1]
    return low


def _noun_chunks(tokens: list[Token]) -> list[tuple[int, int]]:
    chunks = []
    i = 0
    n = len(tokens)
    while i < n:
        if tokens[i].pos in ("DET", "ADJ") or tokens[i].pos in ("NOUN", "PROPN"):
            start = i
            while i < n and tokens[i].pos in ("DET", "ADJ"):
                i += 1
            head_start = i
            while i < n and tokens[i].pos in ("NOUN", "PROPN"):
                i += 1
            if i > head_start:          # at least one nominal token
                chunks.append((start, i))
            else:
                i = start + 1
        else:
            i += 1
    return chunks


def _heads(tokens: list[Token], chunks: list[tuple[int, int]]) -> None:
    """Heuristic dependency heads: flat but always a valid tree.

    The first main verb (else first AUX, else the first token) is the root.
    Inside a noun chunk everything attaches to the chunk-final nominal; a
    chunk whose immediate left neighbor is a preposition attaches to that
    preposition (so "the United States" hangs off "to"); prepositions and
    stray tokens attach to the root.
    """
    n = len(tokens)
    root = next((i for i, t in enumerate(tokens) if t.pos == "VERB"),
                next((i for i, t in enumerate(tokens) if t.pos == "AUX"), 0))
    tokens[root].head = -1
    tokens[root].deprel = "root"
    chunk_of = {}
    for cs, ce in chunks:
        for j in range(cs, ce):
            chunk_of[j] = (cs, ce)
    for i, tok in enumerate(tokens):
        if i == root:
            continue
        if i in chunk_of:
            cs, ce = chunk_of[i]
            last = ce - 1
            if i != last:
                tok.head, tok.deprel = last, "nmod"
                continue
            if cs > 0 and tokens[cs - 1].pos == "ADP" and cs - 1 != root:
                tok.head, tok.deprel = cs - 1, "pobj"
            else:
                tok.head, tok.deprel = root, "nsubj" if i < root else "obj"
            continue
        if tok.pos == "ADP":
            tok.head, tok.deprel = root, "prep"
        elif tok.pos == "NUM" and i > 0 and tokens[i - 1].pos == "ADP":
            tok.head, tok.deprel = i - 1, "pobj"
        elif tok.pos == "PUNCT":
            tok.head, tok.deprel = root, "punct"
        else:
            tok.head, tok.deprel = root, "dep"
    # A malformed pattern (e.g. head pointing at itself) can only arise from
    # a bug above; normalize defensively so output always validates.
    for i, tok in enumerate(tokens):
        if tok.head == i or not (-1 <= tok.head < n):
            tok.head, tok.deprel = (-1, "root") if i == root else (root, "dep")


def parse_sentence(words: list[str]) -> ParsedSentence:
    tokens = [Token(text=w) for w in words]
    prev_pos = ""
    for i, tok in enumerate(tokens):
        tok.pos = _tag(tok.text, prev_pos, is_first=(i == 0))
        prev_pos = tok.pos
    for tok in tokens:
        tok.lemma = _lemma(tok.text, tok.pos)
    chunks = _noun_chunks(tokens)
    _heads(tokens, chunks)
    return ParsedSentence(tokens=tokens, noun_chunks=chunks)
