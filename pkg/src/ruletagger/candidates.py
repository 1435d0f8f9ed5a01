"""Entity candidate enumeration, phrase merging, and initial negatives."""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import Corpus, PhraseLexicon, Sentence

SpanKey = tuple[str, int, int]


@dataclass(frozen=True)
class SpanCandidate:
    sentence_id: str
    start: int
    end: int
    canonical_start: int
    canonical_end: int

    @property
    def key(self) -> SpanKey:
        """Key of the canonical (phrase-merged) unit this span belongs to."""
        return (self.sentence_id, self.canonical_start, self.canonical_end)

    @property
    def raw_key(self) -> SpanKey:
        return (self.sentence_id, self.start, self.end)


def span_key_str(key: SpanKey) -> str:
    return f"{key[0]}:{key[1]}:{key[2]}"


def enumerate_spans(sentence: Sentence, max_span_len: int) -> list[SpanCandidate]:
    """All contiguous token spans of length 1..max_span_len, sorted by (start, end)."""
    if max_span_len < 1:
        raise ValueError("max_span_len must be >= 1")
    n = len(sentence)
    out = []
    for start in range(n):
        for end in range(start + 1, min(start + max_span_len, n) + 1):
            out.append(SpanCandidate(sentence.id, start, end, start, end))
    return out


def find_phrase_ranges(sentence: Sentence, lexicon: PhraseLexicon) -> list[tuple[int, int]]:
    """Leftmost-longest, non-overlapping lexicon matches over the sentence lemmas."""
    if not lexicon.phrases:
        return []
    lemmas = sentence.lemmas
    n = len(lemmas)
    max_len = lexicon.max_len
    ranges = []
    i = 0
    while i < n:
        matched = None
        for length in range(min(max_len, n - i), 1, -1):
            if " ".join(lemmas[i:i + length]) in lexicon:
                matched = (i, i + length)
                break
        if matched:
            ranges.append(matched)
            i = matched[1]
        else:
            i += 1
    return ranges


def merge_phrase_spans(
    spans: list[SpanCandidate], lexicon: PhraseLexicon, sentence: Sentence
) -> list[SpanCandidate]:
    """Canonicalize every span contained in a matched phrase to the phrase range."""
    ranges = find_phrase_ranges(sentence, lexicon)
    if not ranges:
        return list(spans)
    out = []
    for sp in spans:
        canon = (sp.start, sp.end)
        for ps, pe in ranges:
            if ps <= sp.start and sp.end <= pe:
                canon = (ps, pe)
                break
        out.append(SpanCandidate(sp.sentence_id, sp.start, sp.end, canon[0], canon[1]))
    return out


def initial_negative_spans(sentence: Sentence, max_span_len: int) -> list[SpanCandidate]:
    """Spans sharing no token with any noun chunk; initial NEG supervision."""
    out = []
    for sp in enumerate_spans(sentence, max_span_len):
        if not any(sp.start < ce and cs < sp.end for cs, ce in sentence.noun_chunks):
            out.append(sp)
    return out


@dataclass
class CandidateIndex:
    """Per-corpus candidate bookkeeping.

    ``canonical`` holds one representative SpanCandidate per canonical unit;
    ``canonical_map`` maps every enumerated raw span to its canonical key.
    """

    spans: dict[str, list[SpanCandidate]] = field(default_factory=dict)
    canonical: dict[SpanKey, SpanCandidate] = field(default_factory=dict)
    canonical_map: dict[SpanKey, SpanKey] = field(default_factory=dict)
    initial_negatives: set[SpanKey] = field(default_factory=set)

    def canonical_candidates(self) -> list[SpanCandidate]:
        return [self.canonical[k] for k in sorted(self.canonical)]


def build_candidate_index(
    corpus: Corpus, lexicon: PhraseLexicon | None, max_span_len: int
) -> CandidateIndex:
    lexicon = lexicon or PhraseLexicon(set())
    index = CandidateIndex()
    for sent in corpus:
        spans = merge_phrase_spans(enumerate_spans(sent, max_span_len), lexicon, sent)
        index.spans[sent.id] = spans
        for sp in spans:
            index.canonical_map[sp.raw_key] = sp.key
            if sp.key not in index.canonical:
                index.canonical[sp.key] = SpanCandidate(
                    sp.sentence_id, sp.canonical_start, sp.canonical_end,
                    sp.canonical_start, sp.canonical_end,
                )
        for sp in initial_negative_spans(sent, max_span_len):
            canon = index.canonical_map.get(sp.raw_key, sp.raw_key)
            cs, ce = canon[1], canon[2]
            # The canonical unit must also stay clear of every noun chunk,
            # otherwise a merged phrase could leak entity tokens into NEG.
            if not any(cs < che and chs < ce for chs, che in sent.noun_chunks):
                index.initial_negatives.add(canon)
    return index
