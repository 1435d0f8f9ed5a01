"""Logical rules: pattern extraction, candidate enumeration, matching, voting.

A simple rule is one (predicate, pattern) condition implying a label; a
compound rule conjoins two conditions.  Five predicates are supported:
TokenString, PreNgram, PostNgram, POSTag, DependencyRel.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

from .candidates import CandidateIndex, SpanCandidate, SpanKey
from .corpus import Corpus, CorpusFormatError, Sentence

TOKEN_STRING = "TokenString"
PRE_NGRAM = "PreNgram"
POST_NGRAM = "PostNgram"
POS_TAG = "POSTag"
DEPENDENCY_REL = "DependencyRel"

PREDICATE_TYPES = (TOKEN_STRING, PRE_NGRAM, POST_NGRAM, POS_TAG, DEPENDENCY_REL)

# Allowed conjunct pairs for compound rules, in canonical conjunct order.
ALLOWED_PAIRS = (
    (PRE_NGRAM, POST_NGRAM),
    (PRE_NGRAM, POS_TAG),
    (POS_TAG, POST_NGRAM),
    (DEPENDENCY_REL, POS_TAG),
)


class SimplePattern(NamedTuple):
    predicate: str
    pattern: str

    def render(self) -> str:
        return f"{self.predicate}={self.pattern}"


Skeleton = tuple[SimplePattern, ...]


@dataclass
class RuleStats:
    f: int
    n: int
    precision: float
    score: float


@dataclass
class Rule:
    conjuncts: Skeleton
    label: str
    provenance: str = "seed"  # "seed" or "learned"
    iteration: int = 0
    stats: RuleStats | None = None
    rule_id: int = -1

    @property
    def skeleton(self) -> Skeleton:
        return self.conjuncts

    @property
    def pair_type(self) -> tuple[str, ...]:
        return tuple(c.predicate for c in self.conjuncts)

    def render(self) -> str:
        body = " ∧ ".join(c.render() for c in self.conjuncts)
        suffix = " (seed)" if self.provenance == "seed" else ""
        return f"{body} → {self.label}{suffix}"

    def to_json(self) -> dict:
        rec = {
            "iteration": self.iteration,
            "label": self.label,
            "conjuncts": [{"type": c.predicate, "pattern": c.pattern} for c in self.conjuncts],
        }
        if self.stats is not None:
            rec["score"] = round(self.stats.score, 6)
            rec["precision"] = round(self.stats.precision, 6)
            rec["matches"] = self.stats.f
        return rec


@dataclass
class WeakLabel:
    key: SpanKey
    label: str
    rule_ids: list[int]
    tally: dict[str, int]


@dataclass
class RuleSet:
    rules: list[Rule] = field(default_factory=list)
    _keys: set[tuple[Skeleton, str]] = field(default_factory=set)

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def add(self, rule: Rule) -> bool:
        key = (rule.conjuncts, rule.label)
        if key in self._keys:
            return False
        rule.rule_id = len(self.rules)
        self.rules.append(rule)
        self._keys.add(key)
        return True

    def skeletons(self) -> set[Skeleton]:
        return {r.conjuncts for r in self.rules}

    @property
    def labels(self) -> list[str]:
        seen: list[str] = []
        for r in self.rules:
            if r.label not in seen:
                seen.append(r.label)
        return seen


def load_seed_rules(path) -> RuleSet:
    """Load seed rules from a JSON array of {"type","pattern","label"} records."""
    with open(path, encoding="utf-8") as fh:
        records = json.load(fh)
    ruleset = RuleSet()
    for i, rec in enumerate(records):
        ptype = rec.get("type")
        if ptype not in PREDICATE_TYPES:
            raise CorpusFormatError(f"seed {i}: unknown predicate type {ptype!r}")
        pattern = str(rec["pattern"]).strip()
        label = str(rec["label"]).strip()
        if not pattern or not label:
            raise CorpusFormatError(f"seed {i}: empty pattern or label")
        if ptype in (TOKEN_STRING, PRE_NGRAM, POST_NGRAM):
            pattern = pattern.lower()
        ruleset.add(Rule(conjuncts=(SimplePattern(ptype, pattern),), label=label,
                         provenance="seed", iteration=0))
    return ruleset


@dataclass
class PatternConfig:
    ngram_max: int = 3


def extract_simple_patterns(
    candidate: SpanCandidate, sentence: Sentence, config: PatternConfig | None = None
) -> list[SimplePattern]:
    """All simple patterns of a candidate's canonical unit.

    Lexical patterns (TokenString, Pre/PostNgram) are lowercase lemmas;
    POSTag is the span's tag sequence; DependencyRel is the governor lemma
    of the span head word (last token), with a depth-2 variant
    "governorOfGovernor||governor".
    """
    config = config or PatternConfig()
    start, end = candidate.canonical_start, candidate.canonical_end
    lemmas = sentence.lemmas
    n = len(sentence)
    out = [SimplePattern(TOKEN_STRING, " ".join(lemmas[start:end]))]
    for k in range(1, config.ngram_max + 1):
        if start - k >= 0:
            out.append(SimplePattern(PRE_NGRAM, " ".join(lemmas[start - k:start])))
    for k in range(1, config.ngram_max + 1):
        if end + k <= n:
            out.append(SimplePattern(POST_NGRAM, " ".join(lemmas[end:end + k])))
    out.append(SimplePattern(POS_TAG, " ".join(t.pos for t in sentence.tokens[start:end])))
    head = end - 1  # span head word: last token
    gov = sentence.tokens[head].head
    if gov != -1:
        out.append(SimplePattern(DEPENDENCY_REL, lemmas[gov]))
        gov2 = sentence.tokens[gov].head
        if gov2 != -1:
            out.append(SimplePattern(DEPENDENCY_REL, f"{lemmas[gov2]}||{lemmas[gov]}"))
    return out


def candidate_pattern_sets(
    index: CandidateIndex, corpus: Corpus, config: PatternConfig | None = None
) -> dict[SpanKey, frozenset[SimplePattern]]:
    """Pattern set of every canonical candidate, keyed by canonical span key."""
    config = config or PatternConfig()
    out = {}
    for key, cand in index.canonical.items():
        sent = corpus.by_id(cand.sentence_id)
        out[key] = frozenset(extract_simple_patterns(cand, sent, config))
    return out


def rule_matches(
    rule: Rule, candidate: SpanCandidate, sentence: Sentence,
    config: PatternConfig | None = None,
) -> bool:
    """True iff every conjunct equals one of the candidate's extracted patterns."""
    patterns = set(extract_simple_patterns(candidate, sentence, config))
    return all(c in patterns for c in rule.conjuncts)


def enumerate_rule_candidates(
    corpus: Corpus, index: CandidateIndex, config: PatternConfig | None = None,
    pattern_sets: dict[SpanKey, frozenset[SimplePattern]] | None = None,
) -> dict[Skeleton, set[SpanKey]]:
    """Deduplicated rule skeletons with an inverted index of matched candidates.

    Skeletons are all TokenString singletons plus, per candidate, the
    cross-products of the four allowed conjunct pair types.
    """
    config = config or PatternConfig()
    if pattern_sets is None:
        pattern_sets = candidate_pattern_sets(index, corpus, config)
    skeletons: dict[Skeleton, set[SpanKey]] = defaultdict(set)
    for key, patterns in pattern_sets.items():
        by_type: dict[str, list[SimplePattern]] = defaultdict(list)
        for p in patterns:
            by_type[p.predicate].append(p)
        for p in by_type[TOKEN_STRING]:
            skeletons[(p,)].add(key)
        for t1, t2 in ALLOWED_PAIRS:
            for p1 in by_type.get(t1, ()):
                for p2 in by_type.get(t2, ()):
                    skeletons[(p1, p2)].add(key)
    return dict(skeletons)


def apply_rules(
    ruleset: RuleSet, index: CandidateIndex, corpus: Corpus,
    tie_policy: str = "abstain", config: PatternConfig | None = None,
    pattern_sets: dict[SpanKey, frozenset[SimplePattern]] | None = None,
) -> list[WeakLabel]:
    """Match every rule against every canonical candidate and majority-vote.

    One vote per matching rule; the strict-majority label wins.  Ties either
    abstain (default) or go to the label of the lowest matching rule id.
    """
    if tie_policy not in ("abstain", "first-by-rule-id"):
        raise ValueError(f"unknown tie policy {tie_policy!r}")
    config = config or PatternConfig()
    if pattern_sets is None:
        pattern_sets = candidate_pattern_sets(index, corpus, config)
    postings: dict[SimplePattern, set[SpanKey]] = defaultdict(set)
    for key, patterns in pattern_sets.items():
        for p in patterns:
            postings[p].add(key)
    votes: dict[SpanKey, list[Rule]] = defaultdict(list)
    for rule in ruleset:
        matched = postings.get(rule.conjuncts[0], set())
        for conjunct in rule.conjuncts[1:]:
            matched = matched & postings.get(conjunct, set())
        for key in matched:
            votes[key].append(rule)
    out = []
    for key in sorted(votes):
        matched_rules = votes[key]
        tally: dict[str, int] = defaultdict(int)
        for r in matched_rules:
            tally[r.label] += 1
        best = max(tally.values())
        winners = [lab for lab, c in tally.items() if c == best]
        if len(winners) == 1:
            label = winners[0]
        elif tie_policy == "abstain":
            continue
        else:
            label = min(
                (r.rule_id, r.label) for r in matched_rules if r.label in winners
            )[1]
        out.append(WeakLabel(key=key, label=label,
                             rule_ids=sorted(r.rule_id for r in matched_rules),
                             tally=dict(tally)))
    return out


def write_rules_jsonl(ruleset: RuleSet, path, learned_only: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rule in ruleset:
            if learned_only and rule.provenance == "seed":
                continue
            fh.write(json.dumps(rule.to_json(), sort_keys=True) + "\n")


def load_rules_jsonl(path, seeds: RuleSet | None = None) -> RuleSet:
    """Rebuild a RuleSet from a learned-rules JSONL file (seeds prepended)."""
    ruleset = RuleSet()
    if seeds is not None:
        for rule in seeds:
            ruleset.add(Rule(rule.conjuncts, rule.label, "seed", 0))
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            conjuncts = tuple(
                SimplePattern(c["type"], c["pattern"]) for c in rec["conjuncts"]
            )
            stats = None
            if "score" in rec:
                f, score, prec = rec["matches"], rec["score"], rec["precision"]
                n = round(f / prec) if prec else 0
                stats = RuleStats(f=f, n=n, precision=prec, score=score)
            ruleset.add(Rule(conjuncts, rec["label"], "learned",
                             rec.get("iteration", 0), stats))
    return ruleset
