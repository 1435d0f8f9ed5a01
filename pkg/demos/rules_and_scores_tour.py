"""Guided tour of the building blocks on a single parsed sentence.

Walks through candidate enumeration, pattern extraction, compound rule
matching, RlogF scoring, and the dynamic selection threshold -- each with
printed intermediate values, no training involved.

Run:  python demos/rules_and_scores_tour.py
"""

import numpy as np

from ruletagger.candidates import SpanCandidate, build_candidate_index
from ruletagger.corpus import Corpus, PhraseLexicon, Sentence, TokenRecord
from ruletagger.learner import k_schedule, rlogf_score
from ruletagger.rules import (POS_TAG, PRE_NGRAM, Rule, RuleSet,
                              SimplePattern, apply_rules,
                              extract_simple_patterns)
from ruletagger.selection import SelectionParams, dynamic_threshold


def build_sentence():
    words = ["Einstein", "moved", "to", "the", "United", "States", "in",
             "1916", "."]
    lemmas = ["einstein", "move", "to", "the", "united", "state", "in",
              "1916", "."]
    pos = ["PROPN", "VERB", "ADP", "DET", "PROPN", "PROPN", "ADP", "NUM",
           "PUNCT"]
    heads = [1, -1, 1, 5, 5, 2, 1, 6, 1]
    rng = np.random.default_rng(0)
    tokens = [TokenRecord(w, l, p, h, "dep", rng.normal(size=8))
              for w, l, p, h in zip(words, lemmas, pos, heads)]
    return Sentence(id="s1", tokens=tokens, noun_chunks=[(0, 1), (3, 6)])


def main():
    sent = build_sentence()
    corpus = Corpus(dim=8, sentences=[sent])
    print(f"sentence: {sent.text}\n")

    # Every span of length <= 5 is a candidate; the phrase lexicon merges
    # sub-spans of "united state" into one canonical unit.
    lexicon = PhraseLexicon({"united state"})
    index = build_candidate_index(corpus, lexicon, 5)
    print(f"candidate spans: {len(index.canonical)} canonical units")
    print(f"initial negatives (no noun-chunk overlap): "
          f"{len(index.initial_negatives)}\n")

    cand = SpanCandidate("s1", 4, 6, 4, 6)
    print('patterns of span "United States":')
    for p in sorted(extract_simple_patterns(cand, sent)):
        print(f"  {p.render()}")

    # A compound rule needs both conjuncts to hold on the same span.
    rule = Rule((SimplePattern(PRE_NGRAM, "to the"),
                 SimplePattern(POS_TAG, "PROPN PROPN")), "Location",
                provenance="learned")
    ruleset = RuleSet()
    ruleset.add(rule)
    weak = apply_rules(ruleset, index, corpus)
    print(f"\nrule {rule.render()!r} labels: "
          f"{[(w.key, w.label) for w in weak]}")

    # RlogF balances precision (F/N) against evidence volume (log2 F).
    print("\nRlogF scores (F matches in-category out of N matches):")
    for f, n in [(1, 1), (8, 8), (8, 10), (80, 100)]:
        print(f"  F={f:<3} N={n:<3} -> {rlogf_score(f, n):.4f}")
    print("per-group budget over iterations:",
          [k_schedule(20, 1, t) for t in (1, 2, 5, 10)])

    # The acceptance threshold adapts to how tight each category's
    # high-precision set is: a tight set demands high confidence.
    rng = np.random.default_rng(1)
    tight = rng.normal(scale=0.05, size=(20, 8)) + np.eye(8)[0] * 3
    loose = rng.normal(scale=1.0, size=(20, 8)) + np.eye(8)[0] * 3
    params = SelectionParams(tau=0.8)
    print(f"\ndynamic threshold, tight cluster: "
          f"{dynamic_threshold(tight, params, rng):.4f}")
    print(f"dynamic threshold, loose cluster: "
          f"{dynamic_threshold(loose, params, rng):.4f}")


if __name__ == "__main__":
    main()
