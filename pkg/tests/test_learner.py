"""Rule scoring and per-iteration rule selection tests."""

import math

import pytest

from ruletagger.learner import (STRATEGIES, k_schedule, rlogf_score,
                                rule_stats, select_new_rules)
from ruletagger.rules import (POS_TAG, PRE_NGRAM, RuleStats, SimplePattern)

SP = SimplePattern


def _skel(tag):
    return (SP(PRE_NGRAM, tag), SP(POS_TAG, "NOUN"))


def test_rlogf_values():
    assert rlogf_score(80, 100) == pytest.approx(5.0575, abs=1e-3)
    assert rlogf_score(1, 1) == 0.0
    assert rlogf_score(4, 4) == pytest.approx(2.0)
    assert rlogf_score(0, 10) == -math.inf
    with pytest.raises(ValueError):
        rlogf_score(0, 0)


def test_rlogf_scale_property():
    for f, n in [(2, 3), (5, 8), (10, 10)]:
        small = rlogf_score(f, n)
        big = rlogf_score(4 * f, 4 * n)
        assert big > small  # same precision, more evidence scores higher


def test_k_schedule():
    for t in range(1, 33):
        assert k_schedule(20, 1, t) == 19 + t
    assert k_schedule(20, 0, 30) == 20
    assert k_schedule(5, 3, 4) == 14
    for bad in [(0, 1, 1), (5, -1, 1), (5, 1, 0)]:
        with pytest.raises(ValueError):
            k_schedule(*bad)


def test_rule_stats_counts_inside_universe():
    matched = {("s", 0, 1), ("s", 1, 2), ("s", 2, 3), ("t", 0, 1)}
    members = {"X": {("s", 0, 1), ("s", 1, 2)}, "Y": {("s", 2, 3)}}
    universe = {("s", 0, 1), ("s", 1, 2), ("s", 2, 3)}  # ("t",0,1) outside
    stats = rule_stats(matched, members, universe)
    assert stats["X"].f == 2 and stats["X"].n == 3
    assert stats["X"].precision == pytest.approx(2 / 3)
    assert stats["X"].score == pytest.approx((2 / 3) * math.log2(2))
    assert stats["Y"].f == 1 and stats["Y"].precision == pytest.approx(1 / 3)


def test_rule_stats_empty_universe():
    stats = rule_stats({("s", 0, 1)}, {"X": set()}, set())
    assert stats["X"].n == 0 and stats["X"].score == -math.inf


def _scored(*items):
    out = []
    for tag, label, f, n in items:
        stats = {label: RuleStats(f=f, n=n, precision=f / n,
                                  score=rlogf_score(f, n))}
        out.append((_skel(tag), stats))
    return out


def test_select_top_k_by_score():
    scored = _scored(("a", "X", 8, 8), ("b", "X", 4, 4), ("c", "X", 2, 2))
    got = select_new_rules(scored, "entity_type", 2, 0.9, set(), ["X"], 1)
    assert [r.conjuncts[0].pattern for r in got] == ["a", "b"]
    assert all(r.provenance == "learned" and r.iteration == 1 for r in got)


def test_precision_floor_excludes_imprecise_rules():
    scored = _scored(("a", "X", 80, 100), ("b", "X", 3, 3))
    got = select_new_rules(scored, "entity_type", 5, 0.9, set(), ["X"], 1)
    assert [r.conjuncts[0].pattern for r in got] == ["b"]


def test_previously_selected_rules_stay_excluded():
    scored = _scored(("a", "X", 8, 8), ("b", "X", 4, 4))
    got = select_new_rules(scored, "entity_type", 5, 0.9, {_skel("a")},
                           ["X"], 2)
    assert [r.conjuncts[0].pattern for r in got] == ["b"]


def test_best_label_tie_breaks_by_label_order():
    stats = {"Y": RuleStats(2, 2, 1.0, 1.0), "X": RuleStats(2, 2, 1.0, 1.0)}
    got = select_new_rules([(_skel("a"), stats)], "entity_type", 1, 0.9,
                           set(), ["X", "Y"], 1)
    assert got[0].label == "X"


def test_budget_applies_per_group():
    scored = _scored(("a", "X", 8, 8), ("b", "X", 4, 4),
                     ("c", "Y", 8, 8), ("d", "Y", 4, 4))
    per_label = select_new_rules(scored, "entity_type", 1, 0.9, set(),
                                 ["X", "Y"], 1)
    assert sorted(r.conjuncts[0].pattern for r in per_label) == ["a", "c"]
    # All four candidates share one pair type: rule_type has a single group.
    per_type = select_new_rules(scored, "rule_type", 1, 0.9, set(),
                                ["X", "Y"], 1)
    assert [r.conjuncts[0].pattern for r in per_type] == ["a"]
    both = select_new_rules(scored, "entity_and_rule_type", 1, 0.9, set(),
                            ["X", "Y"], 1)
    assert sorted(r.conjuncts[0].pattern for r in both) == ["a", "c"]


def test_strategies_coincide_for_single_label_and_pair_type():
    scored = _scored(("a", "X", 8, 8), ("b", "X", 4, 4), ("c", "X", 2, 2))
    outputs = [
        [(r.conjuncts, r.label) for r in
         select_new_rules(scored, strategy, 2, 0.9, set(), ["X"], 1)]
        for strategy in STRATEGIES
    ]
    assert outputs[0] == outputs[1] == outputs[2]


def test_score_tie_breaks_by_match_count_then_pattern():
    stats_hi_f = {"X": RuleStats(4, 4, 1.0, 2.0)}
    stats_lo_f = {"X": RuleStats(2, 2, 1.0, 2.0)}  # same score, fewer matches
    got = select_new_rules([(_skel("b"), stats_lo_f), (_skel("a"), stats_hi_f)],
                           "entity_type", 1, 0.9, set(), ["X"], 1)
    assert got[0].conjuncts[0].pattern == "a"


def test_validation_errors():
    with pytest.raises(ValueError, match="strategy"):
        select_new_rules([], "alphabetical", 1, 0.9, set(), [], 1)
    with pytest.raises(ValueError, match="theta"):
        select_new_rules([], "entity_type", 1, 1.2, set(), [], 1)


def test_selection_is_deterministic():
    scored = _scored(("a", "X", 8, 8), ("b", "Y", 6, 6), ("c", "X", 2, 2))
    runs = [select_new_rules(scored, "entity_type", 2, 0.9, set(),
                             ["X", "Y"], 3) for _ in range(2)]
    assert [(r.conjuncts, r.label) for r in runs[0]] == \
           [(r.conjuncts, r.label) for r in runs[1]]
