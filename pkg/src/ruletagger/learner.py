"""RlogF rule scoring and per-iteration rule selection."""

from __future__ import annotations

import math

from .candidates import SpanKey
from .rules import Rule, RuleStats, Skeleton

STRATEGIES = ("entity_type", "rule_type", "entity_and_rule_type")


def rlogf_score(f: int, n: int) -> float:
    """(F/N) * log2(F); -inf when the rule matches no category members."""
    if n < 1:
        raise ValueError("rule matches no spans (N = 0)")
    if f == 0:
        return -math.inf
    return (f / n) * math.log2(f)


def rule_stats(
    matched: set[SpanKey],
    members: dict[str, set[SpanKey]],
    universe: set[SpanKey],
) -> dict[str, RuleStats]:
    """Per-category (F, N, precision, score) of one rule skeleton.

    N counts matched spans inside the scoring universe; F counts those that
    are members of the category.
    """
    scored = matched & universe
    n = len(scored)
    out = {}
    for label, member_keys in members.items():
        f = len(scored & member_keys)
        if n == 0:
            out[label] = RuleStats(f=0, n=0, precision=0.0, score=-math.inf)
        else:
            out[label] = RuleStats(f=f, n=n, precision=f / n, score=rlogf_score(f, n))
    return out


def k_schedule(k0: int, eta: int, iteration: int) -> int:
    """Top-K budget at iteration t >= 1: K0 + eta * (t - 1)."""
    if k0 < 1 or eta < 0 or iteration < 1:
        raise ValueError("require k0 >= 1, eta >= 0, iteration >= 1")
    return k0 + eta * (iteration - 1)


def skeleton_sort_key(skeleton: Skeleton) -> tuple:
    return tuple((c.predicate, c.pattern) for c in skeleton)


def select_new_rules(
    scored: list[tuple[Skeleton, dict[str, RuleStats]]],
    strategy: str,
    k: int,
    theta: float,
    existing: set[Skeleton],
    label_order: list[str],
    iteration: int,
) -> list[Rule]:
    """Pick the top-K rules per strategy group above the precision floor.

    A candidate's category is its best-scoring one (ties: earliest label in
    ``label_order``).  Groups are categories, conjunct pair types, or both.
    Rules previously selected in any iteration are never re-selected.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if not (0.0 <= theta <= 1.0):
        raise ValueError("theta must be in [0, 1]")
    label_rank = {lab: i for i, lab in enumerate(label_order)}
    candidates = []
    for skeleton, stats in scored:
        if skeleton in existing or not stats:
            continue
        best_label = min(
            stats,
            key=lambda lab: (-stats[lab].score,
                             label_rank.get(lab, len(label_rank))),
        )
        best = stats[best_label]
        if best.score == -math.inf or best.precision < theta:
            continue
        candidates.append((skeleton, best_label, best))
    grouped: dict[tuple, list] = {}
    for skeleton, label, stats in candidates:
        pair_type = tuple(c.predicate for c in skeleton)
        if strategy == "entity_type":
            group = (label,)
        elif strategy == "rule_type":
            group = (pair_type,)
        else:
            group = (label, pair_type)
        grouped.setdefault(group, []).append((skeleton, label, stats))
    selected = []
    for group in sorted(grouped):
        ranked = sorted(
            grouped[group],
            key=lambda item: (-item[2].score, -item[2].f,
                              skeleton_sort_key(item[0])),
        )
        for skeleton, label, stats in ranked[:k]:
            selected.append(Rule(conjuncts=skeleton, label=label,
                                 provenance="learned", iteration=iteration,
                                 stats=stats))
    selected.sort(key=lambda r: (r.label, skeleton_sort_key(r.conjuncts)))
    return selected
