"""Bootstrap orchestration: the iterate-label-train-learn loop plus evaluation.

Each iteration applies the current rule set to the corpus, filters the weak
labels through the high-precision set, retrains the span classifier, pools
its confident predictions, and selects new rules by RlogF under a growing
top-K budget and a precision floor.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import learner, rules, selection, tagger
from .candidates import CandidateIndex, SpanKey, build_candidate_index, span_key_str
from .corpus import Corpus, PhraseLexicon
from .rules import PatternConfig, Rule, RuleSet, WeakLabel
from .selection import HighPrecisionSet, SelectionParams, instance_embedding
from .tagger import (NEG_LABEL, SpanExample, SpanPrediction, TaggerHyper,
                     TaggerParams, top_confident)

log = logging.getLogger(__name__)


class BootstrapError(RuntimeError):
    """A module failure, tagged with the iteration and phase it occurred in."""

    def __init__(self, iteration: int, phase: str, cause: Exception):
        super().__init__(f"iteration {iteration}, phase {phase}: {cause}")
        self.iteration = iteration
        self.phase = phase
        self.cause = cause


@dataclass
class BootstrapConfig:
    max_span_len: int = 5
    ngram_max: int = 3
    k0: int = 20
    eta: int = 1
    theta: float = 0.9
    confident_fraction: float = 0.7
    tau: float = 0.8
    global_samples: int = 50
    global_sample_size: int = 3
    holdout_cap: int = 50
    iterations: int = 32
    tie_policy: str = "abstain"
    strategy: str = "entity_type"
    neg_confidence: float = 0.9
    lr: float = 1e-2
    epochs: int = 50
    batch_size: int = 32
    hidden: int = 64
    momentum: float = 0.0
    neg_ratio: float = 5.0
    seed: int = 0

    def pattern_config(self) -> PatternConfig:
        return PatternConfig(ngram_max=self.ngram_max)

    def selection_params(self) -> SelectionParams:
        return SelectionParams(tau=self.tau, n_samples=self.global_samples,
                               sample_size=self.global_sample_size,
                               holdout_cap=self.holdout_cap)

    def tagger_hyper(self) -> TaggerHyper:
        return TaggerHyper(lr=self.lr, epochs=self.epochs,
                           batch_size=self.batch_size, hidden=self.hidden,
                           momentum=self.momentum, neg_ratio=self.neg_ratio)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, rec: dict) -> "BootstrapConfig":
        return cls(**rec)

    @classmethod
    def load(cls, path) -> "BootstrapConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


@dataclass
class Metrics:
    precision: float
    recall: float
    f1: float
    per_label: dict[str, dict[str, float]] = field(default_factory=dict)
    n_pred: int = 0
    n_gold: int = 0

    def to_json(self) -> dict:
        return {"precision": round(self.precision, 6),
                "recall": round(self.recall, 6),
                "f1": round(self.f1, 6),
                "n_pred": self.n_pred, "n_gold": self.n_gold,
                "per_label": self.per_label}


def _prf(tp: int, n_pred: int, n_gold: int) -> tuple[float, float, float]:
    p = tp / n_pred if n_pred else 0.0
    r = tp / n_gold if n_gold else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


PredSpan = tuple[str, int, int, str]  # (sentence id, start, end, label)


def micro_prf(predicted: list[PredSpan], gold: list[PredSpan]) -> Metrics:
    """Exact span-and-label match, micro-averaged over all labels."""
    pred_set = set(predicted)
    gold_set = set(gold)
    tp = len(pred_set & gold_set)
    p, r, f1 = _prf(tp, len(pred_set), len(gold_set))
    per_label = {}
    labels = {lab for *_, lab in gold_set} | {lab for *_, lab in pred_set}
    for lab in sorted(labels):
        pl = {x for x in pred_set if x[3] == lab}
        gl = {x for x in gold_set if x[3] == lab}
        lp, lr, lf = _prf(len(pl & gl), len(pl), len(gl))
        per_label[lab] = {"precision": lp, "recall": lr, "f1": lf,
                          "support": len(gl)}
    return Metrics(p, r, f1, per_label, len(pred_set), len(gold_set))


def boundary_prf(predicted: list[PredSpan], gold: list[PredSpan]) -> Metrics:
    """Exact span match, ignoring the label."""
    pred_set = {(s, a, b) for s, a, b, _ in predicted}
    gold_set = {(s, a, b) for s, a, b, _ in gold}
    tp = len(pred_set & gold_set)
    p, r, f1 = _prf(tp, len(pred_set), len(gold_set))
    return Metrics(p, r, f1, {}, len(pred_set), len(gold_set))


def gold_spans(corpus: Corpus) -> list[PredSpan]:
    out = []
    for sent in corpus:
        for s, e, lab in sent.gold or []:
            out.append((sent.id, s, e, lab))
    return out


def decode_predictions(predictions: list[SpanPrediction]) -> list[PredSpan]:
    """Greedy confidence-first selection of non-overlapping non-NEG spans."""
    by_sentence: dict[str, list[SpanPrediction]] = {}
    for p in predictions:
        if p.label == NEG_LABEL:
            continue
        by_sentence.setdefault(p.key[0], []).append(p)
    out = []
    for sid in sorted(by_sentence):
        taken: list[tuple[int, int]] = []
        for p in sorted(by_sentence[sid], key=lambda p: (-p.confidence, p.key)):
            s, e = p.key[1], p.key[2]
            if any(s < te and ts < e for ts, te in taken):
                continue
            taken.append((s, e))
            out.append((sid, s, e, p.label))
    out.sort()
    return out


@dataclass
class IterationReport:
    iteration: int
    n_rules_total: int
    n_rules_new: int
    n_weak_labels: int
    n_accepted: int
    h_sizes: dict[str, int]
    dev: Metrics | None
    wall_time: float

    def to_json(self) -> dict:
        rec = {
            "iteration": self.iteration,
            "rules_total": self.n_rules_total,
            "rules_new": self.n_rules_new,
            "weak_labels": self.n_weak_labels,
            "accepted": self.n_accepted,
            "high_precision_sizes": self.h_sizes,
            "wall_time": round(self.wall_time, 3),
        }
        if self.dev is not None:
            rec["dev"] = self.dev.to_json()
        return rec


@dataclass
class RunArtifacts:
    config: BootstrapConfig
    ruleset: RuleSet
    reports: list[IterationReport]
    params: TaggerParams | None
    best_iteration: int
    predictions: list[PredSpan]
    prediction_confidence: dict[PredSpan, float]
    explanations: list[dict]
    weak_label_index: dict[SpanKey, WeakLabel]


def _write_predictions(preds: list[PredSpan], conf: dict[PredSpan, float], path):
    with open(path, "w", encoding="utf-8") as fh:
        for sid, s, e, lab in preds:
            rec = {"sentence": sid, "start": s, "end": e, "label": lab,
                   "confidence": round(conf.get((sid, s, e, lab), 0.0), 6)}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def explain(predictions: list[PredSpan], weak_labels: dict[SpanKey, WeakLabel],
            ruleset: RuleSet, corpus: Corpus) -> list[dict]:
    """Per predicted entity: the matching rules, or a model-only flag."""
    by_id = {r.rule_id: r for r in ruleset}
    out = []
    for sid, s, e, lab in predictions:
        sent = corpus.by_id(sid)
        rec = {
            "sentence": sid,
            "text": sent.text,
            "span": " ".join(t.text for t in sent.tokens[s:e]),
            "start": s, "end": e,
            "label": lab,
        }
        weak = weak_labels.get((sid, s, e))
        if weak is None:
            rec["model_only"] = True
            rec["rules"] = []
        else:
            rec["model_only"] = False
            rec["rules"] = [by_id[rid].render() for rid in weak.rule_ids
                            if rid in by_id]
        out.append(rec)
    return out


def _build_examples(keys: list[tuple[SpanKey, int]], index: CandidateIndex,
                    corpus: Corpus) -> list[SpanExample]:
    out = []
    for key, label_index in keys:
        cand = index.canonical[key]
        sent = corpus.by_id(cand.sentence_id)
        out.append(SpanExample.from_candidate(cand, sent, label_index))
    return out


def bootstrap(
    config: BootstrapConfig,
    train_corpus: Corpus,
    seeds: RuleSet,
    dev_corpus: Corpus | None = None,
    lexicon: PhraseLexicon | None = None,
    out_dir: str | Path | None = None,
) -> RunArtifacts:
    """Run the full bootstrap loop and return (and optionally write) artifacts."""
    if len(seeds) == 0:
        raise ValueError("seed rule set is empty")
    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)
        (out_path / "config.json").write_text(
            json.dumps(config.to_json(), indent=2, sort_keys=True))

    labels = tuple(seeds.labels)
    label_index = {lab: i for i, lab in enumerate(labels)}
    pat_config = config.pattern_config()
    sel_params = config.selection_params()
    hyper = config.tagger_hyper()

    index = build_candidate_index(train_corpus, lexicon, config.max_span_len)
    pattern_sets = rules.candidate_pattern_sets(index, train_corpus, pat_config)
    skeleton_index = rules.enumerate_rule_candidates(
        train_corpus, index, pat_config, pattern_sets)
    dev_index = (build_candidate_index(dev_corpus, lexicon, config.max_span_len)
                 if dev_corpus is not None else None)

    ruleset = RuleSet()
    for r in seeds:
        ruleset.add(Rule(r.conjuncts, r.label, "seed", 0))
    hset = HighPrecisionSet()
    reports: list[IterationReport] = []
    params: TaggerParams | None = None
    best_params: TaggerParams | None = None
    best_f1 = -1.0
    best_iteration = 0
    last_predictions: list[SpanPrediction] = []
    weak_index: dict[SpanKey, WeakLabel] = {}
    aborted: Exception | None = None
    phase = "init"

    try:
        for t in range(1, config.iterations + 1):
            t0 = time.monotonic()
            phase = "apply_rules"
            weak = rules.apply_rules(ruleset, index, train_corpus,
                                     config.tie_policy, pat_config, pattern_sets)
            weak_index = {w.key: w for w in weak}

            phase = "select_labels"
            rng_sel = np.random.default_rng([config.seed, 11, t])
            triples = []
            for w in weak:
                cand = index.canonical[w.key]
                sent = train_corpus.by_id(cand.sentence_id)
                triples.append((w.key, w.label, instance_embedding(cand, sent)))
            accepted = selection.select_labels(
                triples, hset, sel_params, rng_sel, iteration=t,
                bootstrap_init=(t == 1))

            phase = "train_tagger"
            positives = []
            for lab in labels:
                for key, _, _ in hset.members(lab):
                    positives.append((key, label_index[lab]))
            neg_keys = set(index.initial_negatives)
            if last_predictions:
                neg_keys.update(tagger.confident_neg(last_predictions,
                                                     config.neg_confidence))
            neg_keys -= {key for key, _ in positives}
            neg_class = len(labels)
            pos_examples = _build_examples(sorted(positives), index, train_corpus)
            neg_examples = _build_examples(
                [(k, neg_class) for k in sorted(neg_keys)], index, train_corpus)
            params = tagger.train_for_labels(
                labels, pos_examples, neg_examples, hyper,
                seed=config.seed * 1000 + t)

            phase = "predict"
            predictions = tagger.predict_corpus(params, train_corpus, index)
            last_predictions = predictions

            phase = "rule_selection"
            members = {
                lab: set(keys)
                for lab, keys in top_confident(predictions,
                                               config.confident_fraction).items()
            }
            # The scoring universe is every span with a confident prediction,
            # NEG included: matched spans outside it are neither evidence for
            # nor against a rule.
            neg_preds = [p for p in predictions if p.label == NEG_LABEL]
            neg_preds.sort(key=lambda p: (-p.confidence, p.key))
            n_keep = math.ceil(config.confident_fraction * len(neg_preds))
            universe = set().union(*members.values()) if members else set()
            universe.update(p.key for p in neg_preds[:n_keep])
            existing = ruleset.skeletons()
            k = learner.k_schedule(config.k0, config.eta, t)
            scored = []
            for skeleton in sorted(skeleton_index, key=learner.skeleton_sort_key):
                if skeleton in existing:
                    continue
                matched = skeleton_index[skeleton]
                stats = learner.rule_stats(matched, members, universe)
                scored.append((skeleton, stats))
            new_rules = learner.select_new_rules(
                scored, config.strategy, k, config.theta, existing,
                list(labels), iteration=t)
            n_new = sum(ruleset.add(r) for r in new_rules)

            phase = "evaluate"
            dev_metrics = None
            if dev_corpus is not None and dev_corpus.has_gold():
                dev_preds = tagger.predict_corpus(params, dev_corpus, dev_index)
                dev_metrics = micro_prf(decode_predictions(dev_preds),
                                        gold_spans(dev_corpus))
                if dev_metrics.f1 > best_f1:
                    best_f1 = dev_metrics.f1
                    best_params = params
                    best_iteration = t
            else:
                best_params = params
                best_iteration = t

            report = IterationReport(
                iteration=t, n_rules_total=len(ruleset), n_rules_new=n_new,
                n_weak_labels=len(weak), n_accepted=len(accepted),
                h_sizes=hset.sizes(), dev=dev_metrics,
                wall_time=time.monotonic() - t0)
            reports.append(report)
            log.info("iteration %d: rules=%d (+%d) weak=%d accepted=%d H=%s%s",
                     t, len(ruleset), n_new, len(weak), len(accepted),
                     hset.sizes(),
                     f" devF1={dev_metrics.f1:.4f}" if dev_metrics else "")
    except Exception as exc:  # noqa: BLE001 - re-raised after artifact dump
        aborted = BootstrapError(len(reports) + 1, phase, exc)

    if aborted is None:
        # Re-apply the final rule set so explanations cover rules selected in
        # the last iteration as well.
        weak = rules.apply_rules(ruleset, index, train_corpus,
                                 config.tie_policy, pat_config, pattern_sets)
        weak_index = {w.key: w for w in weak}

    final_params = best_params if best_params is not None else params
    predictions_out: list[PredSpan] = []
    conf: dict[PredSpan, float] = {}
    explanations: list[dict] = []
    if final_params is not None:
        final_preds = tagger.predict_corpus(final_params, train_corpus, index)
        predictions_out = decode_predictions(final_preds)
        by_key = {p.key: p for p in final_preds}
        conf = {(sid, s, e, lab): by_key[(sid, s, e)].confidence
                for sid, s, e, lab in predictions_out}
        explanations = explain(predictions_out, weak_index, ruleset, train_corpus)

    if out_path is not None:
        rules.write_rules_jsonl(ruleset, out_path / "rules.jsonl")
        with open(out_path / "reports.jsonl", "w", encoding="utf-8") as fh:
            for rep in reports:
                fh.write(json.dumps(rep.to_json(), sort_keys=True) + "\n")
        if final_params is not None:
            tagger.save_checkpoint(final_params, out_path / "checkpoint.json")
        _write_predictions(predictions_out, conf, out_path / "predictions.jsonl")
        with open(out_path / "explanations.jsonl", "w", encoding="utf-8") as fh:
            for rec in explanations:
                fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
        if aborted is not None:
            (out_path / "ABORTED").write_text(str(aborted) + "\n")

    if aborted is not None:
        raise aborted

    return RunArtifacts(
        config=config, ruleset=ruleset, reports=reports, params=final_params,
        best_iteration=best_iteration, predictions=predictions_out,
        prediction_confidence=conf, explanations=explanations,
        weak_label_index=weak_index)


def apply_ruleset_to_corpus(
    ruleset: RuleSet, corpus: Corpus, config: BootstrapConfig,
    lexicon: PhraseLexicon | None = None,
) -> list[PredSpan]:
    """Rule-only labeling of a corpus (no tagger), for rules-only evaluation."""
    index = build_candidate_index(corpus, lexicon, config.max_span_len)
    weak = rules.apply_rules(ruleset, index, corpus, config.tie_policy,
                             config.pattern_config())
    return sorted((w.key[0], w.key[1], w.key[2], w.label) for w in weak)
