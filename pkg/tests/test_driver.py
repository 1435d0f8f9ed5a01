"""Metrics, decoding, explanation, bootstrap orchestration, and CLI tests."""

import json

import numpy as np
import pytest

import synth
from ruletagger import cli, tagger
from ruletagger.candidates import build_candidate_index
from ruletagger.corpus import save_corpus
from ruletagger.driver import (BootstrapConfig, apply_ruleset_to_corpus,
                               boundary_prf, bootstrap, decode_predictions,
                               explain, gold_spans, micro_prf)
from ruletagger.rules import (TOKEN_STRING, Rule, RuleSet, SimplePattern,
                              apply_rules)
from ruletagger.selection import instance_embedding, select_labels
from ruletagger.selection import HighPrecisionSet, SelectionParams
from ruletagger.tagger import NEG_LABEL, SpanPrediction


def test_micro_prf_hand_example():
    gold = [("s", 0, 1, "A"), ("s", 2, 3, "A"), ("s", 4, 5, "B"),
            ("t", 0, 2, "B")]
    pred = [("s", 0, 1, "A"), ("s", 4, 5, "B"), ("t", 5, 6, "A")]
    m = micro_prf(pred, gold)
    assert m.precision == pytest.approx(2 / 3)
    assert m.recall == pytest.approx(0.5)
    assert m.f1 == pytest.approx(4 / 7, abs=1e-4)
    assert m.per_label["A"]["support"] == 2
    assert m.per_label["B"]["recall"] == pytest.approx(0.5)


def test_micro_prf_edge_cases():
    gold = [("s", 0, 1, "A")]
    perfect = micro_prf(gold, gold)
    assert (perfect.precision, perfect.recall, perfect.f1) == (1.0, 1.0, 1.0)
    empty = micro_prf([], gold)
    assert (empty.precision, empty.recall, empty.f1) == (0.0, 0.0, 0.0)


def test_boundary_prf_ignores_labels():
    gold = [("s", 0, 1, "A"), ("s", 2, 3, "B")]
    swapped = [("s", 0, 1, "B"), ("s", 2, 3, "A")]
    assert boundary_prf(swapped, gold).f1 == 1.0
    assert micro_prf(swapped, gold).f1 == 0.0
    disjoint = [("s", 5, 6, "A")]
    assert boundary_prf(disjoint, gold).f1 == 0.0


def _pred(key, label, conf):
    return SpanPrediction(key=key, probs=np.array([conf, 1 - conf]),
                          label=label, label_index=0, confidence=conf)


def test_decode_greedy_non_overlapping():
    preds = [_pred(("s", 0, 3), "A", 0.7),
             _pred(("s", 2, 4), "B", 0.9),   # wins the overlap
             _pred(("s", 5, 6), "A", 0.6),
             _pred(("s", 4, 5), NEG_LABEL, 0.99)]
    assert decode_predictions(preds) == [("s", 2, 4, "B"), ("s", 5, 6, "A")]


def test_decode_output_sorted_across_sentences():
    preds = [_pred(("t", 0, 1), "A", 0.9), _pred(("s", 0, 1), "A", 0.5)]
    assert decode_predictions(preds) == [("s", 0, 1, "A"), ("t", 0, 1, "A")]


def test_gold_spans(s1_corpus):
    s1_corpus.sentences[0].gold = [(4, 6, "Location")]
    assert gold_spans(s1_corpus) == [("s1", 4, 6, "Location")]


def test_explain_renders_rules_and_model_only_flag(s1_corpus):
    index = build_candidate_index(s1_corpus, None, 5)
    ruleset = RuleSet()
    ruleset.add(Rule((SimplePattern(TOKEN_STRING, "united state"),),
                     "Location", "seed"))
    weak = {w.key: w for w in apply_rules(ruleset, index, s1_corpus)}
    preds = [("s1", 4, 6, "Location"), ("s1", 0, 1, "Person")]
    recs = explain(preds, weak, ruleset, s1_corpus)
    assert recs[0]["span"] == "United States"
    assert recs[0]["rules"] == ["TokenString=united state → Location (seed)"]
    assert recs[0]["model_only"] is False
    assert recs[1]["model_only"] is True and recs[1]["rules"] == []


def test_config_round_trip(tmp_path):
    config = BootstrapConfig(iterations=3, k0=7, momentum=0.5)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config.to_json()))
    assert BootstrapConfig.load(path) == config


def _small_config(**kw):
    base = dict(iterations=2, seed=0, epochs=20, k0=10)
    base.update(kw)
    return BootstrapConfig(**base)


def test_bootstrap_smoke_writes_artifacts(tmp_path):
    train = synth.generate_corpus(40, seed=5)
    artifacts = bootstrap(_small_config(), train, synth.seed_rules(),
                          lexicon=synth.phrase_lexicon(),
                          out_dir=tmp_path / "run")
    assert len(artifacts.reports) == 2
    for name in ("config.json", "rules.jsonl", "reports.jsonl",
                 "checkpoint.json", "predictions.jsonl", "explanations.jsonl"):
        assert (tmp_path / "run" / name).exists(), name
    # |H| and the rule set never shrink across iterations.
    for prev, cur in zip(artifacts.reports, artifacts.reports[1:]):
        assert cur.n_rules_total >= prev.n_rules_total
        for lab, size in prev.h_sizes.items():
            assert cur.h_sizes.get(lab, 0) >= size
    assert artifacts.predictions == sorted(artifacts.predictions)


def test_bootstrap_requires_seeds():
    train = synth.generate_corpus(5, seed=5)
    with pytest.raises(ValueError, match="seed rule set"):
        bootstrap(_small_config(), train, RuleSet())


def test_single_iteration_equals_seed_only_baseline():
    train = synth.generate_corpus(40, seed=6)
    seeds = synth.seed_rules()
    lexicon = synth.phrase_lexicon()
    config = _small_config(iterations=1)
    artifacts = bootstrap(config, train, seeds, lexicon=lexicon)

    # Reference: train one tagger on seed matches only, no rule learning.
    index = build_candidate_index(train, lexicon, config.max_span_len)
    weak = apply_rules(seeds, index, train, config.tie_policy)
    labels = tuple(seeds.labels)
    label_index = {lab: i for i, lab in enumerate(labels)}
    hset = HighPrecisionSet()
    triples = []
    for w in weak:
        cand = index.canonical[w.key]
        sent = train.by_id(cand.sentence_id)
        triples.append((w.key, w.label, instance_embedding(cand, sent)))
    select_labels(triples, hset, SelectionParams(), np.random.default_rng(0),
                  1, bootstrap_init=True)
    positives, pos_keys = [], set()
    for lab in labels:
        for key, _, _ in hset.members(lab):
            cand = index.canonical[key]
            positives.append(tagger.SpanExample.from_candidate(
                cand, train.by_id(cand.sentence_id), label_index[lab]))
            pos_keys.add(key)
    negatives = [
        tagger.SpanExample.from_candidate(index.canonical[k],
                                          train.by_id(k[0]), len(labels))
        for k in sorted(index.initial_negatives - pos_keys)
    ]
    params = tagger.train_for_labels(labels, positives, negatives,
                                     config.tagger_hyper(),
                                     seed=config.seed * 1000 + 1)
    expected = decode_predictions(tagger.predict_corpus(params, train, index))
    assert artifacts.predictions == expected


def test_apply_ruleset_to_corpus():
    train = synth.generate_corpus(30, seed=7)
    spans = apply_ruleset_to_corpus(synth.seed_rules(), train,
                                    BootstrapConfig(),
                                    lexicon=synth.phrase_lexicon())
    assert spans == sorted(spans)
    gold = set(gold_spans(train))
    assert spans and all(sp in gold for sp in spans)  # seeds are exact forms


@pytest.fixture
def cli_files(tmp_path):
    train = synth.generate_corpus(30, seed=8)
    paths = {
        "train": tmp_path / "train.jsonl",
        "seeds": tmp_path / "seeds.json",
        "phrases": tmp_path / "phrases.txt",
        "config": tmp_path / "config.json",
        "out": tmp_path / "run",
    }
    save_corpus(train, paths["train"])
    seed_records = [{"type": "TokenString", "pattern": r.conjuncts[0].pattern,
                     "label": r.label} for r in synth.seed_rules()]
    paths["seeds"].write_text(json.dumps(seed_records))
    paths["phrases"].write_text(
        "\n".join(sorted(synth.phrase_lexicon().phrases)) + "\n")
    paths["config"].write_text(json.dumps(_small_config().to_json()))
    return paths


def test_cli_run_eval_explain_round_trip(cli_files, tmp_path, capsys):
    rc = cli.main(["run", "--train", str(cli_files["train"]),
                   "--dev", str(cli_files["train"]),
                   "--seeds", str(cli_files["seeds"]),
                   "--phrases", str(cli_files["phrases"]),
                   "--config", str(cli_files["config"]),
                   "--out", str(cli_files["out"])])
    assert rc == 0
    assert (cli_files["out"] / "predictions.jsonl").exists()

    rc = cli.main(["eval", "--pred", str(cli_files["out"] / "predictions.jsonl"),
                   "--gold", str(cli_files["train"])])
    assert rc == 0
    printed = capsys.readouterr().out
    assert '"precision"' in printed and '"f1"' in printed

    out = tmp_path / "expl.jsonl"
    rc = cli.main(["explain", "--run", str(cli_files["out"]),
                   "--out", str(out)])
    assert rc == 0 and out.exists()


def test_cli_apply_rules(cli_files, tmp_path):
    run_dir = cli_files["out"]
    rc = cli.main(["run", "--train", str(cli_files["train"]),
                   "--seeds", str(cli_files["seeds"]),
                   "--phrases", str(cli_files["phrases"]),
                   "--config", str(cli_files["config"]),
                   "--out", str(run_dir)])
    assert rc == 0
    pred_path = tmp_path / "rule_preds.jsonl"
    rc = cli.main(["apply-rules", "--rules", str(run_dir / "rules.jsonl"),
                   "--corpus", str(cli_files["train"]),
                   "--seeds", str(cli_files["seeds"]),
                   "--phrases", str(cli_files["phrases"]),
                   "--out", str(pred_path)])
    assert rc == 0
    lines = [json.loads(l) for l in pred_path.read_text().splitlines()]
    assert lines and all(rec["confidence"] == 1.0 for rec in lines)


def test_cli_eval_requires_gold(cli_files, tmp_path):
    train = synth.generate_corpus(5, seed=9)
    for sent in train.sentences:
        sent.gold = None
    gold_free = tmp_path / "nogold.jsonl"
    save_corpus(train, gold_free)
    preds = tmp_path / "p.jsonl"
    preds.write_text("")
    assert cli.main(["eval", "--pred", str(preds),
                     "--gold", str(gold_free)]) == 2


def test_cli_run_rejects_invalid_corpus(cli_files, tmp_path):
    train = synth.generate_corpus(5, seed=10)
    train.sentences[0].gold = [(0, 99, "Disease")]
    bad = tmp_path / "bad.jsonl"
    save_corpus(train, bad)
    assert cli.main(["run", "--train", str(bad),
                     "--seeds", str(cli_files["seeds"]),
                     "--out", str(tmp_path / "r")]) == 2


def test_cli_explain_without_run_dir(tmp_path):
    assert cli.main(["explain", "--run", str(tmp_path / "nope"),
                     "--out", str(tmp_path / "o")]) == 2


def test_cli_missing_file_returns_error(tmp_path):
    assert cli.main(["eval", "--pred", str(tmp_path / "absent.jsonl"),
                     "--gold", str(tmp_path / "absent2.jsonl")]) == 1
