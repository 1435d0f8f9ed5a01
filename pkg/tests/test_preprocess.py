"""Preprocessor tests: pipeline, conversion, phrase mining, verification.

The only contract between the preprocessor and the tagging engine is the
corpus JSONL format, so interoperability is asserted by loading the
emitted files with the engine's own loader and validator.
"""

import json

import numpy as np
import pytest

from corpusprep import check_roundtrip, mine_phrases
from corpusprep.convert import (PreprocessJob, preprocess_corpus, read_conll,
                                read_plain)
from corpusprep.embeddings import HashEmbedder
from corpusprep.pipeline import parse_sentence, split_sentences, tokenize
from corpusprep import cli
from ruletagger.corpus import load_corpus, validate_corpus

S1_TEXT = "Einstein moved to the United States in 1916."


def test_tokenize_and_split():
    assert tokenize(S1_TEXT) == ["Einstein", "moved", "to", "the", "United",
                                 "States", "in", "1916", "."]
    text = "One sentence here. Another one follows! A third?"
    assert len(split_sentences(text)) == 3


def test_reference_sentence_parse():
    parsed = parse_sentence(tokenize(S1_TEXT))
    lemmas = [t.lemma for t in parsed.tokens]
    assert lemmas == ["einstein", "move", "to", "the", "united", "state",
                      "in", "1916", "."]
    assert [t.pos for t in parsed.tokens] == ["PROPN", "VERB", "ADP", "DET",
                                              "PROPN", "PROPN", "ADP", "NUM",
                                              "PUNCT"]
    # "States" hangs off the preposition "to".
    words = [t.text for t in parsed.tokens]
    assert parsed.tokens[words.index("States")].head == words.index("to")
    assert parsed.noun_chunks == [(0, 1), (3, 6)]


def test_heads_always_form_valid_tree():
    for sentence in ["Red!", "the", "He quickly gave her the old book.",
                     "Doses of zorafenib were administered to patients.",
                     "1916 . . in"]:
        parsed = parse_sentence(tokenize(sentence))
        n = len(parsed.tokens)
        roots = [i for i, t in enumerate(parsed.tokens) if t.head == -1]
        assert len(roots) == 1
        for i, t in enumerate(parsed.tokens):
            assert -1 <= t.head < n and t.head != i


def test_hash_embedder_deterministic_and_context_sensitive():
    emb = HashEmbedder(dim=16)
    a = emb.encode(["mild", "fever", "today"], ["mild", "fever", "today"])
    b = HashEmbedder(dim=16).encode(["mild", "fever", "today"],
                                    ["mild", "fever", "today"])
    np.testing.assert_array_equal(a, b)
    # Same word, different neighbors: close but not identical vectors.
    c = emb.encode(["severe", "fever", "spiked"], ["severe", "fever", "spike"])
    cos = a[1] @ c[1] / (np.linalg.norm(a[1]) * np.linalg.norm(c[1]))
    assert 0.8 < cos < 1.0


def test_read_plain_and_conll(tmp_path):
    plain = tmp_path / "in.txt"
    plain.write_text("One sentence here. Another one.\nThird on a new line.\n")
    assert len(read_plain(plain)) == 3

    conll = tmp_path / "in.conll"
    conll.write_text("Aspirin\tB-Chemical\nhelps\tO\n\n"
                     "Chronic\tB-Disease\nfatigue\tI-Disease\n"
                     "and\tO\ngout\tB-Disease\n")
    sents = read_conll(conll)
    assert [g for _, g in sents] == [[(0, 1, "Chemical")],
                                     [(0, 2, "Disease"), (3, 4, "Disease")]]


def test_preprocess_plain_passes_primary_validator(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("Einstein moved to the United States in 1916. "
                   "The patient suffered from chronic fatigue. "
                   "Doses of zorafenib were administered daily. "
                   "A nurse confirmed the diagnosis of sepsis. "
                   "Exposure to nicotine may cause harm.")
    out = tmp_path / "corpus.jsonl"
    stats = preprocess_corpus(PreprocessJob(str(src), fmt="plain",
                                            out_path=str(out), dim=24))
    assert stats["sentences"] == 5 and stats["dim"] == 24
    assert check_roundtrip(out).passed
    corpus = load_corpus(out)
    report = validate_corpus(corpus)
    assert report.passed and report.n_sentences == 5
    assert not corpus.has_gold()


def test_preprocess_conll_passes_gold_through(tmp_path):
    src = tmp_path / "in.conll"
    src.write_text("Aspirin\tB-Chemical\ntreats\tO\nfever\tB-Disease\n\n"
                   "Gout\tB-Disease\nhurts\tO\n")
    out = tmp_path / "corpus.jsonl"
    stats = preprocess_corpus(PreprocessJob(str(src), fmt="conll",
                                            out_path=str(out), dim=16))
    assert stats["entities"] == 3
    corpus = load_corpus(out)
    report = validate_corpus(corpus)
    assert report.passed and report.gold_present
    assert sum(report.gold_per_label.values()) == 3


def test_mine_phrases(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text(" ".join(["The United States grew."] * 10
                            + ["A state grew alone."] * 3))
    out = tmp_path / "corpus.jsonl"
    preprocess_corpus(PreprocessJob(str(src), out_path=str(out), dim=8))
    phrases = mine_phrases(out, min_count=5, max_len=3)
    assert "united state" in phrases
    assert mine_phrases(out, min_count=500) == []
    with pytest.raises(ValueError):
        mine_phrases(out, min_count=0)


def test_check_roundtrip_flags_bad_sentences(tmp_path):
    path = tmp_path / "bad.jsonl"
    header = {"format": "tallor-corpus", "version": 1, "dim": 2}
    good = {"id": "ok", "tokens": [{"text": "a", "lemma": "a", "pos": "X",
                                    "head": -1, "emb": [0.0, 0.0]}],
            "noun_chunks": []}
    bad = {"id": "broken", "tokens": [{"text": "b", "lemma": "b", "pos": "X",
                                       "head": 5, "emb": [0.0]}],
           "noun_chunks": [[0, 9]]}
    path.write_text("\n".join(json.dumps(r) for r in (header, good, bad)))
    report = check_roundtrip(path)
    assert not report.passed
    assert report.per_sentence["ok"] == []
    assert len(report.per_sentence["broken"]) == 3
    assert "broken: FAIL" in report.summary()


def test_cli_round_trip(tmp_path, capsys):
    src = tmp_path / "in.txt"
    src.write_text("The United States grew. " * 8)
    out = tmp_path / "c.jsonl"
    assert cli.main(["preprocess", "--input", str(src), "--out", str(out),
                     "--dim", "8"]) == 0
    assert cli.main(["check", "--corpus", str(out)]) == 0
    lex = tmp_path / "phrases.txt"
    assert cli.main(["mine-phrases", "--corpus", str(out), "--min-count", "4",
                     "--out", str(lex)]) == 0
    assert "united state" in lex.read_text().splitlines()
    assert cli.main(["check", "--corpus", str(tmp_path / "missing.jsonl")]) == 2
    capsys.readouterr()
