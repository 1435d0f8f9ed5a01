import numpy as np
import pytest

from ruletagger.corpus import Corpus, Sentence, TokenRecord


def make_sentence(sid, words, lemmas, pos, heads, deprels=None, dim=4,
                  noun_chunks=(), gold=None, emb_seed=0):
    rng = np.random.default_rng(emb_seed)
    deprels = deprels or [""] * len(words)
    tokens = [
        TokenRecord(text=w, lemma=l, pos=p, head=h, deprel=d,
                    emb=rng.normal(size=dim))
        for w, l, p, h, d in zip(words, lemmas, pos, heads, deprels)
    ]
    return Sentence(id=sid, tokens=tokens, noun_chunks=list(noun_chunks),
                    gold=gold)


@pytest.fixture
def s1():
    """"Einstein moved to the United States in 1916 ." with its parse."""
    return make_sentence(
        "s1",
        words=["Einstein", "moved", "to", "the", "United", "States", "in",
               "1916", "."],
        lemmas=["einstein", "move", "to", "the", "united", "state", "in",
                "1916", "."],
        pos=["PROPN", "VERB", "ADP", "DET", "PROPN", "PROPN", "ADP", "NUM",
             "PUNCT"],
        heads=[1, -1, 1, 5, 5, 2, 1, 6, 1],
        noun_chunks=[(0, 1), (3, 6)],
    )


@pytest.fixture
def s1_corpus(s1):
    return Corpus(dim=4, sentences=[s1])
