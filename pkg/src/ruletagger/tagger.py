"""Span classifier: attention-pooled content + boundary features, MLP head.

The representation of a span concatenates a softmax-attention weighted mean
of its token embeddings (content) with the embeddings at its start and end
positions (boundary).  A one-hidden-layer tanh MLP with a softmax head
predicts a distribution over the entity labels plus NEG.  All gradients are
computed analytically in numpy; training is plain minibatch gradient descent
with optional momentum, fully seed-deterministic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .candidates import CandidateIndex, SpanCandidate, SpanKey
from .corpus import Corpus, Sentence

NEG_LABEL = "NEG"


@dataclass
class TaggerHyper:
    lr: float = 1e-2
    epochs: int = 50
    batch_size: int = 32
    hidden: int = 64
    momentum: float = 0.0
    neg_ratio: float = 5.0
    init_scale: float = 0.08


@dataclass
class TaggerParams:
    labels: tuple[str, ...]  # entity labels; NEG is the extra last class
    att: np.ndarray          # (D,)
    w1: np.ndarray           # (H, 3D)
    b1: np.ndarray           # (H,)
    w2: np.ndarray           # (C, H)
    b2: np.ndarray           # (C,)
    seed: int
    hyper: TaggerHyper = field(default_factory=TaggerHyper)

    @property
    def n_classes(self) -> int:
        return len(self.labels) + 1

    @property
    def dim(self) -> int:
        return self.att.shape[0]

    def class_name(self, idx: int) -> str:
        return self.labels[idx] if idx < len(self.labels) else NEG_LABEL

    def grads_like(self) -> dict[str, np.ndarray]:
        return {name: np.zeros_like(getattr(self, name))
                for name in ("att", "w1", "b1", "w2", "b2")}

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "seed": self.seed,
            "hyper": vars(self.hyper),
            "att": self.att.tolist(),
            "w1": self.w1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2.tolist(),
        }

    @classmethod
    def from_json(cls, rec: dict) -> "TaggerParams":
        return cls(
            labels=tuple(rec["labels"]),
            att=np.asarray(rec["att"]),
            w1=np.asarray(rec["w1"]),
            b1=np.asarray(rec["b1"]),
            w2=np.asarray(rec["w2"]),
            b2=np.asarray(rec["b2"]),
            seed=rec["seed"],
            hyper=TaggerHyper(**rec["hyper"]),
        )


def init_params(labels: tuple[str, ...], dim: int, hyper: TaggerHyper,
                seed: int) -> TaggerParams:
    rng = np.random.default_rng(seed)
    s = hyper.init_scale
    n_classes = len(labels) + 1
    return TaggerParams(
        labels=labels,
        att=rng.uniform(-s, s, size=dim),
        w1=rng.uniform(-s, s, size=(hyper.hidden, 3 * dim)),
        b1=rng.uniform(-s, s, size=hyper.hidden),
        w2=rng.uniform(-s, s, size=(n_classes, hyper.hidden)),
        b2=rng.uniform(-s, s, size=n_classes),
        seed=seed,
        hyper=hyper,
    )


@dataclass
class SpanExample:
    key: SpanKey
    tokens: np.ndarray  # (L, D) embeddings of the canonical range
    label_index: int    # class index; NEG = len(labels)

    @classmethod
    def from_candidate(cls, candidate: SpanCandidate, sentence: Sentence,
                       label_index: int) -> "SpanExample":
        toks = np.stack([sentence.tokens[i].emb
                         for i in range(candidate.canonical_start,
                                        candidate.canonical_end)])
        return cls(key=candidate.key, tokens=toks, label_index=label_index)


@dataclass
class SpanPrediction:
    key: SpanKey
    probs: np.ndarray
    label: str
    label_index: int
    confidence: float


def _batch_arrays(examples: list[SpanExample]):
    """Pad span token matrices to a common length; returns (X, mask, y)."""
    b = len(examples)
    max_len = max(e.tokens.shape[0] for e in examples)
    dim = examples[0].tokens.shape[1]
    x = np.zeros((b, max_len, dim))
    mask = np.zeros((b, max_len), dtype=bool)
    y = np.array([e.label_index for e in examples])
    for i, e in enumerate(examples):
        L = e.tokens.shape[0]
        x[i, :L] = e.tokens
        mask[i, :L] = True
    return x, mask, y


def _forward(params: TaggerParams, x: np.ndarray, mask: np.ndarray):
    """Batched forward pass; returns probs and a cache for the backward pass."""
    scores = x @ params.att                      # (B, L)
    scores = np.where(mask, scores, -np.inf)
    scores = scores - scores.max(axis=1, keepdims=True)
    expw = np.where(mask, np.exp(scores), 0.0)
    w = expw / expw.sum(axis=1, keepdims=True)   # (B, L) attention weights
    content = np.einsum("bl,bld->bd", w, x)      # (B, D)
    lengths = mask.sum(axis=1)
    idx = np.arange(x.shape[0])
    x_start = x[idx, 0]                          # (B, D)
    x_end = x[idx, lengths - 1]                  # (B, D)
    z = np.concatenate([content, x_start, x_end], axis=1)   # (B, 3D)
    h = np.tanh(z @ params.w1.T + params.b1)     # (B, H)
    logits = h @ params.w2.T + params.b2         # (B, C)
    logits = logits - logits.max(axis=1, keepdims=True)
    expl = np.exp(logits)
    probs = expl / expl.sum(axis=1, keepdims=True)
    cache = (x, mask, w, content, z, h)
    return probs, cache


def loss_and_grads(params: TaggerParams, examples: list[SpanExample]):
    """Mean cross-entropy over the batch and analytic gradients."""
    x, mask, y = _batch_arrays(examples)
    probs, (x, mask, w, content, z, h) = _forward(params, x, mask)
    b = x.shape[0]
    loss = float(-np.mean(np.log(probs[np.arange(b), y] + 1e-300)))
    dlogits = probs.copy()
    dlogits[np.arange(b), y] -= 1.0
    dlogits /= b
    grads = {
        "w2": dlogits.T @ h,
        "b2": dlogits.sum(axis=0),
    }
    dh = dlogits @ params.w2
    dpre = dh * (1.0 - h ** 2)
    grads["w1"] = dpre.T @ z
    grads["b1"] = dpre.sum(axis=0)
    dz = dpre @ params.w1
    dim = params.dim
    dcontent = dz[:, :dim]
    # Attention backward: ds_t = w_t * (x_t . dc - c . dc)
    proj = np.einsum("bld,bd->bl", x, dcontent)
    cdot = np.einsum("bd,bd->b", content, dcontent)
    ds = w * (proj - cdot[:, None])
    ds = np.where(mask, ds, 0.0)
    grads["att"] = np.einsum("bl,bld->d", ds, x)
    return loss, grads


def span_representation(candidate: SpanCandidate, sentence: Sentence,
                        params: TaggerParams) -> np.ndarray:
    """[content ; start ; end] feature vector of a single span."""
    toks = np.stack([sentence.tokens[i].emb
                     for i in range(candidate.canonical_start,
                                    candidate.canonical_end)])
    x = toks[None, :, :]
    mask = np.ones((1, toks.shape[0]), dtype=bool)
    scores = (x @ params.att)
    scores = scores - scores.max(axis=1, keepdims=True)
    w = np.exp(scores)
    w = w / w.sum(axis=1, keepdims=True)
    content = np.einsum("bl,bld->bd", w, x)[0]
    return np.concatenate([content, toks[0], toks[-1]])


def predict_span(representation: np.ndarray, params: TaggerParams) -> SpanPrediction:
    """Class distribution of a precomputed span representation."""
    if representation.shape[0] != params.w1.shape[1]:
        raise ValueError(
            f"representation dim {representation.shape[0]} != {params.w1.shape[1]}"
        )
    h = np.tanh(params.w1 @ representation + params.b1)
    logits = params.w2 @ h + params.b2
    logits = logits - logits.max()
    probs = np.exp(logits)
    probs = probs / probs.sum()
    idx = int(np.argmax(probs))
    return SpanPrediction(key=("", 0, 0), probs=probs,
                          label=params.class_name(idx), label_index=idx,
                          confidence=float(probs[idx]))


def train_tagger(
    positives: list[SpanExample], negatives: list[SpanExample],
    hyper: TaggerHyper, seed: int,
) -> TaggerParams:
    """Train from scratch on positives plus per-epoch resampled negatives.

    Examples are canonically sorted before any seeded shuffling, so the final
    parameters do not depend on input order.
    """
    if not positives or not negatives:
        raise ValueError("degenerate training set: need >= 1 positive and negative")
    positives = sorted(positives, key=lambda e: (e.label_index, e.key))
    negatives = sorted(negatives, key=lambda e: (e.label_index, e.key))
    n_labels = max((e.label_index for e in positives), default=0) + 1
    dim = positives[0].tokens.shape[1]
    params = init_params(tuple(f"c{i}" for i in range(n_labels)), dim, hyper, seed)
    return _fit(params, positives, negatives, hyper, seed)


def _fit(params: TaggerParams, positives: list[SpanExample],
         negatives: list[SpanExample], hyper: TaggerHyper,
         seed: int) -> TaggerParams:
    rng = np.random.default_rng([seed, 7])
    velocity = params.grads_like()
    n_neg = min(len(negatives), max(1, int(round(hyper.neg_ratio * len(positives)))))
    for _ in range(hyper.epochs):
        if n_neg < len(negatives):
            neg_idx = rng.choice(len(negatives), size=n_neg, replace=False)
            epoch_neg = [negatives[i] for i in sorted(neg_idx)]
        else:
            epoch_neg = negatives
        data = positives + epoch_neg
        order = rng.permutation(len(data))
        for lo in range(0, len(data), hyper.batch_size):
            batch = [data[i] for i in order[lo:lo + hyper.batch_size]]
            _, grads = loss_and_grads(params, batch)
            for name, g in grads.items():
                velocity[name] = hyper.momentum * velocity[name] - hyper.lr * g
                setattr(params, name, getattr(params, name) + velocity[name])
    return params


def train_for_labels(
    labels: tuple[str, ...], positives: list[SpanExample],
    negatives: list[SpanExample], hyper: TaggerHyper, seed: int,
) -> TaggerParams:
    """train_tagger with an explicit label vocabulary (used by the driver)."""
    if not positives or not negatives:
        raise ValueError("degenerate training set: need >= 1 positive and negative")
    positives = sorted(positives, key=lambda e: (e.label_index, e.key))
    negatives = sorted(negatives, key=lambda e: (e.label_index, e.key))
    dim = positives[0].tokens.shape[1]
    params = init_params(labels, dim, hyper, seed)
    return _fit(params, positives, negatives, hyper, seed)


def predict_examples(params: TaggerParams,
                     examples: list[SpanExample]) -> list[SpanPrediction]:
    out = []
    batch_size = 512
    for lo in range(0, len(examples), batch_size):
        chunk = examples[lo:lo + batch_size]
        x, mask, _ = _batch_arrays(chunk)
        probs, _ = _forward(params, x, mask)
        for e, p in zip(chunk, probs):
            idx = int(np.argmax(p))
            out.append(SpanPrediction(key=e.key, probs=p,
                                      label=params.class_name(idx),
                                      label_index=idx,
                                      confidence=float(p[idx])))
    return out


def predict_corpus(params: TaggerParams, corpus: Corpus,
                   index: CandidateIndex) -> list[SpanPrediction]:
    """One prediction per canonical candidate, in sorted span-key order."""
    examples = []
    for cand in index.canonical_candidates():
        sent = corpus.by_id(cand.sentence_id)
        examples.append(SpanExample.from_candidate(cand, sent, 0))
    return predict_examples(params, examples)


def top_confident(predictions: list[SpanPrediction],
                  fraction: float) -> dict[str, list[SpanKey]]:
    """Per non-NEG label: most confident ceil(fraction * count) argmax spans."""
    if not (0.0 < fraction <= 1.0):
        raise ValueError("fraction must be in (0, 1]")
    by_label: dict[str, list[SpanPrediction]] = {}
    for p in predictions:
        if p.label == NEG_LABEL:
            continue
        by_label.setdefault(p.label, []).append(p)
    out = {}
    for label, preds in by_label.items():
        preds.sort(key=lambda p: (-p.confidence, p.key))
        keep = math.ceil(fraction * len(preds))
        out[label] = [p.key for p in preds[:keep]]
    return out


def confident_neg(predictions: list[SpanPrediction],
                  min_confidence: float = 0.9) -> list[SpanKey]:
    """Spans the tagger currently calls NEG with high confidence."""
    return [p.key for p in predictions
            if p.label == NEG_LABEL and p.confidence > min_confidence]


def save_checkpoint(params: TaggerParams, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(params.to_json(), fh)


def load_checkpoint(path) -> TaggerParams:
    with open(path, encoding="utf-8") as fh:
        return TaggerParams.from_json(json.load(fh))
