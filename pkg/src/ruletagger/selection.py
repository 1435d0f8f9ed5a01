"""Instance scoring against high-precision sets and dynamic label selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .candidates import SpanCandidate, SpanKey
from .corpus import Sentence


class DegenerateEmbeddingError(ValueError):
    """A zero-norm embedding cannot be cosine-scored."""


class SmallSetError(ValueError):
    """The high-precision set is too small for holdout threshold estimation."""


@dataclass
class SelectionParams:
    tau: float = 0.8            # threshold temperature
    n_samples: int = 50         # prototype samples for the global score
    sample_size: int = 3        # members per sampled prototype
    holdout_cap: int = 50       # max leave-one-out repeats


@dataclass
class HighPrecisionSet:
    """Per-category pool of accepted (span key, embedding, iteration) entries."""

    categories: dict[str, list[tuple[SpanKey, np.ndarray, int]]] = field(default_factory=dict)
    _keys: set[SpanKey] = field(default_factory=set)

    def __contains__(self, key: SpanKey) -> bool:
        return key in self._keys

    def size(self, label: str) -> int:
        return len(self.categories.get(label, ()))

    def sizes(self) -> dict[str, int]:
        return {lab: len(members) for lab, members in self.categories.items()}

    def add(self, label: str, key: SpanKey, emb: np.ndarray, iteration: int) -> bool:
        if key in self._keys:
            return False
        self.categories.setdefault(label, []).append((key, emb, iteration))
        self._keys.add(key)
        return True

    def embeddings(self, label: str) -> np.ndarray:
        members = self.categories.get(label, [])
        if not members:
            return np.zeros((0, 0))
        return np.stack([emb for _, emb, _ in members])

    def members(self, label: str) -> list[tuple[SpanKey, np.ndarray, int]]:
        return list(self.categories.get(label, ()))


def instance_embedding(candidate: SpanCandidate, sentence: Sentence) -> np.ndarray:
    """Mean of the token embeddings over the candidate's canonical range."""
    vecs = [sentence.tokens[i].emb
            for i in range(candidate.canonical_start, candidate.canonical_end)]
    return np.mean(vecs, axis=0)


def _unit(vecs: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vecs, axis=-1, keepdims=True)
    if np.any(norms == 0):
        raise DegenerateEmbeddingError("degenerate embedding (zero norm)")
    return vecs / norms


def local_score(query: np.ndarray, members: np.ndarray) -> float:
    """Max cosine similarity between the query and any set member."""
    if members.shape[0] == 0:
        raise SmallSetError("empty high-precision set")
    q = _unit(query)
    return float(np.max(_unit(members) @ q))


def global_score(
    query: np.ndarray, members: np.ndarray, n_samples: int, sample_size: int,
    rng: np.random.Generator,
) -> float:
    """Mean cosine between the query and sampled-subset prototype embeddings."""
    m = members.shape[0]
    if m == 0:
        raise SmallSetError("empty high-precision set")
    if n_samples < 1 or sample_size < 1:
        raise ValueError("n_samples and sample_size must be >= 1")
    q = _unit(query)
    size = min(sample_size, m)
    replace = m < sample_size
    total = 0.0
    for _ in range(n_samples):
        idx = rng.choice(m, size=size, replace=replace)
        proto = members[idx].mean(axis=0)
        total += float(_unit(proto) @ q)
    return total / n_samples


def confidence_score(
    query: np.ndarray, members: np.ndarray, params: SelectionParams,
    rng: np.random.Generator,
) -> float:
    """Geometric mean of local and global scores, clamped to [0, 1]."""
    loc = min(max(local_score(query, members), 0.0), 1.0)
    glb = min(max(global_score(query, members, params.n_samples,
                               params.sample_size, rng), 0.0), 1.0)
    return float(np.sqrt(loc * glb))


def dynamic_threshold(
    members: np.ndarray, params: SelectionParams, rng: np.random.Generator,
) -> float:
    """tau times the minimum leave-one-out confidence over sampled holdouts."""
    m = members.shape[0]
    if m < 2:
        raise SmallSetError("set too small for holdout")
    n_holdouts = min(m, params.holdout_cap)
    holdout_idx = rng.choice(m, size=n_holdouts, replace=False)
    lowest = np.inf
    for k in holdout_idx:
        rest = np.delete(members, k, axis=0)
        conf = confidence_score(members[k], rest, params, rng)
        lowest = min(lowest, conf)
    return params.tau * lowest


def select_labels(
    weak_labels: list[tuple[SpanKey, str, np.ndarray]],
    hset: HighPrecisionSet,
    params: SelectionParams,
    rng: np.random.Generator,
    iteration: int,
    bootstrap_init: bool = False,
) -> list[tuple[SpanKey, str]]:
    """Admit weak labels above their category's dynamic threshold into the set.

    With ``bootstrap_init`` (seed matches in the first iteration) every label
    enters unconditionally.  Categories with fewer than 2 members accept
    nothing this round.  Returns the accepted (key, label) pairs.
    """
    accepted = []
    if bootstrap_init:
        for key, label, emb in sorted(weak_labels, key=lambda x: (x[1], x[0])):
            if hset.add(label, key, emb, iteration):
                accepted.append((key, label))
        return accepted
    thresholds: dict[str, float | None] = {}
    snapshot = {lab: hset.embeddings(lab) for lab in hset.categories}
    for label in sorted(snapshot):
        try:
            thresholds[label] = dynamic_threshold(snapshot[label], params, rng)
        except SmallSetError:
            thresholds[label] = None
    for key, label, emb in sorted(weak_labels, key=lambda x: (x[1], x[0])):
        if key in hset:
            continue
        threshold = thresholds.get(label)
        if threshold is None or label not in snapshot:
            continue
        conf = confidence_score(emb, snapshot[label], params, rng)
        if conf > threshold:
            hset.add(label, key, emb, iteration)
            accepted.append((key, label))
    return accepted
