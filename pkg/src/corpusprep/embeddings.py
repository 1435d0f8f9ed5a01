"""Per-token embeddings: averaged early-layer vectors.

Token vectors come from three "layers", each a hash-seeded Gaussian
vector, averaged together the same way a contextual encoder's first few
hidden layers would be: layer 1 is the surface form, layer 2 the lemma,
and layer 3 mixes in the neighboring lemmas for a bit of context.  The
construction is fully deterministic (blake2 digest -> numpy seed), needs
no model download, and keeps repeated mentions of a word tightly
clustered -- which is what the downstream instance-selection scores rely
on.

If a local transformers checkpoint is available, ``TransformerEmbedder``
extracts the real thing (mean of the first three hidden layers, subword
vectors averaged per token).
"""

from __future__ import annotations

import hashlib

import numpy as np


def _seed_vector(key: str, dim: int) -> np.ndarray:
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    return rng.normal(size=dim)


class HashEmbedder:
    """Deterministic stand-in encoder; no model files required."""

    name = "hash"

    def __init__(self, dim: int = 64):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self._cache: dict[str, np.ndarray] = {}

    def _vec(self, key: str) -> np.ndarray:
        if key not in self._cache:
            self._cache[key] = _seed_vector(key, self.dim)
        return self._cache[key]

    def encode(self, words: list[str], lemmas: list[str]) -> np.ndarray:
        n = len(words)
        out = np.zeros((n, self.dim))
        for i in range(n):
            layer1 = self._vec("form:" + words[i].lower())
            layer2 = self._vec("lemma:" + lemmas[i])
            left = lemmas[i - 1] if i > 0 else "<s>"
            right = lemmas[i + 1] if i + 1 < n else "</s>"
            layer3 = (0.6 * layer2 + 0.2 * self._vec("lemma:" + left)
                      + 0.2 * self._vec("lemma:" + right))
            out[i] = (layer1 + layer2 + layer3) / 3.0
        return out


class TransformerEmbedder:
    """Mean of the first three hidden layers of a locally cached LM."""

    def __init__(self, model_id: str):
        from transformers import AutoModel, AutoTokenizer  # local cache only
        self.tokenizer = AutoTokenizer.from_pretrained(model_id,
                                                       local_files_only=True)
        self.model = AutoModel.from_pretrained(model_id, local_files_only=True,
                                               output_hidden_states=True)
        self.model.eval()
        self.dim = self.model.config.hidden_size
        self.name = model_id

    def encode(self, words: list[str], lemmas: list[str]) -> np.ndarray:
        import torch

        enc = self.tokenizer(words, is_split_into_words=True,
                             return_tensors="pt", truncation=True)
        with torch.no_grad():
            hidden = self.model(**enc).hidden_states
        # hidden[0] is the embedding layer; layers 1..3 are the first three.
        stack = torch.stack(hidden[1:4]).mean(dim=0)[0]  # (subwords, dim)
        word_ids = enc.word_ids(0)
        out = np.zeros((len(words), self.dim))
        counts = np.zeros(len(words))
        for pos, wid in enumerate(word_ids):
            if wid is None:
                continue
            out[wid] += stack[pos].numpy()
            counts[wid] += 1
        missing = counts == 0
        if missing.any():
            raise ValueError(
                "tokenizer alignment failed for words "
                f"{[words[i] for i in np.where(missing)[0]]}")
        return out / counts[:, None]


def make_embedder(lm: str, dim: int = 64):
    if lm == "hash":
        return HashEmbedder(dim=dim)
    return TransformerEmbedder(lm)
