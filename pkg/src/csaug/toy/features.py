"""Hashed character n-gram features for tokens and utterances.

Tokens are wrapped in boundary markers and decomposed into character
n-grams; each n-gram is hashed with 64-bit FNV-1a into one of ``dim``
buckets.  Token vectors are L2-normalized counts, so a token's vector is
independent of its neighbors and of the corpus.  The utterance vector is
the mean of its token vectors; per-token feature rows concatenate the
previous, current, and next token vectors (zeros at the edges).
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & _MASK64
    return h


class FeatureExtractor:
    """Stateless token/utterance featurizer with an internal token cache."""

    def __init__(self, dim: int = 4096, ngram: int = 3) -> None:
        if dim < 1 or ngram < 1:
            raise ValueError("dim and ngram must be positive")
        self.dim = dim
        self.ngram = ngram
        self._cache: dict[str, tuple[np.ndarray, np.ndarray]] = {}

    def token_vector(self, token: str) -> tuple[np.ndarray, np.ndarray]:
        """Sparse L2-normalized vector as (bucket indices, values), indices sorted."""
        cached = self._cache.get(token)
        if cached is not None:
            return cached
        padded = "^" + token + "$"
        n = self.ngram
        if len(padded) < n:
            grams = [padded]
        else:
            grams = [padded[i : i + n] for i in range(len(padded) - n + 1)]
        counts: dict[int, int] = {}
        for gram in grams:
            bucket = fnv1a64(gram.encode("utf-8")) % self.dim
            counts[bucket] = counts.get(bucket, 0) + 1
        indices = np.fromiter(sorted(counts), dtype=np.int64, count=len(counts))
        values = np.array([counts[i] for i in indices], dtype=np.float64)
        values /= np.linalg.norm(values)
        self._cache[token] = (indices, values)
        return indices, values

    def utterance_vector(self, tokens: list[str] | tuple[str, ...]) -> np.ndarray:
        """Dense mean of token vectors, shape (dim,)."""
        pooled = np.zeros(self.dim, dtype=np.float64)
        for token in tokens:
            idx, val = self.token_vector(token)
            pooled[idx] += val
        pooled /= len(tokens)
        return pooled

    def token_matrix(self, tokens: list[str] | tuple[str, ...]) -> sparse.csr_matrix:
        """CSR matrix of shape (len(tokens), 3*dim): [prev | current | next]."""
        m = len(tokens)
        vecs = [self.token_vector(t) for t in tokens]
        data: list[np.ndarray] = []
        cols: list[np.ndarray] = []
        indptr = np.zeros(m + 1, dtype=np.int64)
        for i in range(m):
            row_cols = []
            row_data = []
            if i > 0:
                idx, val = vecs[i - 1]
                row_cols.append(idx)
                row_data.append(val)
            idx, val = vecs[i]
            row_cols.append(idx + self.dim)
            row_data.append(val)
            if i < m - 1:
                idx, val = vecs[i + 1]
                row_cols.append(idx + 2 * self.dim)
                row_data.append(val)
            cols.append(np.concatenate(row_cols))
            data.append(np.concatenate(row_data))
            indptr[i + 1] = indptr[i] + sum(len(c) for c in row_cols)
        return sparse.csr_matrix(
            (np.concatenate(data), np.concatenate(cols), indptr),
            shape=(m, 3 * self.dim),
        )
