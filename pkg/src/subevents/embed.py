"""Word vectors and composition of multiword expressions.

Vectors load from word2vec text format (header line `<vocab> <dim>`, then
one `<word> <f1> ... <f_dim>` row per word). A multiword expression is
composed by summing its word vectors and L2-normalizing the sum, so cosine
similarity downstream is scale-free. Out-of-vocabulary words are either
skipped or synthesized from hashed character n-grams, mimicking
subword-based embedding models.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from ._util import fnv1a_32
from .errors import InputFormatError

logger = logging.getLogger(__name__)

SUBWORD_MIN_GRAM = 3
SUBWORD_MAX_GRAM = 6
DEFAULT_BUCKETS = 1 << 16


class OovPolicy(Enum):
    SKIP_WORD = "skip"
    SUBWORD_HASH = "subword"


@dataclass
class EmbeddingStore:
    """Immutable-after-load store of word vectors plus the OOV policy.

    Under SUBWORD_HASH, an OOV word gets the average of per-n-gram vectors
    drawn from a fixed-size bucket table generated deterministically from
    (hash_seed, bucket); bucket vectors are materialized lazily but are a
    pure function of the seed.
    """

    dim: int
    vectors: dict[str, np.ndarray]
    oov_policy: OovPolicy = OovPolicy.SKIP_WORD
    hash_seed: int = 0
    n_buckets: int = DEFAULT_BUCKETS
    _bucket_cache: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def _bucket_vector(self, bucket: int) -> np.ndarray:
        vec = self._bucket_cache.get(bucket)
        if vec is None:
            rng = np.random.default_rng([self.hash_seed, bucket])
            vec = rng.uniform(-1.0 / self.dim, 1.0 / self.dim, self.dim)
            self._bucket_cache[bucket] = vec
        return vec

    def subword_vector(self, word: str) -> np.ndarray | None:
        """Average of hashed 3-6 character-gram vectors of '<word>'."""
        if not word:
            return None
        marked = f"<{word}>"
        grams = [
            marked[i : i + n]
            for n in range(SUBWORD_MIN_GRAM, SUBWORD_MAX_GRAM + 1)
            for i in range(len(marked) - n + 1)
        ]
        if not grams:
            grams = [marked]
        total = np.zeros(self.dim)
        for gram in grams:
            total += self._bucket_vector(fnv1a_32(gram.encode("utf-8")) % self.n_buckets)
        return total / len(grams)


@dataclass(frozen=True)
class ComposedVector:
    """Unit vector for a multiword expression; null when nothing composed."""

    values: np.ndarray
    n_known: int
    is_null: bool

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def load_vectors(
    path: str | Path,
    oov_policy: OovPolicy = OovPolicy.SKIP_WORD,
    hash_seed: int = 0,
) -> EmbeddingStore:
    """Load word2vec-text-format vectors.

    Rows whose arity disagrees with the declared dimension, or containing
    non-finite components, are rejected with a warning; a duplicate word
    keeps the first row. A malformed header is fatal.
    """
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        try:
            declared, dim = int(header[0]), int(header[1])
        except (IndexError, ValueError) as exc:
            raise InputFormatError(
                f"{path}: expected '<vocab_size> <dim>' header, got {header!r}"
            ) from exc
        if len(header) != 2 or declared < 0 or dim < 1:
            raise InputFormatError(f"{path}: invalid header {header!r}")
        vectors: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            word, raw_values = parts[0], parts[1:]
            if len(raw_values) != dim:
                logger.warning(
                    "%s:%d: rejecting row for %r (%d values, expected %d)",
                    path, lineno, word, len(raw_values), dim,
                )
                continue
            try:
                values = np.array([float(v) for v in raw_values])
            except ValueError:
                logger.warning("%s:%d: rejecting row for %r (non-numeric)", path, lineno, word)
                continue
            if not np.all(np.isfinite(values)):
                logger.warning("%s:%d: rejecting row for %r (non-finite)", path, lineno, word)
                continue
            if word in vectors:
                logger.warning("%s:%d: duplicate word %r, keeping first", path, lineno, word)
                continue
            vectors[word] = values
    if declared != len(vectors):
        logger.info("%s: header declared %d words, loaded %d", path, declared, len(vectors))
    return EmbeddingStore(dim=dim, vectors=vectors, oov_policy=oov_policy, hash_seed=hash_seed)


def compose(
    words: Sequence[str],
    store: EmbeddingStore,
    normalize_words: bool = False,
) -> ComposedVector:
    """Sum the words' vectors and L2-normalize the sum.

    OOV words follow the store's policy. With `normalize_words`, each word
    vector is normalized before summation instead of only normalizing the
    sum. Returns a null vector when no word contributes or the sum is zero.
    """
    if not words:
        raise ValueError("compose requires at least one word")
    total = np.zeros(store.dim)
    n_known = 0
    for word in words:
        vec = store.vectors.get(word)
        if vec is not None:
            n_known += 1
        elif store.oov_policy is OovPolicy.SUBWORD_HASH:
            vec = store.subword_vector(word)
        if vec is None:
            continue
        if normalize_words:
            norm = float(np.linalg.norm(vec))
            if norm == 0.0:
                continue
            vec = vec / norm
        total = total + vec
    norm = float(np.linalg.norm(total))
    if norm == 0.0:
        return ComposedVector(values=np.zeros(store.dim), n_known=n_known, is_null=True)
    return ComposedVector(values=total / norm, n_known=n_known, is_null=False)


def cosine(u: ComposedVector, v: ComposedVector) -> float:
    """Cosine similarity of two composed (unit) vectors."""
    if u.is_null or v.is_null:
        raise ValueError("cosine of a null vector is undefined; apply a null policy first")
    if u.dim != v.dim:
        raise ValueError(f"dimension mismatch: {u.dim} != {v.dim}")
    return float(np.dot(u.values, v.values))
