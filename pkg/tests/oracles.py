"""Independent reference implementations used only by tests.

These deliberately avoid the package's own numerics: the eigensolver is a
dense cyclic Jacobi, the ranking oracle composes and compares vectors with
plain Python floats, and the ARI comes straight from the contingency-table
formula. Slow is fine; independent is the point.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np


def jacobi_eigh(matrix, tol: float = 1e-12, max_sweeps: int = 100):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi
    rotations. Returns (values, vectors) with values descending and
    vectors as columns."""
    a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = math.sqrt(sum(a[p, q] ** 2 for p in range(n) for q in range(n) if p != q))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) <= tol / (n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    else:
        raise ArithmeticError("jacobi oracle did not converge")
    order = np.argsort(-np.diag(a), kind="stable")
    return np.diag(a)[order], v[:, order]


def _py_cosine(u: list[float], v: list[float]) -> float:
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    return dot / (nu * nv)


def brute_force_rank(candidates, word_vectors: dict[str, list[float]], terms):
    """Reference ranking: plain-Python composition and max-cosine scan.

    `candidates` are (kind, first, second, frequency) tuples; `terms` are
    (name, words) pairs. Returns the sorted list of
    (kind, first, second, frequency, score, best_term) with the same
    ordering contract as the implementation: score desc, frequency desc,
    (first, second, kind) ascending; candidates with no known words score
    -1 with no best term.
    """
    dim = len(next(iter(word_vectors.values())))
    term_vecs = []
    for name, words in terms:
        total = [0.0] * dim
        known = 0
        for word in words:
            vec = word_vectors.get(word)
            if vec is None:
                continue
            known += 1
            for i in range(dim):
                total[i] += vec[i]
        if known and any(x != 0.0 for x in total):
            term_vecs.append((name, total))
    scored = []
    for kind, first, second, freq in candidates:
        total = [0.0] * dim
        known = 0
        for word in (first, second):
            vec = word_vectors.get(word)
            if vec is None:
                continue
            known += 1
            for i in range(dim):
                total[i] += vec[i]
        if known == 0 or all(x == 0.0 for x in total):
            scored.append((kind, first, second, freq, -1.0, None))
            continue
        best_score = -math.inf
        best_term = None
        for name, tvec in term_vecs:
            sim = _py_cosine(total, tvec)
            if sim > best_score:
                best_score = sim
                best_term = name
        scored.append((kind, first, second, freq, best_score, best_term))
    scored.sort(key=lambda row: (-row[4], -row[3], row[1], row[2], row[0]))
    return scored


def adjusted_rand_index(labels_a, labels_b) -> float:
    """ARI from the contingency table; 1.0 iff the partitions agree."""
    if len(labels_a) != len(labels_b):
        raise ValueError("label lists must align")
    n = len(labels_a)
    contingency: Counter = Counter(zip(labels_a, labels_b))
    sum_cells = sum(math.comb(c, 2) for c in contingency.values())
    sum_rows = sum(math.comb(c, 2) for c in Counter(labels_a).values())
    sum_cols = sum(math.comb(c, 2) for c in Counter(labels_b).values())
    total = math.comb(n, 2)
    expected = sum_rows * sum_cols / total if total else 0.0
    max_index = (sum_rows + sum_cols) / 2.0
    if max_index == expected:
        return 1.0
    return (sum_cells - expected) / (max_index - expected)


def brute_force_confusion(tweets, candidates, k):
    """Reference top-k confusion counts via a full double loop.

    `tweets` are (tokens, is_informative) pairs; `candidates` are
    (kind, first, second) in rank order. Matching mirrors the default
    modes: token containment for nv, ordered adjacency for phrases.
    """
    top = candidates[:k]
    tp = fp = fn = tn = 0
    for tokens, informative in tweets:
        token_set = set(tokens)
        bigrams = set(zip(tokens, tokens[1:]))
        matched = False
        for kind, first, second in top:
            if kind == "nv":
                if first in token_set and second in token_set:
                    matched = True
                    break
            else:
                if (first, second) in bigrams:
                    matched = True
                    break
        if informative:
            tp += matched
            fn += not matched
        else:
            fp += matched
            tn += not matched
    return tp, fp, fn, tn
