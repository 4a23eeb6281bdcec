"""Spectral clustering of top-ranked candidates.

The normalized variant builds D^{-1/2} A D^{-1/2} from a clamped-cosine
affinity matrix, embeds each candidate as its row in the matrix of the k
leading eigenvectors (row-normalized), and runs k-means on the rows. An
unnormalized-Laplacian variant (L = D - A, smallest eigenvectors, no row
normalization) is available behind the `normalized` flag.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embed import ComposedVector
from .errors import InputFormatError
from .rank import RankedCandidate

logger = logging.getLogger(__name__)

EIG_RESIDUAL_TOL = 1e-8
KMEANS_MAX_ITER = 300
KMEANS_REL_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class AffinityMatrix:
    """Symmetric nonnegative similarity matrix with zero diagonal."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def validate(self) -> None:
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("affinity matrix must be square")
        if not np.array_equal(m, m.T):
            raise ValueError("affinity matrix must be symmetric")
        if np.any(np.diagonal(m) != 0.0):
            raise ValueError("affinity diagonal must be zero")
        if np.any(m < 0.0) or np.any(m > 1.0):
            raise ValueError("affinity entries must lie in [0, 1]")


@dataclass(frozen=True)
class ClusterAssignment:
    """k clusters over n candidates; ids are canonical by first appearance."""

    k: int
    labels: tuple[int, ...]

    def validate(self) -> None:
        if any(not 0 <= lab < self.k for lab in self.labels):
            raise ValueError("cluster ids must lie in [0, k)")


def build_affinity(vectors: Sequence[ComposedVector]) -> AffinityMatrix:
    """Pairwise clamped cosine similarity: max(0, cos(v_i, v_j)), zero diagonal.

    Negative cosines are clamped to 0 so the matrix satisfies the
    nonnegativity spectral clustering assumes.
    """
    if len(vectors) < 2:
        raise ValueError("affinity needs at least 2 vectors")
    if any(v.is_null for v in vectors):
        raise ValueError("null vectors cannot be clustered; filter them first")
    dims = {v.dim for v in vectors}
    if len(dims) != 1:
        raise ValueError(f"mixed vector dimensions {sorted(dims)}")
    stacked = np.stack([v.values for v in vectors])
    norms = np.linalg.norm(stacked, axis=1)
    unit = stacked / norms[:, None]
    sims = unit @ unit.T
    # Mirror the upper triangle so the matrix is exactly symmetric, then
    # clamp float drift and negatives into [0, 1]. Diagonal stays zero.
    upper = np.triu(sims, 1)
    entries = np.clip(upper + upper.T, 0.0, 1.0)
    return AffinityMatrix(entries=entries)


def eig_topk(matrix: np.ndarray, k: int) -> list[tuple[float, np.ndarray]]:
    """k eigenpairs of a symmetric matrix with the largest eigenvalues.

    Eigenvalues descend; eigenvectors are unit-norm with a deterministic
    sign (largest-magnitude component positive, first index on ties).
    Each pair is checked against the residual bound
    ||Mv - lv|| <= 1e-8 * max(1, ||M||_F).
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    if not np.allclose(m, m.T, rtol=1e-10, atol=1e-12):
        raise ValueError("matrix must be symmetric")
    n = m.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    values, vectors = np.linalg.eigh(m)
    order = np.argsort(-values, kind="stable")[:k]
    bound = EIG_RESIDUAL_TOL * max(1.0, float(np.linalg.norm(m)))
    pairs = []
    for idx in order:
        value = float(values[idx])
        vector = vectors[:, idx].copy()
        if vector[int(np.argmax(np.abs(vector)))] < 0.0:
            vector = -vector
        residual = float(np.linalg.norm(m @ vector - value * vector))
        if residual > bound:
            raise ArithmeticError(
                f"eigenpair residual {residual:.3e} exceeds bound {bound:.3e}"
            )
        pairs.append((value, vector))
    return pairs


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int,
    max_iter: int = KMEANS_MAX_ITER,
    tol: float = KMEANS_REL_TOL,
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Lloyd iterations from k-means++ seeding.

    Stops when the relative inertia improvement drops to tol or after
    max_iter assignment rounds. Returns (labels, centers, inertia history);
    the history is non-increasing. A cluster emptied during an update is
    re-seeded at the point contributing most to inertia, so descent holds
    on the next assignment too.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centers = np.empty((k, pts.shape[1]), dtype=np.float64)
    centers[0] = pts[int(rng.integers(n))]
    nearest_sq = ((pts - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = float(nearest_sq.sum())
        if total <= 0.0:
            # All points coincide with a chosen center; any pick works.
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=nearest_sq / total))
        centers[c] = pts[idx]
        nearest_sq = np.minimum(nearest_sq, ((pts - centers[c]) ** 2).sum(axis=1))

    history: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    prev = np.inf
    for _ in range(max_iter):
        dists = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(dists, axis=1)
        inertia = float(dists[np.arange(n), labels].sum())
        history.append(inertia)
        if np.isfinite(prev) and prev - inertia <= tol * max(prev, 1e-12):
            break
        prev = inertia
        contributions = dists[np.arange(n), labels]
        taken: set[int] = set()
        for c in range(k):
            members = pts[labels == c]
            if len(members):
                centers[c] = members.mean(axis=0)
                continue
            # Revive an empty cluster at the worst-fit point not already
            # claimed by another empty cluster this round.
            order = np.argsort(-contributions, kind="stable")
            far = next(int(i) for i in order if int(i) not in taken)
            taken.add(far)
            centers[c] = pts[far]
    return labels, centers, history


def _canonical(raw_keys: Sequence[object]) -> tuple[int, ...]:
    mapping: dict[object, int] = {}
    labels = []
    for key in raw_keys:
        if key not in mapping:
            mapping[key] = len(mapping)
        labels.append(mapping[key])
    return tuple(labels)


def spectral_cluster(
    affinity: AffinityMatrix,
    k: int,
    seed: int,
    normalized: bool = True,
) -> ClusterAssignment:
    """Cluster the affinity graph into k groups.

    Zero-degree rows (similar to nothing) become singleton clusters first
    and the remaining rows are decomposed into the leftover cluster budget,
    so the output always has exactly k cluster ids. Labels are canonical by
    first appearance, making the result deterministic for (A, k, seed).
    """
    affinity.validate()
    n = affinity.n
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} candidates")
    if k == n:
        return ClusterAssignment(k=k, labels=tuple(range(n)))

    degrees = affinity.entries.sum(axis=1)
    isolated = np.flatnonzero(degrees == 0.0)
    connected = np.flatnonzero(degrees > 0.0)
    k_rem = k - len(isolated)
    if len(isolated):
        logger.info("%d zero-degree candidates become singleton clusters", len(isolated))
    if k_rem < 1:
        raise ValueError(
            f"{len(isolated)} isolated candidates already exceed k={k}; raise k"
        )

    if k_rem == len(connected):
        sub_labels = np.arange(len(connected), dtype=np.int64)
    elif k_rem == 1:
        sub_labels = np.zeros(len(connected), dtype=np.int64)
    else:
        sub = affinity.entries[np.ix_(connected, connected)]
        deg = sub.sum(axis=1)
        if normalized:
            inv_sqrt = 1.0 / np.sqrt(deg)
            scaled = inv_sqrt[:, None] * sub * inv_sqrt[None, :]
            upper = np.triu(scaled, 1)
            pairs = eig_topk(upper + upper.T, k_rem)
            embedding = np.stack([vec for _, vec in pairs], axis=1)
            row_norms = np.linalg.norm(embedding, axis=1)
            nonzero = row_norms > 0.0
            embedding[nonzero] = embedding[nonzero] / row_norms[nonzero, None]
        else:
            laplacian = np.diag(deg) - sub
            # Smallest eigenvalues of L are the largest of -L.
            pairs = eig_topk(-laplacian, k_rem)
            embedding = np.stack([vec for _, vec in pairs], axis=1)
        sub_labels, _, _ = kmeans(embedding, k_rem, seed)

    raw_keys: list[object] = [None] * n
    for i in isolated:
        raw_keys[i] = ("singleton", int(i))
    for pos, i in enumerate(connected):
        raw_keys[i] = ("grouped", int(sub_labels[pos]))
    assignment = ClusterAssignment(k=k, labels=_canonical(raw_keys))
    assignment.validate()
    return assignment


def summarize_clusters(
    assignment: ClusterAssignment,
    ranked: Sequence[RankedCandidate],
    vectors: Sequence[ComposedVector],
) -> list[dict]:
    """Group ranked candidates by cluster id and pick each cluster's medoid.

    The medoid is the member whose composed vector is closest to the
    cluster centroid (first by rank on ties). Members are listed in rank
    order.
    """
    if not len(ranked) == len(vectors) == len(assignment.labels):
        raise ValueError("ranked candidates, vectors, and labels must align")
    by_cluster: dict[int, list[int]] = {}
    for idx, label in enumerate(assignment.labels):
        by_cluster.setdefault(label, []).append(idx)
    summaries = []
    for cluster_id in sorted(by_cluster):
        indices = sorted(by_cluster[cluster_id], key=lambda i: ranked[i].rank)
        centroid = np.mean([vectors[i].values for i in indices], axis=0)
        medoid_idx = indices[0]
        best = np.inf
        for i in indices:
            dist = float(np.linalg.norm(vectors[i].values - centroid))
            if dist < best:
                best = dist
                medoid_idx = i
        summaries.append({
            "cluster_id": cluster_id,
            "members": [_member_dict(ranked[i]) for i in indices],
            "medoid": _member_dict(ranked[medoid_idx]),
        })
    return summaries


def _member_dict(rc: RankedCandidate) -> dict:
    return {
        "kind": rc.candidate.kind.value,
        "first": rc.candidate.first,
        "second": rc.candidate.second,
        "score": rc.score,
    }


def write_clusters(summaries: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summaries, fh, indent=2)
        fh.write("\n")


def read_clusters(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise InputFormatError(f"{path}: expected a JSON array of clusters")
    for entry in data:
        if not isinstance(entry, dict) or not {"cluster_id", "members", "medoid"} <= set(entry):
            raise InputFormatError(f"{path}: malformed cluster entry {entry!r}")
    return data
