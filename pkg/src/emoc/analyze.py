"""Downstream analyses over embedded populations.

Clustering standardizes dimensions first (the blocks mix binary bits
with unbounded exponents); nearest-neighbor queries use the raw distance
metric so results line up with pairwise `emoc dist` output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .embedding import DistanceWeights, distance
from .errors import ConfigMismatchError

__all__ = [
    "ClusterResult",
    "DiversityReport",
    "kmeans_cluster",
    "match_accuracy",
    "cluster_purity",
    "nearest_neighbors",
    "diversity_report",
]


@dataclass(frozen=True)
class ClusterResult:
    assignments: dict   # program id -> cluster index
    centroids: tuple    # k tuples in standardized space
    inertia: float
    restarts: int
    seed: int
    accuracy: float = None
    purity: float = None


@dataclass(frozen=True)
class DiversityReport:
    population: int
    distinct_o_patterns: int
    m_variance: tuple
    c_variance: tuple
    e_failures: int
    mean_pairwise_distance: float


def _check_shared_config(vectors):
    if not vectors:
        raise ValueError("empty population")
    fp = vectors[0].config_fingerprint
    for v in vectors[1:]:
        if v.config_fingerprint != fp:
            raise ConfigMismatchError(
                "population mixes config fingerprints "
                f"({fp} vs {v.config_fingerprint})"
            )


def _matrix(vectors) -> np.ndarray:
    return np.array([v.values() for v in vectors], dtype=float)


def _standardize(x: np.ndarray) -> np.ndarray:
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    keep = std > 0
    if not keep.any():
        return np.zeros((x.shape[0], 1))
    return (x[:, keep] - mean[keep]) / std[keep]


def kmeans_cluster(vectors, k: int, seed: int = 0, restarts: int = 32,
                   max_iters: int = 100, labels: dict = None) -> ClusterResult:
    """Seeded Lloyd's algorithm, best inertia over restarts.

    Initialization picks k distinct points when the population has that
    many; ties in inertia keep the earliest restart, so the result is a
    pure function of (vectors, k, seed, restarts).
    """
    _check_shared_config(vectors)
    n = len(vectors)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    x = _standardize(_matrix(vectors))

    best = None
    for restart in range(restarts):
        rng = np.random.default_rng((seed, restart))
        centroids = _init_centroids(x, k, rng)
        assign = None
        for _ in range(max_iters):
            dist2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
            new_assign = dist2.argmin(axis=1)
            _fill_empty_clusters(x, centroids, new_assign, dist2, k)
            if assign is not None and (new_assign == assign).all():
                break
            assign = new_assign
            for c in range(k):
                members = x[assign == c]
                if len(members):
                    centroids[c] = members.mean(axis=0)
        dist2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        inertia = float(dist2[np.arange(n), assign].sum())
        if best is None or inertia < best[0] - 1e-12:
            best = (inertia, assign.copy(), centroids.copy())

    inertia, assign, centroids = best
    assignments = {v.program_id: int(c) for v, c in zip(vectors, assign)}
    result = ClusterResult(
        assignments=assignments,
        centroids=tuple(tuple(float(x) for x in row) for row in centroids),
        inertia=inertia, restarts=restarts, seed=seed,
    )
    if labels is not None:
        result = ClusterResult(
            **{**result.__dict__,
               "accuracy": match_accuracy(result, labels),
               "purity": cluster_purity(result, labels)},
        )
    return result


def _init_centroids(x, k, rng):
    uniq = np.unique(x, axis=0)
    if len(uniq) >= k:
        idx = rng.permutation(len(uniq))[:k]
        return uniq[idx].astype(float).copy()
    idx = rng.permutation(len(x))[:k]
    return x[idx].astype(float).copy()


def _fill_empty_clusters(x, centroids, assign, dist2, k):
    """Move the farthest point into each empty cluster (deterministic)."""
    for c in range(k):
        if (assign == c).any():
            continue
        own = dist2[np.arange(len(x)), assign]
        donor = int(own.argmax())
        assign[donor] = c
        centroids[c] = x[donor]


def match_accuracy(result: ClusterResult, labels: dict) -> float:
    """Fraction matched under the optimal one-to-one cluster-label map."""
    ids = list(result.assignments)
    missing = [i for i in ids if i not in labels]
    if missing:
        raise ValueError(f"missing labels for {missing}")
    label_names = sorted({labels[i] for i in ids})
    clusters = sorted(set(result.assignments.values()))
    table = np.zeros((len(clusters), len(label_names)), dtype=int)
    for i in ids:
        table[clusters.index(result.assignments[i]),
              label_names.index(labels[i])] += 1
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum()) / len(ids)


def cluster_purity(result: ClusterResult, labels: dict) -> float:
    """Majority-vote purity; looser than matched accuracy."""
    groups: dict = {}
    for pid, c in result.assignments.items():
        groups.setdefault(c, []).append(labels[pid])
    correct = sum(max(members.count(name) for name in set(members))
                  for members in groups.values())
    return correct / len(result.assignments)


def nearest_neighbors(query: str, vectors, j: int = 5,
                      weights: DistanceWeights = None):
    """Ranked (id, distance) neighbors of a program, self excluded."""
    if j < 1:
        raise ValueError("j must be >= 1")
    by_id = {v.program_id: v for v in vectors}
    if query not in by_id:
        raise KeyError(f"unknown id {query!r}")
    q = by_id[query]
    ranked = sorted(
        ((v.program_id, distance(q, v, weights)) for v in vectors
         if v.program_id != query),
        key=lambda pair: (pair[1], pair[0]),
    )
    return ranked[:j]


def diversity_report(vectors) -> DiversityReport:
    _check_shared_config(vectors)
    x = _matrix(vectors)
    n_m = len(vectors[0].m)
    n_o = len(vectors[0].o)
    m_block = x[:, 1:1 + n_m]
    c_block = x[:, 1 + n_m + n_o:]
    pairwise = [
        distance(vectors[i], vectors[j])
        for i in range(len(vectors)) for j in range(i + 1, len(vectors))
    ]
    return DiversityReport(
        population=len(vectors),
        distinct_o_patterns=len({v.o for v in vectors}),
        m_variance=tuple(float(s) for s in m_block.var(axis=0)),
        c_variance=tuple(float(s) for s in c_block.var(axis=0)),
        e_failures=sum(v.e for v in vectors),
        mean_pairwise_distance=(sum(pairwise) / len(pairwise)
                                if pairwise else 0.0),
    )
