import pytest

from emoc.analyze import (cluster_purity, diversity_report, kmeans_cluster,
                          match_accuracy, nearest_neighbors)
from emoc.embedding import EmocVector
from emoc.errors import ConfigMismatchError


def vec(pid, label, e=0, m=(0.0, 0.0), o=(0,) * 21, c=(0.0, 0.0)):
    return EmocVector(program_id=pid, problem="p", e=e, m=tuple(m),
                      o=tuple(o), c=tuple(c), suite_fingerprint="s",
                      config_fingerprint="f", label=label)


def two_blobs():
    """Two well-separated groups of three vectors each."""
    quad = [vec(f"q{i}", "quad", c=(2.0 + i * 0.01, 2.0)) for i in range(3)]
    lin = [vec(f"l{i}", "lin", c=(1.0 + i * 0.01, 1.0),
               o=(1,) + (0,) * 20) for i in range(3)]
    return quad + lin


def test_kmeans_separates_blobs():
    vectors = two_blobs()
    labels = {v.program_id: v.label for v in vectors}
    result = kmeans_cluster(vectors, k=2, seed=0, labels=labels)
    assert result.accuracy == 1.0
    assert result.purity == 1.0
    groups = {result.assignments[v.program_id] for v in vectors[:3]}
    assert len(groups) == 1


def test_kmeans_deterministic():
    vectors = two_blobs()
    a = kmeans_cluster(vectors, k=2, seed=3)
    b = kmeans_cluster(vectors, k=2, seed=3)
    assert a == b


def test_kmeans_k_bounds():
    vectors = two_blobs()
    with pytest.raises(ValueError):
        kmeans_cluster(vectors, k=0)
    with pytest.raises(ValueError):
        kmeans_cluster(vectors, k=7)
    assert kmeans_cluster(vectors, k=6, seed=0).inertia == pytest.approx(0.0)


def test_kmeans_rejects_mixed_configs():
    bad = EmocVector(program_id="z", problem="p", e=0, m=(0.0, 0.0),
                     o=(0,) * 21, c=(0.0, 0.0), suite_fingerprint="s",
                     config_fingerprint="other", label="x")
    with pytest.raises(ConfigMismatchError):
        kmeans_cluster(two_blobs() + [bad], k=2)


def test_match_accuracy_is_optimal_assignment():
    vectors = two_blobs()
    result = kmeans_cluster(vectors, k=2, seed=0)
    # flipping the label names cannot change the optimal-matching score
    labels = {v.program_id: v.label for v in vectors}
    flipped = {pid: ("lin" if lab == "quad" else "quad")
               for pid, lab in labels.items()}
    assert match_accuracy(result, labels) == match_accuracy(result, flipped)


def test_match_accuracy_requires_all_labels():
    result = kmeans_cluster(two_blobs(), k=2, seed=0)
    with pytest.raises(ValueError):
        match_accuracy(result, {"q0": "quad"})


def test_purity_upper_bounds_accuracy():
    vectors = two_blobs()
    labels = {v.program_id: v.label for v in vectors}
    result = kmeans_cluster(vectors, k=2, seed=0)
    assert cluster_purity(result, labels) >= match_accuracy(result, labels)


def test_nearest_neighbors_ranked_and_self_excluded():
    vectors = two_blobs()
    ranked = nearest_neighbors("q0", vectors, j=5)
    ids = [pid for pid, _ in ranked]
    assert "q0" not in ids
    assert set(ids[:2]) == {"q1", "q2"}
    dists = [d for _, d in ranked]
    assert dists == sorted(dists)


def test_nearest_neighbors_tie_break_by_id():
    vectors = [vec("a", "x"), vec("b", "x"), vec("c", "x")]
    ranked = nearest_neighbors("c", vectors, j=2)
    assert ranked == [("a", 0.0), ("b", 0.0)]


def test_nearest_neighbors_unknown_query():
    with pytest.raises(KeyError):
        nearest_neighbors("nope", two_blobs())


def test_diversity_report():
    vectors = two_blobs()
    report = diversity_report(vectors)
    assert report.population == 6
    assert report.distinct_o_patterns == 2
    assert report.e_failures == 0
    assert report.mean_pairwise_distance > 0
    assert len(report.m_variance) == 2 and len(report.c_variance) == 2


def test_diversity_single_vector():
    report = diversity_report([vec("a", "x")])
    assert report.population == 1
    assert report.mean_pairwise_distance == 0.0
