"""Collective-motion clusters: threshold the coherence matrix, take components."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class ClusterLabeling:
    """Dense 0-based cluster ids, ordered by each cluster's smallest node."""

    labels: np.ndarray
    n_clusters: int
    sizes: np.ndarray


@dataclass(frozen=True)
class ClusterStats:
    n_clusters: int
    n_nontrivial: int          # clusters with at least 2 members
    size_histogram: dict[int, int]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:  # path compression
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def threshold_cluster(z: np.ndarray, c_thre: float) -> ClusterLabeling:
    """Connected components of the graph with an (undirected) edge wherever
    the symmetrized coherence strictly exceeds ``c_thre``."""
    if not 0.0 <= c_thre <= 1.0:
        raise ParameterError(f"c_thre must be in [0, 1], got {c_thre}")
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 2 or z.shape[0] != z.shape[1]:
        raise ParameterError("coherence matrix must be square")
    n = z.shape[0]
    adj = 0.5 * (z + z.T) > c_thre
    uf = _UnionFind(n)
    for i, j in zip(*np.nonzero(np.triu(adj, k=1))):
        uf.union(int(i), int(j))
    labels = np.empty(n, dtype=np.int64)
    next_label: dict[int, int] = {}
    for i in range(n):
        root = uf.find(i)
        labels[i] = next_label.setdefault(root, len(next_label))
    sizes = np.bincount(labels, minlength=len(next_label))
    return ClusterLabeling(labels, len(next_label), sizes)


def cluster_stats(labeling: ClusterLabeling) -> ClusterStats:
    """Cluster counts and a size histogram (size -> how many clusters)."""
    sizes = labeling.sizes
    hist = {int(s): int(c) for s, c in
            zip(*np.unique(sizes, return_counts=True))}
    return ClusterStats(
        n_clusters=labeling.n_clusters,
        n_nontrivial=int((sizes >= 2).sum()),
        size_histogram=hist,
    )


def write_labels_csv(labeling: ClusterLabeling, path) -> None:
    """Write ``node,cluster`` rows."""
    lines = ["node,cluster"]
    lines += [f"{i},{int(c)}" for i, c in enumerate(labeling.labels)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
