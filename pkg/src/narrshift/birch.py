"""Single-pass CF-tree clustering (BIRCH) without a global refinement phase.

Leaf subclusters are the final clusters; cluster granularity is controlled
purely by the radius threshold. Insertion is order-sensitive, so callers
fix the input order to make runs reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class ClusteringFeature:
    """(count, linear sum, squared-norm sum) summary of a point set."""

    n: int
    ls: np.ndarray
    ss: float

    @classmethod
    def of_point(cls, x: np.ndarray) -> "ClusteringFeature":
        return cls(1, x.copy(), float(np.dot(x, x)))

    @property
    def centroid(self) -> np.ndarray:
        return self.ls / self.n

    def radius(self) -> float:
        c = self.ls / self.n
        return math.sqrt(max(self.ss / self.n - float(np.dot(c, c)), 0.0))

    def merged_radius_sq(self, x: np.ndarray) -> float:
        n = self.n + 1
        ls = self.ls + x
        ss = self.ss + float(np.dot(x, x))
        return max(ss / n - float(np.dot(ls, ls)) / (n * n), 0.0)

    def add_point(self, x: np.ndarray) -> None:
        self.n += 1
        self.ls += x
        self.ss += float(np.dot(x, x))

    def merge(self, other: "ClusteringFeature") -> "ClusteringFeature":
        return ClusteringFeature(self.n + other.n, self.ls + other.ls, self.ss + other.ss)


class _Node:
    __slots__ = ("entries", "children")

    def __init__(self, leaf: bool):
        self.entries: list[ClusteringFeature] = []
        self.children: list[_Node] | None = None if leaf else []

    @property
    def is_leaf(self) -> bool:
        return self.children is None


class CFTree:
    """CF-tree with absorb-if-radius-fits leaves and farthest-pair splits."""

    def __init__(self, threshold: float, branching: int = 50):
        if threshold <= 0:
            raise ValueError("threshold must be > 0")
        if branching < 2:
            raise ValueError("branching factor must be >= 2")
        self.threshold = threshold
        self.branching = branching
        self._root = _Node(leaf=True)

    def insert(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        split = self._insert(self._root, x)
        if split is not None:
            root = _Node(leaf=False)
            for cf, child in split:
                root.entries.append(cf)
                root.children.append(child)
            self._root = root

    def _insert(self, node: _Node, x: np.ndarray):
        if node.is_leaf:
            if node.entries:
                i = self._closest(node.entries, x)
                if node.entries[i].merged_radius_sq(x) <= self.threshold ** 2:
                    node.entries[i].add_point(x)
                    return None
            node.entries.append(ClusteringFeature.of_point(x))
            if len(node.entries) > self.branching:
                return self._split(node)
            return None
        i = self._closest(node.entries, x)
        result = self._insert(node.children[i], x)
        if result is None:
            node.entries[i].add_point(x)
            return None
        cf1, child1 = result[0]
        cf2, child2 = result[1]
        node.entries[i] = cf1
        node.children[i] = child1
        node.entries.append(cf2)
        node.children.append(child2)
        if len(node.entries) > self.branching:
            return self._split(node)
        return None

    @staticmethod
    def _closest(entries: list[ClusteringFeature], x: np.ndarray) -> int:
        centroids = np.stack([cf.centroid for cf in entries])
        d = np.sum((centroids - x) ** 2, axis=1)
        return int(np.argmin(d))  # first minimum wins

    def _split(self, node: _Node):
        centroids = np.stack([cf.centroid for cf in node.entries])
        sq = np.sum(centroids ** 2, axis=1)
        d = sq[:, None] + sq[None, :] - 2 * centroids @ centroids.T
        i, j = np.unravel_index(int(np.argmax(d)), d.shape)
        seed_a, seed_b = (i, j) if i < j else (j, i)
        a = _Node(leaf=node.is_leaf)
        b = _Node(leaf=node.is_leaf)
        for k, cf in enumerate(node.entries):
            da = np.sum((centroids[k] - centroids[seed_a]) ** 2)
            db = np.sum((centroids[k] - centroids[seed_b]) ** 2)
            target = a if da <= db else b
            target.entries.append(cf)
            if not node.is_leaf:
                target.children.append(node.children[k])
        cf_a = _sum_cfs(a.entries)
        cf_b = _sum_cfs(b.entries)
        return ((cf_a, a), (cf_b, b))

    def leaf_clusters(self) -> list[ClusteringFeature]:
        """Leaf subclusters in left-to-right tree order."""
        out: list[ClusteringFeature] = []
        stack = [self._root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.extend(node.entries)
            else:
                stack.extend(reversed(node.children))
        return out


def _sum_cfs(cfs: list[ClusteringFeature]) -> ClusteringFeature:
    total = ClusteringFeature(0, np.zeros_like(cfs[0].ls), 0.0)
    for cf in cfs:
        total = total.merge(cf)
    return total


@dataclass(frozen=True)
class VectorClusters:
    """Result of clustering raw vectors: labels plus leaf subcluster stats."""

    labels: np.ndarray
    centroids: np.ndarray
    radii: np.ndarray
    threshold: float

    @property
    def n_clusters(self) -> int:
        return self.centroids.shape[0]


def birch_fit(vectors: np.ndarray, threshold: float, branching: int = 50) -> VectorClusters:
    """Build the CF-tree in input order, then assign by nearest leaf centroid."""
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2 or vectors.shape[0] == 0:
        raise ValueError("need a non-empty 2-D array of vectors")
    tree = CFTree(threshold=threshold, branching=branching)
    for row in vectors:
        tree.insert(row)
    leaves = tree.leaf_clusters()
    centroids = np.stack([cf.centroid for cf in leaves])
    radii = np.array([cf.radius() for cf in leaves])
    sq = np.sum(centroids ** 2, axis=1)
    d = sq[None, :] - 2 * vectors @ centroids.T  # + |x|^2, constant per row
    labels = np.argmin(d, axis=1).astype(np.int64)
    return VectorClusters(labels=labels, centroids=centroids, radii=radii,
                          threshold=threshold)
