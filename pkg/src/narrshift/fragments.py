"""Triplet aggregation: verb-frame normalization, embedding, clustering.

Three stages compress the raw triplet multiset: (1) verb senses map onto
coarse verb frames, (2) triplets rendered as short sentences are embedded
and BIRCH-clustered with the most frequent member as each cluster's
representative, (3) argument strings are clustered the same way and each
argument is replaced by its cluster's most frequent surface form. Unique
triplet counts can only shrink along the way.
"""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .birch import VectorClusters, birch_fit
from .corpus import FORMAT_HEADER, NarrativeTriplet

# radius threshold tuned for unit-norm embeddings (their subcluster radius
# is bounded by 1, so thresholds >= 1 collapse everything into one cluster)
DEFAULT_THRESHOLD = 0.55
DEFAULT_BRANCHING = 50


# ---------------------------------------------------------------------------
# verb frame mapping
# ---------------------------------------------------------------------------

class FrameMap:
    """verb_sense -> frame table with identity fallback for unknown senses."""

    def __init__(self, table: dict):
        self._table = dict(table)

    def __len__(self) -> int:
        return len(self._table)

    def frame_of(self, verb_sense: str) -> str:
        return self._table.get(verb_sense, verb_sense)

    @classmethod
    def from_file(cls, path) -> "FrameMap":
        table = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                sense, frame = line.split("\t")
                table[sense] = frame
        return cls(table)

    @classmethod
    def bundled(cls) -> "FrameMap":
        """Desk-scale subset of a verb-sense -> frame table shipped as data."""
        text = resources.files("narrshift.data").joinpath("frame_map.tsv").read_text("utf-8")
        table = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            sense, frame = line.split("\t")
            table[sense] = frame
        return cls(table)


def apply_frame_map(triplets: list[NarrativeTriplet], frame_map: FrameMap) -> list[NarrativeTriplet]:
    """Fill the frame field from the verb sense; idempotent."""
    return [t.with_frame(frame_map.frame_of(t.verb_sense)) for t in triplets]


# ---------------------------------------------------------------------------
# embedding sources
# ---------------------------------------------------------------------------

class HashedNgramEmbedder:
    """Hashed character n-gram vectorizer; the no-model fallback embedder.

    Signed hashing buckets of 3/4/5-grams over the space-padded text,
    L2-normalized. Fully deterministic across platforms (BLAKE2 digest,
    never the salted builtin hash).
    """

    def __init__(self, dim: int = 384, ngram_sizes: tuple = (3, 4, 5)):
        self.dim = dim
        self.ngram_sizes = ngram_sizes

    def embed(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim))
        for row, text in enumerate(texts):
            padded = f" {' '.join(text.lower().split())} "
            for n in self.ngram_sizes:
                for i in range(len(padded) - n + 1):
                    gram = padded[i:i + n].encode("utf-8")
                    h = int.from_bytes(hashlib.blake2b(gram, digest_size=8).digest(), "big")
                    sign = 1.0 if h & (1 << 63) else -1.0
                    out[row, h % self.dim] += sign
            norm = np.linalg.norm(out[row])
            if norm > 0:
                out[row] /= norm
        return out


class VectorTable:
    """Embeddings loaded from a vector file, keyed by exact text."""

    def __init__(self, table: dict, dim: int):
        self._table = table
        self.dim = dim

    def embed(self, texts: list[str]) -> np.ndarray:
        missing = [t for t in texts if t not in self._table]
        if missing:
            raise KeyError(f"vector file is missing {len(missing)} texts: {missing[:5]}")
        return np.stack([self._table[t] for t in texts])

    @classmethod
    def from_file(cls, path, expected_dim: int | None = None) -> "VectorTable":
        texts, matrix = read_vector_file(path)
        dim = matrix.shape[1]
        if expected_dim is not None and dim != expected_dim:
            raise ValueError(f"vector file dimension {dim} != configured {expected_dim}")
        norms = np.linalg.norm(matrix, axis=1)
        matrix = matrix / np.where(norms > 0, norms, 1.0)[:, None]
        return cls(dict(zip(texts, matrix)), dim)


def read_vector_file(path) -> tuple[list[str], np.ndarray]:
    """Read either vector file profile (text JSONL or .npz binary)."""
    path = str(path)
    if path.endswith(".npz"):
        data = np.load(path, allow_pickle=False)
        texts = [str(t) for t in data["texts"]]
        matrix = np.asarray(data["vectors"], dtype=float)
    else:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith(FORMAT_HEADER):
                raise ValueError(f"{path}: missing {FORMAT_HEADER} header")
            spec = json.loads(header.split(None, 2)[2])
            texts, rows = [], []
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                texts.append(rec["text"])
                rows.append(rec["vec"])
            matrix = np.asarray(rows, dtype=float)
            if matrix.size and matrix.shape[1] != spec["dim"]:
                raise ValueError(f"{path}: records are {matrix.shape[1]}-d, header says {spec['dim']}")
            if len(texts) != spec["count"]:
                raise ValueError(f"{path}: {len(texts)} records, header says {spec['count']}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{path}: non-finite vector components")
    return texts, matrix


def write_vector_file(path, texts: list[str], matrix: np.ndarray, binary: bool = False) -> None:
    matrix = np.asarray(matrix, dtype=float)
    if binary:
        np.savez(path, texts=np.array(texts, dtype=np.str_), vectors=matrix)
        return
    with open(path, "w", encoding="utf-8") as fh:
        spec = {"dim": int(matrix.shape[1]), "count": len(texts)}
        fh.write(f"{FORMAT_HEADER} vectors {json.dumps(spec, sort_keys=True)}\n")
        for text, row in zip(texts, matrix):
            rec = {"text": text, "vec": [float(x) for x in row]}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def embed_texts(texts: list[str], source) -> np.ndarray:
    """Unit-norm embeddings for rendered triplet texts."""
    return source.embed(texts)


# ---------------------------------------------------------------------------
# triplet clustering
# ---------------------------------------------------------------------------

def choose_representative(counts: dict) -> tuple:
    """Most frequent triplet key; frequency ties break on rendered text."""
    if not counts:
        raise ValueError("empty cluster")
    return min(counts.items(), key=lambda kv: (-kv[1], " ".join(kv[0])))[0]


@dataclass
class ClusterModel:
    """Triplet-key clustering with per-cluster representatives."""

    assignment: dict            # triplet key -> cluster id
    representatives: dict       # cluster id -> triplet key
    sizes: dict                 # cluster id -> total triplet frequency
    threshold: float
    vector_clusters: VectorClusters | None = field(default=None, repr=False)

    def representative_of(self, key: tuple) -> tuple:
        return self.representatives[self.assignment[key]]

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(FORMAT_HEADER + " clusters\n")
            for key in sorted(self.assignment):
                cid = self.assignment[key]
                rec = {
                    "triplet": list(key),
                    "cluster_id": int(cid),
                    "representative": list(self.representatives[cid]),
                }
                fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def cluster_triplets(triplets: list[NarrativeTriplet], source,
                     threshold: float = DEFAULT_THRESHOLD,
                     branching: int = DEFAULT_BRANCHING) -> ClusterModel:
    """Embed unique rendered triplets (input order) and BIRCH-cluster them."""
    counts: Counter = Counter()
    order: list[tuple] = []
    for t in triplets:
        key = t.key()
        if key not in counts:
            order.append(key)
        counts[key] += 1
    if not order:
        return ClusterModel({}, {}, {}, threshold)
    vectors = source.embed([" ".join(k) for k in order])
    clusters = birch_fit(vectors, threshold=threshold, branching=branching)
    assignment = {key: int(label) for key, label in zip(order, clusters.labels)}
    members: dict[int, dict] = {}
    for key in order:
        members.setdefault(assignment[key], {})[key] = counts[key]
    representatives = {cid: choose_representative(m) for cid, m in members.items()}
    sizes = {cid: sum(m.values()) for cid, m in members.items()}
    return ClusterModel(assignment, representatives, sizes, threshold, clusters)


def apply_cluster_model(triplets: list[NarrativeTriplet], model: ClusterModel) -> list[NarrativeTriplet]:
    """Rewrite each triplet to its cluster's representative triplet."""
    out = []
    for t in triplets:
        a0, frame, a1 = model.representative_of(t.key())
        out.append(NarrativeTriplet(a0=a0, verb_sense=t.verb_sense, a1=a1,
                                    doc_id=t.doc_id, timestamp=t.timestamp,
                                    frame=frame, meta=t.meta))
    return out


# ---------------------------------------------------------------------------
# argument clustering
# ---------------------------------------------------------------------------

def canonicalize_arguments(triplets: list[NarrativeTriplet], source,
                           threshold: float = DEFAULT_THRESHOLD,
                           branching: int = DEFAULT_BRANCHING,
                           joint: bool = True) -> tuple[dict, dict]:
    """Map each argument string to its cluster's most frequent surface form.

    Agents and patients are clustered jointly by default; ``joint=False``
    clusters the two roles separately and returns distinct maps.
    """

    def build_map(freq: Counter, order: list[str]) -> dict:
        if not order:
            return {}
        vectors = source.embed(order)
        clusters = birch_fit(vectors, threshold=threshold, branching=branching)
        members: dict[int, list[str]] = {}
        for arg, label in zip(order, clusters.labels):
            members.setdefault(int(label), []).append(arg)
        mapping = {}
        for args in members.values():
            canon = min(args, key=lambda a: (-freq[a], a))
            for a in args:
                mapping[a] = canon
        return mapping

    a0_freq: Counter = Counter(t.a0 for t in triplets)
    a1_freq: Counter = Counter(t.a1 for t in triplets)
    if joint:
        freq = a0_freq + a1_freq
        order = list(dict.fromkeys([t.a0 for t in triplets] + [t.a1 for t in triplets]))
        mapping = build_map(freq, order)
        return mapping, mapping
    a0_order = list(dict.fromkeys(t.a0 for t in triplets))
    a1_order = list(dict.fromkeys(t.a1 for t in triplets))
    return build_map(a0_freq, a0_order), build_map(a1_freq, a1_order)


def apply_argument_map(triplets: list[NarrativeTriplet], a0_map: dict, a1_map: dict) -> list[NarrativeTriplet]:
    out = []
    for t in triplets:
        out.append(NarrativeTriplet(a0=a0_map.get(t.a0, t.a0), verb_sense=t.verb_sense,
                                    a1=a1_map.get(t.a1, t.a1), doc_id=t.doc_id,
                                    timestamp=t.timestamp, frame=t.frame, meta=t.meta))
    return out


# ---------------------------------------------------------------------------
# full aggregation pipeline
# ---------------------------------------------------------------------------

@dataclass
class AggregationResult:
    triplets: list
    model: ClusterModel
    stage_counts: list          # [(stage name, unique triplet count), ...]


def unique_count(triplets: list[NarrativeTriplet]) -> int:
    return len({t.key() for t in triplets})


def aggregate_triplets(triplets: list[NarrativeTriplet], source, frame_map: FrameMap,
                       triplet_threshold: float = DEFAULT_THRESHOLD,
                       argument_threshold: float = DEFAULT_THRESHOLD,
                       branching: int = DEFAULT_BRANCHING,
                       joint_arguments: bool = True) -> AggregationResult:
    """Frame mapping, triplet clustering, then argument clustering."""
    stages = [("input", unique_count(triplets))]
    mapped = apply_frame_map(triplets, frame_map)
    stages.append(("frame_mapped", unique_count(mapped)))
    model = cluster_triplets(mapped, source, triplet_threshold, branching)
    compressed = apply_cluster_model(mapped, model)
    stages.append(("triplet_clustered", unique_count(compressed)))
    a0_map, a1_map = canonicalize_arguments(compressed, source, argument_threshold,
                                            branching, joint=joint_arguments)
    final = apply_argument_map(compressed, a0_map, a1_map)
    stages.append(("argument_clustered", unique_count(final)))
    return AggregationResult(triplets=final, model=model, stage_counts=stages)


# ---------------------------------------------------------------------------
# alternative clusterers (used by the evaluation harness comparisons)
# ---------------------------------------------------------------------------

def alt_cluster(vectors: np.ndarray, method: str, **params) -> np.ndarray:
    """Comparison clusterers: ``kmeans`` (k, seed) or ``dbscan`` (eps, min_pts)."""
    if method == "kmeans":
        return kmeans_cluster(vectors, **params)
    if method == "dbscan":
        return dbscan_cluster(vectors, **params)
    raise ValueError(f"unknown clustering method {method!r}")


def kmeans_cluster(vectors: np.ndarray, k: int, seed: int = 0, n_iter: int = 100) -> np.ndarray:
    """Lloyd's algorithm with seeded kmeans++ initialization."""
    vectors = np.asarray(vectors, dtype=float)
    n = vectors.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"k must be in [1, {n}]")
    rng = np.random.default_rng(seed)
    centers = np.empty((k, vectors.shape[1]))
    centers[0] = vectors[rng.integers(n)]
    d2 = np.sum((vectors - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        probs = d2 / d2.sum() if d2.sum() > 0 else np.full(n, 1.0 / n)
        centers[i] = vectors[rng.choice(n, p=probs)]
        d2 = np.minimum(d2, np.sum((vectors - centers[i]) ** 2, axis=1))
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(n_iter):
        d = np.sum(vectors ** 2, axis=1)[:, None] - 2 * vectors @ centers.T \
            + np.sum(centers ** 2, axis=1)[None, :]
        new_labels = np.argmin(d, axis=1)
        for c in range(k):
            mask = new_labels == c
            if mask.any():
                centers[c] = vectors[mask].mean(axis=0)
            else:  # reseed an empty cluster on the farthest point
                centers[c] = vectors[np.argmax(d.min(axis=1))]
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels


def dbscan_cluster(vectors: np.ndarray, eps: float, min_pts: int) -> np.ndarray:
    """Brute-force DBSCAN; noise points get label -1."""
    if eps <= 0 or min_pts < 1:
        raise ValueError("need eps > 0 and min_pts >= 1")
    vectors = np.asarray(vectors, dtype=float)
    n = vectors.shape[0]
    sq = np.sum(vectors ** 2, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2 * vectors @ vectors.T, 0.0)
    neighbors = [np.flatnonzero(d2[i] <= eps * eps) for i in range(n)]
    core = np.array([len(nb) >= min_pts for nb in neighbors])
    labels = np.full(n, -1, dtype=np.int64)
    cluster = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = cluster
        frontier = list(neighbors[i])
        while frontier:
            j = frontier.pop(0)
            if labels[j] == -1:
                labels[j] = cluster
                if core[j]:
                    frontier.extend(int(x) for x in neighbors[j] if labels[x] == -1)
        cluster += 1
    return labels
