"""Experiment drivers and metrics for the synthetic robustness studies.

Gap curves measure how far detected boundaries land from the planted one
as noise or cross-boundary overlap grows, for both the classifier-gain
detector and the kernel baseline. Clustering quality is scored by pairwise
(relative) and mutual-mode (absolute) precision/recall plus embedding
coherence.
"""
from __future__ import annotations

import csv
import statistics
from collections import Counter
from dataclasses import dataclass, field, replace
from math import comb

import numpy as np

from .changepoint import ClassifierConfig, baseline_kernel_cpd, detect_segment
from .corpus import DAY_SECONDS, build_vocabulary, featurize, timestamps
from .fragments import DEFAULT_BRANCHING, DEFAULT_THRESHOLD, FrameMap, HashedNgramEmbedder
from .birch import birch_fit
from .synthgen import EventPool, gen_cluster_run, gen_noise_run, gen_overlap_run


# ---------------------------------------------------------------------------
# clustering metrics
# ---------------------------------------------------------------------------

def coherence(vectors: np.ndarray) -> float:
    """Mean pairwise cosine similarity within one cluster; singleton -> 1."""
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2 or vectors.shape[0] == 0:
        raise ValueError("coherence needs a non-empty 2-D cluster")
    n = vectors.shape[0]
    if n == 1:
        return 1.0
    gram = vectors @ vectors.T
    total = (gram.sum() - np.trace(gram)) / 2.0
    return float(total / comb(n, 2))


def relative_pr(assignments, truth) -> tuple[float, float]:
    """Pair-level precision/recall between a clustering and ground truth.

    Precision: fraction of same-cluster pairs that share a truth label
    (1.0 when no same-cluster pairs exist). Recall: fraction of same-truth
    pairs that share a cluster (1.0 vacuously when no same-truth pairs).
    """
    if len(assignments) != len(truth):
        raise ValueError("assignments and truth must cover the same items")
    both = Counter(zip(assignments, truth))
    pred = Counter(assignments)
    gold = Counter(truth)
    tp = sum(comb(v, 2) for v in both.values())
    same_cluster = sum(comb(v, 2) for v in pred.values())
    same_truth = sum(comb(v, 2) for v in gold.values())
    precision = tp / same_cluster if same_cluster else 1.0
    recall = tp / same_truth if same_truth else 1.0
    return precision, recall


def absolute_match(assignments, truth, noise_prefix: str = "noise:") -> tuple[float, float]:
    """Mutual-mode event matching.

    For each (non-noise) event, find its modal predicted cluster; the event
    counts as matched when that cluster's own modal truth label is the
    event. Precision divides matches by the number of distinct modal
    clusters, recall by the number of events. Cluster-side ties break
    toward the smaller cluster id, label-side ties lexicographically.
    """
    if len(assignments) != len(truth):
        raise ValueError("assignments and truth must cover the same items")
    per_event: dict = {}
    per_cluster: dict = {}
    for cluster, label in zip(assignments, truth):
        if not str(label).startswith(noise_prefix):
            per_event.setdefault(label, Counter())[cluster] += 1
        per_cluster.setdefault(cluster, Counter())[label] += 1
    if not per_event:
        return 1.0, 1.0
    matched = 0
    modal_clusters = set()
    for event in sorted(per_event):
        counts = per_event[event]
        modal = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        modal_clusters.add(modal)
        cluster_mode = min(per_cluster[modal].items(), key=lambda kv: (-kv[1], str(kv[0])))[0]
        if cluster_mode == event:
            matched += 1
    return matched / len(modal_clusters), matched / len(per_event)


# ---------------------------------------------------------------------------
# change point experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChangePointExperimentConfig:
    repeats: int = 10
    seed: int = 0
    days: int = 10
    docs_per_day: int = 200
    change_day: int = 5
    min_days: int = 1           # experiment grids scan every interior day
    vocabulary_size: int = 5000
    classifier: ClassifierConfig = field(
        default_factory=lambda: ClassifierConfig(n_trees=30))


@dataclass
class GapCurve:
    params: dict
    rows: list

    def mean_gap(self, method: str, **cell) -> float:
        for row in self.rows:
            if all(row[k] == v for k, v in cell.items()):
                return row[f"{method}_mean_gap"]
        raise KeyError(f"no grid cell {cell}")


def _detect_gaps(run, cfg: ChangePointExperimentConfig, rep: int) -> dict:
    vocab = build_vocabulary(run.docs, cfg.vocabulary_size)
    X = featurize(run.docs, vocab)
    ts = timestamps(run.docs)
    clf = replace(cfg.classifier, seed=cfg.classifier.seed + rep)
    found = detect_segment(X, ts, run.span, clf, sig=None, min_days=cfg.min_days)
    kernel = baseline_kernel_cpd(X, ts, run.span)
    day0 = run.span[0]
    return {
        "classifier_day": (found.tau - day0) / DAY_SECONDS,
        "classifier_gap": abs(found.tau - run.change_ts) / DAY_SECONDS,
        "kernel_day": (kernel.tau - day0) / DAY_SECONDS,
        "kernel_gap": abs(kernel.tau - run.change_ts) / DAY_SECONDS,
    }


def run_noise_experiment(pool: EventPool, ratios, cfg: ChangePointExperimentConfig | None = None) -> GapCurve:
    """Mean detection gap (days) per noise ratio over seeded repetitions."""
    cfg = cfg or ChangePointExperimentConfig()
    rows = []
    for ratio in ratios:
        per_rep = []
        for rep in range(cfg.repeats):
            run = gen_noise_run(pool, ratio, seed=cfg.seed + rep, days=cfg.days,
                                docs_per_day=cfg.docs_per_day, change_day=cfg.change_day)
            per_rep.append(_detect_gaps(run, cfg, rep))
        rows.append({
            "noise_ratio": ratio,
            "classifier_mean_gap": statistics.mean(r["classifier_gap"] for r in per_rep),
            "kernel_mean_gap": statistics.mean(r["kernel_gap"] for r in per_rep),
            "classifier_gaps": [r["classifier_gap"] for r in per_rep],
            "kernel_gaps": [r["kernel_gap"] for r in per_rep],
        })
    return GapCurve(params={"kind": "noise", "repeats": cfg.repeats, "seed": cfg.seed}, rows=rows)


def run_overlap_experiment(pool: EventPool, a1_grid, a2_grid, overlap_days,
                           cfg: ChangePointExperimentConfig | None = None) -> GapCurve:
    """Gap grid over (overlap_days, a1, a2) for both detection methods."""
    cfg = cfg or ChangePointExperimentConfig()
    rows = []
    for d in overlap_days:
        for a1 in a1_grid:
            for a2 in a2_grid:
                per_rep = []
                for rep in range(cfg.repeats):
                    run = gen_overlap_run(pool, a1, a2, d, seed=cfg.seed + rep,
                                          days=cfg.days, docs_per_day=cfg.docs_per_day,
                                          change_day=cfg.change_day)
                    per_rep.append(_detect_gaps(run, cfg, rep))
                rows.append({
                    "overlap_days": d, "a1": a1, "a2": a2,
                    "classifier_mean_gap": statistics.mean(r["classifier_gap"] for r in per_rep),
                    "kernel_mean_gap": statistics.mean(r["kernel_gap"] for r in per_rep),
                    "classifier_mean_day": statistics.mean(r["classifier_day"] for r in per_rep),
                    "kernel_mean_day": statistics.mean(r["kernel_day"] for r in per_rep),
                })
    return GapCurve(params={"kind": "overlap", "repeats": cfg.repeats, "seed": cfg.seed}, rows=rows)


# ---------------------------------------------------------------------------
# clustering experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClusterExperimentConfig:
    noise_sizes: tuple = (0, 26, 52, 78, 104)
    thresholds: tuple = (DEFAULT_THRESHOLD,)
    branching: int = DEFAULT_BRANCHING
    seed: int = 0
    embedder_dim: int = 384


@dataclass
class ClusterEvalResult:
    params: dict
    rows: list

    def row(self, **cell) -> dict:
        for row in self.rows:
            if all(row[k] == v for k, v in cell.items()):
                return row
        raise KeyError(f"no grid cell {cell}")


def run_cluster_experiment(pool: EventPool, cfg: ClusterExperimentConfig | None = None,
                           frame_map: FrameMap | None = None) -> ClusterEvalResult:
    """Clustering quality across noise sizes and radius thresholds."""
    cfg = cfg or ClusterExperimentConfig()
    frame_map = frame_map or FrameMap.bundled()
    embedder = HashedNgramEmbedder(dim=cfg.embedder_dim)
    rows = []
    for n_noise in cfg.noise_sizes:
        items = gen_cluster_run(pool, n_noise, seed=cfg.seed)
        texts = [" ".join((t.triplet[0], frame_map.frame_of(t.triplet[1]), t.triplet[2]))
                 for t in items]
        vectors = embedder.embed(texts)
        truth = [item.label for item in items]
        for threshold in cfg.thresholds:
            clusters = birch_fit(vectors, threshold=threshold, branching=cfg.branching)
            labels = clusters.labels.tolist()
            precision, recall = relative_pr(labels, truth)
            a_precision, a_recall = absolute_match(labels, truth)
            per_cluster = {}
            for i, label in enumerate(labels):
                per_cluster.setdefault(label, []).append(i)
            coherences = [coherence(vectors[idx]) for idx in per_cluster.values()]
            sizes = [len(idx) for idx in per_cluster.values()]
            rows.append({
                "n_noise": n_noise,
                "threshold": threshold,
                "n_items": len(items),
                "n_clusters": clusters.n_clusters,
                "relative_precision": precision,
                "relative_recall": recall,
                "absolute_precision": a_precision,
                "absolute_recall": a_recall,
                "mean_coherence": statistics.mean(coherences),
                "min_coherence": min(coherences),
                "max_cluster_size": max(sizes),
            })
    return ClusterEvalResult(params={"seed": cfg.seed}, rows=rows)


# ---------------------------------------------------------------------------
# report files
# ---------------------------------------------------------------------------

def write_report_csv(path, rows: list) -> None:
    """Comma-separated report; list-valued cells are space-joined."""
    if not rows:
        raise ValueError("nothing to write")
    fieldnames = list(rows[0].keys())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            flat = {k: (" ".join(f"{x:g}" for x in v) if isinstance(v, list) else v)
                    for k, v in row.items()}
            writer.writerow(flat)
