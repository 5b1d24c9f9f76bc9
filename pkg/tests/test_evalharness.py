import numpy as np
import pytest

from narrshift.changepoint import ClassifierConfig
from narrshift.evalharness import (ChangePointExperimentConfig,
                                   ClusterExperimentConfig, absolute_match,
                                   coherence, relative_pr, run_cluster_experiment,
                                   run_noise_experiment, run_overlap_experiment,
                                   write_report_csv)

NB_CFG = ChangePointExperimentConfig(
    repeats=2, docs_per_day=60,
    classifier=ClassifierConfig(backend="naive_bayes"))


# ---------------------------------------------------------------------------
# coherence
# ---------------------------------------------------------------------------

def test_coherence_identical_vectors():
    v = np.array([[1.0, 0.0], [1.0, 0.0]])
    assert coherence(v) == pytest.approx(1.0)


def test_coherence_orthogonal_vectors():
    v = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert coherence(v) == pytest.approx(0.0)


def test_coherence_three_vector_mean():
    # pairwise cosines 1.0, 0.5, 0.5 -> mean 2/3
    a = np.array([1.0, 0.0])
    c = np.array([0.5, np.sqrt(3) / 2])
    v = np.vstack([a, a, c])
    assert coherence(v) == pytest.approx(2 / 3)


def test_coherence_singleton_and_empty():
    assert coherence(np.array([[0.6, 0.8]])) == 1.0
    with pytest.raises(ValueError):
        coherence(np.zeros((0, 2)))


def test_coherence_bounded_for_unit_vectors(embedder):
    vectors = embedder.embed(["alpha beta", "gamma delta", "alpha delta"])
    value = coherence(vectors)
    assert -1.0 - 1e-9 <= value <= 1.0 + 1e-9


# ---------------------------------------------------------------------------
# relative criterion
# ---------------------------------------------------------------------------

def test_relative_perfect_clustering():
    assert relative_pr([0, 0, 1], ["a", "a", "b"]) == (1.0, 1.0)


def test_relative_all_singletons():
    precision, recall = relative_pr([0, 1, 2], ["a", "a", "b"])
    assert precision == 1.0 and recall == 0.0


def test_relative_one_big_cluster():
    # truth {a,b | c}: 1 same-truth pair of 3 same-cluster pairs
    precision, recall = relative_pr([0, 0, 0], ["a", "a", "b"])
    assert precision == pytest.approx(1 / 3)
    assert recall == 1.0


def test_relative_relabeling_invariance():
    truth = ["a", "a", "b", "b", "c"]
    assert relative_pr([0, 0, 1, 1, 2], truth) == relative_pr([5, 5, 9, 9, 7], truth)


def test_relative_requires_same_length():
    with pytest.raises(ValueError):
        relative_pr([0, 1], ["a"])


# ---------------------------------------------------------------------------
# absolute criterion
# ---------------------------------------------------------------------------

def test_absolute_perfect_clustering():
    assert absolute_match([0, 0, 1, 1], ["a", "a", "b", "b"]) == (1.0, 1.0)


def test_absolute_single_cluster_many_events():
    events = [f"e{i:02d}" for i in range(22) for _ in range(2)] + ["e00"]
    clusters = [0] * len(events)
    precision, recall = absolute_match(clusters, events)
    # only the globally modal event (e00, which has an extra item) is mutual-mode
    assert precision == 1.0
    assert recall == pytest.approx(1 / 22)


def test_absolute_noise_only_vacuous():
    precision, recall = absolute_match([0, 1], ["noise:a", "noise:b"])
    assert (precision, recall) == (1.0, 1.0)


def test_absolute_noise_does_not_count_as_event():
    clusters = [0, 0, 0, 1]
    truth = ["a", "a", "noise:q", "noise:r"]
    precision, recall = absolute_match(clusters, truth)
    assert (precision, recall) == (1.0, 1.0)


def test_absolute_relabeling_invariance():
    truth = ["a", "a", "b"]
    assert absolute_match([0, 0, 1], truth) == absolute_match([3, 3, 0], truth)


# ---------------------------------------------------------------------------
# experiment drivers (small smoke grids, fast NB backend)
# ---------------------------------------------------------------------------

def test_noise_experiment_shape_and_determinism(pool):
    curve1 = run_noise_experiment(pool, [0.0, 0.5], NB_CFG)
    curve2 = run_noise_experiment(pool, [0.0, 0.5], NB_CFG)
    assert [r["noise_ratio"] for r in curve1.rows] == [0.0, 0.5]
    assert curve1.rows == curve2.rows
    for row in curve1.rows:
        assert row["classifier_mean_gap"] >= 0
        assert len(row["classifier_gaps"]) == 2
    assert curve1.mean_gap("classifier", noise_ratio=0.0) == 0.0


def test_overlap_experiment_grid_complete(pool):
    curve = run_overlap_experiment(pool, [0.0, 1.0], [1.0], [2], NB_CFG)
    assert len(curve.rows) == 2
    cell = curve.mean_gap("classifier", a1=1.0, a2=1.0, overlap_days=2)
    assert cell == pytest.approx(2.0)  # boundary detected at day 3


def test_cluster_experiment_rows(pool):
    cfg = ClusterExperimentConfig(noise_sizes=(0, 20), thresholds=(0.55,), seed=1)
    result = run_cluster_experiment(pool, cfg)
    assert len(result.rows) == 2
    row = result.row(n_noise=0, threshold=0.55)
    assert row["n_items"] == 197
    assert row["relative_recall"] >= 0.92
    assert row["relative_precision"] >= 0.55
    assert 0 <= row["absolute_recall"] <= 1
    assert -1 <= row["mean_coherence"] <= 1
    again = run_cluster_experiment(pool, cfg)
    assert again.rows == result.rows


def test_report_csv_round_trip(tmp_path, pool):
    curve = run_noise_experiment(pool, [0.0], NB_CFG)
    path = tmp_path / "gaps.csv"
    write_report_csv(path, curve.rows)
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("noise_ratio,")
    assert len(lines) == 2
    with pytest.raises(ValueError):
        write_report_csv(tmp_path / "empty.csv", [])
