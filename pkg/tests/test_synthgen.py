import json
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from narrshift.corpus import read_documents, read_triplets
from narrshift.synthgen import (SynthError, build_pool, extract_triplets,
                                gen_cluster_run, gen_noise_run, gen_overlap_run,
                                materialize, paraphrase_sentence)


# ---------------------------------------------------------------------------
# pattern extractor
# ---------------------------------------------------------------------------

def test_extract_simple_svo():
    [t] = extract_triplets("the who declares a global health emergency")
    assert t == ("the who", "declare.01", "a global health emergency")


def test_extract_passive():
    [t] = extract_triplets("a global health emergency is declared by the who")
    assert t == ("the who", "declare.01", "a global health emergency")


def test_extract_leading_adjunct():
    [t] = extract_triplets("this week , the who declares a global health emergency")
    assert t == ("the who", "declare.01", "a global health emergency")


def test_extract_compound_sentence():
    triplets = extract_triplets(
        "the ever given blocks the suez canal and the long backlog delays global shipping")
    assert triplets == [
        ("the ever given", "block.01", "the suez canal"),
        ("the long backlog", "delay.01", "global shipping"),
    ]


def test_extract_prefers_marked_verb_over_base_homograph():
    [t] = extract_triplets("washington state records the first american death")
    assert t[1] == "record.01"


def test_extract_no_verb_yields_nothing():
    assert extract_triplets("purple monkeys everywhere") == []


# ---------------------------------------------------------------------------
# paraphraser
# ---------------------------------------------------------------------------

def test_paraphrases_distinct_and_extractable():
    text = "the who declares a global health emergency"
    variants = paraphrase_sentence(text, 8, seed=3)
    assert len(variants) == 8
    assert len(set(variants)) == 8
    assert text not in variants
    for v in variants:
        assert extract_triplets(v), v


def test_paraphrase_zero_requested():
    assert paraphrase_sentence("the who declares a global health emergency", 0) == []


def test_paraphrase_unparseable_sentence_rejected():
    with pytest.raises(SynthError, match="triplet"):
        paraphrase_sentence("purple monkeys everywhere", 4)


# ---------------------------------------------------------------------------
# pool
# ---------------------------------------------------------------------------

def test_pool_sizes(pool):
    assert len(pool.reference_events) == 22
    assert len(pool.reference_narratives) == 197
    assert len(pool.noise_events) == 100
    assert all(len(e.narratives) == 1 for e in pool.noise_events)
    assert len(pool.noise_fragments) == 104
    assert all(len(n.triplets) >= 1
               for n in pool.reference_narratives + pool.noise_narratives)


def test_pool_split_for_interval_sampling(pool):
    assert len(pool.early_events()) >= 3
    assert len(pool.late_events()) >= 3
    assert len(pool.early_events()) + len(pool.late_events()) == 22


def test_pool_without_paraphrases():
    pool = build_pool(paraphrases_per_event=0, target_total=None)
    assert len(pool.reference_narratives) == 22
    assert all(n.variant == 0 for n in pool.reference_narratives)


def test_pool_trim_unreachable_target():
    with pytest.raises(SynthError, match="target"):
        build_pool(paraphrases_per_event=0, target_total=197)


# ---------------------------------------------------------------------------
# noise runs
# ---------------------------------------------------------------------------

def test_noise_run_zero_ratio_is_all_reference(pool):
    run = gen_noise_run(pool, 0.0, seed=1)
    assert all(k == "reference" for day in run.manifest["kinds"] for k in day)
    assert len(run.docs) == 2000


def test_noise_run_ratio_half_composition(pool):
    run = gen_noise_run(pool, 0.5, seed=1)
    for day_kinds in run.manifest["kinds"]:
        c = Counter(day_kinds)
        assert c["noise"] == 100 and c["reference"] == 100


def test_noise_run_same_seed_byte_identical(pool, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    gen_noise_run(pool, 0.3, seed=9).write(a)
    gen_noise_run(pool, 0.3, seed=9).write(b)
    for name in ("docs.nfv1", "triplets.nfv1", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_noise_run_different_seed_differs(pool):
    a = gen_noise_run(pool, 0.3, seed=1)
    b = gen_noise_run(pool, 0.3, seed=2)
    assert a.manifest["slots"] != b.manifest["slots"]


def test_manifest_rebuild_matches_stream(pool, tmp_path):
    run = gen_noise_run(pool, 0.4, seed=5)
    out = tmp_path / "run"
    run.write(out)
    manifest = json.loads((out / "manifest.json").read_text())
    rebuilt = materialize(manifest, pool)
    rebuilt.write(tmp_path / "rebuilt")
    for name in ("docs.nfv1", "triplets.nfv1"):
        assert (out / name).read_bytes() == (tmp_path / "rebuilt" / name).read_bytes()


def test_noise_run_interval_events_respect_date_split(pool):
    run = gen_noise_run(pool, 0.2, seed=3)
    first, second = run.manifest["interval_events"]
    early = {e.id for e in pool.early_events()}
    late = {e.id for e in pool.late_events()}
    assert set(first) <= early and len(first) == 3
    assert set(second) <= late and len(second) == 3


def test_noise_run_stationary_within_intervals(pool):
    # event draw counts per day should be homogeneous inside an interval
    run = gen_noise_run(pool, 0.0, seed=11)
    first, _ = run.manifest["interval_events"]
    table = []
    for day in range(5):
        refs = [r.split("/")[0] for r in run.manifest["slots"][day]]
        counts = Counter(refs)
        table.append([counts[e] for e in first])
    _, p, _, _ = stats.chi2_contingency(np.array(table))
    assert p > 0.01


def test_documents_and_triplets_files_parse(pool, tmp_path):
    run = gen_noise_run(pool, 0.5, seed=2)
    out = tmp_path / "run"
    run.write(out)
    docs = read_documents(out / "docs.nfv1")
    triplets = read_triplets(out / "triplets.nfv1", docs)
    assert len(docs) == 2000
    assert len(triplets) >= 2000
    assert all(t.timestamp == docs[0].timestamp for t in triplets[:1])


def test_noise_ratio_out_of_range(pool):
    with pytest.raises(SynthError):
        gen_noise_run(pool, 1.0, seed=0)


# ---------------------------------------------------------------------------
# overlap runs
# ---------------------------------------------------------------------------

def test_overlap_zero_ratios_match_noise_free_run(pool):
    a = gen_noise_run(pool, 0.0, seed=4)
    b = gen_overlap_run(pool, 0.0, 0.0, 4, seed=4)
    assert a.docs == b.docs
    assert a.triplets == b.triplets


def test_overlap_full_ratio_composition(pool):
    # d days on each side of the boundary consist entirely of the overlap event
    run = gen_overlap_run(pool, 1.0, 1.0, 4, seed=6)
    kinds = run.manifest["kinds"]
    for day in range(1, 9):
        assert set(kinds[day]) == {"overlap"}, day
    assert set(kinds[0]) == {"reference"}
    assert set(kinds[9]) == {"reference"}
    overlap_event = run.manifest["overlap_event"]
    for day in range(1, 9):
        assert all(r.split("/")[0] == overlap_event for r in run.manifest["slots"][day])


def test_overlap_event_outside_interval_events(pool):
    run = gen_overlap_run(pool, 0.5, 0.5, 2, seed=6)
    first, second = run.manifest["interval_events"]
    assert run.manifest["overlap_event"] not in set(first) | set(second)


def test_overlap_days_bounded(pool):
    with pytest.raises(SynthError, match="overlap_days"):
        gen_overlap_run(pool, 1.0, 1.0, 5, seed=0)


def test_overlap_ratio_rounding(pool):
    run = gen_overlap_run(pool, 0.25, 0.75, 2, seed=8)
    kinds = run.manifest["kinds"]
    assert Counter(kinds[3])["overlap"] == 50
    assert Counter(kinds[5])["overlap"] == 150


# ---------------------------------------------------------------------------
# cluster runs
# ---------------------------------------------------------------------------

def test_cluster_run_no_noise(pool):
    items = gen_cluster_run(pool, 0)
    assert len(items) == 197
    assert len({i.label for i in items}) == 22


def test_cluster_run_full_noise(pool):
    items = gen_cluster_run(pool, 104, seed=2)
    assert len(items) == 301
    noise_labels = [i.label for i in items if i.label.startswith("noise:")]
    assert len(noise_labels) == 104
    assert len(set(noise_labels)) == 104  # all singletons


def test_cluster_run_labels_partition(pool):
    items = gen_cluster_run(pool, 30, seed=3)
    assert len(items) == 227
    assert all(i.label for i in items)


def test_cluster_run_bad_n_noise(pool):
    with pytest.raises(SynthError):
        gen_cluster_run(pool, 105)
