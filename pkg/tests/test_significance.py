import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from narrshift.changepoint import SegmentNode
from narrshift.corpus import DAY_SECONDS, NarrativeTriplet
from narrshift.significance import (CorpusCounts, SignificanceError, log_odds,
                                    rank_frames, write_ranked_csv)


def counts(**kv):
    return CorpusCounts({(k, "F", k): v for k, v in kv.items()})


def single(key_name, f_t, n_rest_t, f_r, n_rest_r, f_b, n_rest_b):
    """One shared triplet plus filler mass to reach the slice sizes."""
    key = (key_name, "F", key_name)
    filler = ("filler", "F", "filler")
    t = CorpusCounts({key: f_t, filler: n_rest_t})
    r = CorpusCounts({key: f_r, filler: n_rest_r})
    b = CorpusCounts({key: f_b, filler: n_rest_b})
    return key, t, r, b


def test_identical_slices_score_zero():
    t = counts(a=3, b=5)
    scores = log_odds(t, t, counts(a=10, b=10))
    assert all(s.score == 0.0 for s in scores)


def test_worked_example_matches_formula():
    key, t, r, b = single("w", 3, 7, 1, 9, 4, 16)
    scores = {s.key: s.score for s in log_odds(t, r, b)}
    # ln(7/23) - ln(5/25)
    assert scores[key] == pytest.approx(math.log(7 / 23) - math.log(5 / 25), abs=1e-12)
    assert scores[key] == pytest.approx(0.41985, abs=1e-4)


def test_swap_negates_exactly():
    key, t, r, b = single("w", 3, 7, 1, 9, 4, 16)
    forward = {s.key: s.score for s in log_odds(t, r, b)}
    backward = {s.key: s.score for s in log_odds(r, t, b)}
    for k in forward:
        assert forward[k] == -backward[k]


def test_paper_literal_variant_changes_denominator():
    key, t, r, b = single("w", 3, 7, 1, 9, 4, 16)
    [score] = [s for s in log_odds(t, r, b, paper_literal=True) if s.key == key]
    expected = math.log(7 / (10 + 20 - 3 + 4)) - math.log(5 / (10 + 20 - 1 + 4))
    assert score.score == pytest.approx(expected, abs=1e-12)


def test_absent_from_background_rejected():
    t = CorpusCounts({("only", "F", "t"): 2})
    r = CorpusCounts({})
    b = CorpusCounts({("other", "F", "x"): 5})
    with pytest.raises(SignificanceError, match="background"):
        log_odds(t, r, b)


def test_empty_background_rejected():
    with pytest.raises(SignificanceError, match="background"):
        log_odds(counts(a=1), counts(a=1), CorpusCounts({}))


def test_absent_triplet_does_not_shift_other_scores():
    # a triplet with zero frequency everywhere is not scored and changes nothing
    key, t, r, b = single("w", 3, 7, 1, 9, 4, 16)
    base = {s.key: s.score for s in log_odds(t, r, b)}
    t2 = CorpusCounts(dict(t.counts))
    t2.counts[("new", "F", "new")] = 0
    richer = {s.key: s.score for s in log_odds(t2, r, b)}
    assert richer == base
    assert ("new", "F", "new") not in richer


count_strategy = st.integers(min_value=0, max_value=40)


@settings(max_examples=80, deadline=None)
@given(count_strategy, count_strategy, count_strategy, count_strategy,
       st.integers(min_value=1, max_value=40), count_strategy)
def test_monotone_in_target_frequency(f_t, f_r, rest_t, rest_r, f_b, rest_b):
    key, t, r, b = single("w", f_t, rest_t + 1, f_r, rest_r + 1, f_b, rest_b + 1)
    low = {s.key: s.score for s in log_odds(t, r, b)}[key]
    t.counts[key] = f_t + 1
    high = {s.key: s.score for s in log_odds(t, r, b)}[key]
    assert high > low


# ---------------------------------------------------------------------------
# per-frame ranking
# ---------------------------------------------------------------------------

def frame_tree(n_frames, day_span=2):
    root = SegmentNode(start=0.0, end=n_frames * day_span * DAY_SECONDS, level=1)
    if n_frames == 1:
        return root
    nodes = [SegmentNode(start=i * day_span * DAY_SECONDS,
                         end=(i + 1) * day_span * DAY_SECONDS, level=2)
             for i in range(n_frames)]
    root.tau = nodes[1].start
    root.gain = 0.5
    root.children = nodes
    return root


def trip(a0, a1, day, tag=None):
    meta = {"subcorpus": tag} if tag else {}
    return NarrativeTriplet(a0=a0, verb_sense="v.01", a1=a1, doc_id="d",
                            timestamp=day * DAY_SECONDS, frame="F", meta=meta)


def test_frame_exclusive_triplet_scores_positive():
    tree = frame_tree(2)
    triplets = [trip("common", "x", 0)] * 5 + [trip("common", "x", 2)] * 5 \
        + [trip("unique", "y", 2)] * 3
    rankings = rank_frames(tree, triplets, scheme="previous_frame", k=15)
    second = {s.key: s.score for s in rankings[1].items}
    assert second[("unique", "F", "y")] > 0
    assert rankings[1].items[0].key == ("unique", "F", "y")


def test_first_frame_uses_rest_of_corpus_as_reference():
    tree = frame_tree(2)
    triplets = [trip("early", "x", 0)] * 4 + [trip("late", "y", 2)] * 4
    rankings = rank_frames(tree, triplets, scheme="previous_frame", k=15)
    first = {s.key: s.score for s in rankings[0].items}
    assert first[("early", "F", "x")] > 0


def test_default_k_is_15():
    tree = frame_tree(2)
    triplets = [trip(f"a{i}", f"b{i}", 0) for i in range(40)] \
        + [trip(f"c{i}", f"d{i}", 2) for i in range(40)]
    rankings = rank_frames(tree, triplets)
    assert all(len(r.items) == 15 for r in rankings)


def test_contrast_identical_slices_fall_back_to_frequency():
    tree = frame_tree(1)
    triplets = []
    for tag in ("macron", "lepen"):
        triplets += [trip("big", "x", 0, tag)] * 6 + [trip("small", "y", 0, tag)] * 2
    rankings = rank_frames(tree, triplets, scheme="contrast_corpus",
                           target_tag="macron", reference_tag="lepen")
    items = rankings[0].items
    assert all(s.score == 0.0 for s in items)
    assert items[0].key == ("big", "F", "x")   # frequency breaks the tie
    assert items[1].key == ("small", "F", "y")


def test_contrast_requires_tags():
    tree = frame_tree(1)
    with pytest.raises(ValueError, match="target_tag"):
        rank_frames(tree, [trip("a", "b", 0)], scheme="contrast_corpus")


def test_unknown_scheme_rejected():
    tree = frame_tree(1)
    with pytest.raises(ValueError, match="scheme"):
        rank_frames(tree, [trip("a", "b", 0)], scheme="nope")


def test_ranked_csv_output(tmp_path):
    tree = frame_tree(2)
    triplets = [trip("a", "x", 0)] * 3 + [trip("b", "y", 2)] * 3
    rankings = rank_frames(tree, triplets, k=5)
    path = tmp_path / "ranked.csv"
    write_ranked_csv(path, rankings)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "frame_start,frame_end,rank,triplet,score,target_freq,reference_freq"
    assert len(lines) > 2
