"""Per-time-frame triplet ranking by log-odds with informative priors.

A triplet's score contrasts its smoothed rate in a target slice against a
reference slice, with a background corpus acting as the prior. Positive
scores mean over-represented in the target.
"""
from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field

from .changepoint import SegmentNode
from .corpus import NarrativeTriplet


class SignificanceError(ValueError):
    pass


@dataclass
class CorpusCounts:
    """Triplet frequencies for one corpus slice."""

    counts: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    def freq(self, key) -> int:
        return self.counts.get(key, 0)

    @classmethod
    def from_triplets(cls, triplets) -> "CorpusCounts":
        return cls(dict(Counter(t.key() for t in triplets)))


@dataclass(frozen=True)
class SignificanceScore:
    key: tuple
    score: float
    target_freq: int
    reference_freq: int


def log_odds(target: CorpusCounts, reference: CorpusCounts, background: CorpusCounts,
             paper_literal: bool = False) -> list[SignificanceScore]:
    """Log-odds with the background as an informative Dirichlet prior.

    For each triplet in the union of the three slices:

        score = ln((f_T + f_B) / (n_T + n_B - f_T - f_B))
              - ln((f_R + f_B) / (n_R + n_B - f_R - f_B))

    ``paper_literal=True`` flips the sign of the trailing f_B in both
    denominators (the printed variant of the formula); the default is the
    canonical form. Scores come back sorted by key; every slice must be
    large enough to keep denominators positive, and the background must
    cover every scored triplet (scores stay finite).
    """
    if background.n == 0:
        raise SignificanceError("background too small: no triplets")
    n_t, n_r, n_b = target.n, reference.n, background.n
    keys = {k for c in (target, reference, background)
            for k, v in c.counts.items() if v > 0}
    out = []
    for key in sorted(keys):
        f_t, f_r, f_b = target.freq(key), reference.freq(key), background.freq(key)
        if paper_literal:
            den_t = n_t + n_b - f_t + f_b
            den_r = n_r + n_b - f_r + f_b
        else:
            den_t = n_t + n_b - f_t - f_b
            den_r = n_r + n_b - f_r - f_b
        if den_t <= 0 or den_r <= 0:
            raise SignificanceError(f"background too small: nonpositive denominator for {key}")
        if f_t + f_b <= 0 or f_r + f_b <= 0:
            raise SignificanceError(f"background too small: {key} absent from background")
        score = math.log((f_t + f_b) / den_t) - math.log((f_r + f_b) / den_r)
        out.append(SignificanceScore(key=key, score=score, target_freq=f_t, reference_freq=f_r))
    return out


# ---------------------------------------------------------------------------
# per-frame ranking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrameRanking:
    start: float
    end: float
    items: tuple  # SignificanceScore, ranked


def _slice(triplets, start, end):
    return [t for t in triplets if start <= t.timestamp < end]


def _top_k(scores: list[SignificanceScore], k: int) -> tuple:
    ranked = sorted(scores, key=lambda s: (-s.score, -s.target_freq, " ".join(s.key)))
    return tuple(ranked[:k])


def rank_frames(tree: SegmentNode, triplets: list[NarrativeTriplet],
                scheme: str = "previous_frame", k: int = 15,
                subcorpus_key: str = "subcorpus",
                target_tag: str | None = None, reference_tag: str | None = None,
                paper_literal: bool = False) -> list[FrameRanking]:
    """Top-k triplets per leaf time frame.

    ``previous_frame``: the reference is the preceding frame (the first
    frame falls back to the rest of the corpus) and the background is the
    whole corpus. ``contrast_corpus``: target and reference are two
    meta-tagged subcorpora inside the same frame, and the background is
    everything within that frame.
    """
    frames = sorted(tree.leaves(), key=lambda f: f.start)
    out = []
    if scheme == "previous_frame":
        background = CorpusCounts.from_triplets(triplets)
        for i, frame in enumerate(frames):
            in_frame = _slice(triplets, frame.start, frame.end)
            target = CorpusCounts.from_triplets(in_frame)
            if i == 0:
                rest = [t for t in triplets if not (frame.start <= t.timestamp < frame.end)]
                reference = CorpusCounts.from_triplets(rest)
            else:
                prev = frames[i - 1]
                reference = CorpusCounts.from_triplets(_slice(triplets, prev.start, prev.end))
            scores = log_odds(target, reference, background, paper_literal)
            present = [s for s in scores if s.target_freq > 0]
            out.append(FrameRanking(frame.start, frame.end, _top_k(present, k)))
    elif scheme == "contrast_corpus":
        if not target_tag or not reference_tag:
            raise ValueError("contrast_corpus scheme needs target_tag and reference_tag")
        for frame in frames:
            in_frame = _slice(triplets, frame.start, frame.end)
            target = CorpusCounts.from_triplets(
                t for t in in_frame if t.meta.get(subcorpus_key) == target_tag)
            reference = CorpusCounts.from_triplets(
                t for t in in_frame if t.meta.get(subcorpus_key) == reference_tag)
            background = CorpusCounts.from_triplets(in_frame)
            scores = log_odds(target, reference, background, paper_literal)
            present = [s for s in scores if s.target_freq > 0]
            out.append(FrameRanking(frame.start, frame.end, _top_k(present, k)))
    else:
        raise ValueError(f"unknown ranking scheme {scheme!r}")
    return out


def write_ranked_csv(path, rankings: list[FrameRanking]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_start", "frame_end", "rank", "triplet", "score",
                         "target_freq", "reference_freq"])
        for ranking in rankings:
            for rank, item in enumerate(ranking.items, start=1):
                writer.writerow([
                    f"{ranking.start:.0f}", f"{ranking.end:.0f}", rank,
                    " ".join(item.key), f"{item.score:.6f}",
                    item.target_freq, item.reference_freq,
                ])
