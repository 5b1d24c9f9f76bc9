"""Ranking narrative fragments per time frame with prior-smoothed log-odds.

Detects the time frames of a synthetic run, then ranks each frame's
triplets against the previous frame with the whole corpus as the prior.
The top fragments of the second frame are the newly arrived narratives.
"""
from narrshift.changepoint import ClassifierConfig, detect_tree
from narrshift.corpus import DAY_SECONDS, build_vocabulary, featurize, timestamps
from narrshift.fragments import FrameMap, apply_frame_map
from narrshift.significance import rank_frames
from narrshift.synthgen import build_pool, gen_noise_run

pool = build_pool()
run = gen_noise_run(pool, noise_ratio=0.2, seed=7)
vocab = build_vocabulary(run.docs)
X = featurize(run.docs, vocab)
ts = timestamps(run.docs)

tree = detect_tree(X, ts, ClassifierConfig(backend="naive_bayes"), sig=None,
                   max_depth=1, min_days=4)
frames = tree.leaves()
print(f"{len(frames)} time frames detected "
      f"(split at day {(tree.tau - run.span[0]) / DAY_SECONDS:.0f})")

triplets = apply_frame_map(run.triplets, FrameMap.bundled())
rankings = rank_frames(tree, triplets, scheme="previous_frame", k=5)

for ranking in rankings:
    start = (ranking.start - run.span[0]) / DAY_SECONDS
    end = (ranking.end - run.span[0]) / DAY_SECONDS
    print(f"\nframe days {start:.0f}-{end:.0f}, top {len(ranking.items)} fragments:")
    for rank, item in enumerate(ranking.items, 1):
        print(f"  {rank}. score {item.score:+.3f}  f_T={item.target_freq:4d}  "
              f"{' | '.join(item.key)}")
