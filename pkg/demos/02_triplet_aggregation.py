"""Aggregating narrative triplets: verb frames, clustering, representatives.

Shows the three compression stages on the bundled synthetic event pool:
verb senses map onto coarse frames, near-duplicate triplets collapse into
clusters with a representative each, and argument variants canonicalize.
"""
from collections import Counter

from narrshift.corpus import NarrativeTriplet
from narrshift.fragments import (FrameMap, HashedNgramEmbedder, aggregate_triplets,
                                 apply_frame_map, cluster_triplets)
from narrshift.synthgen import build_pool

pool = build_pool()
frame_map = FrameMap.bundled()
embedder = HashedNgramEmbedder()

triplets = [NarrativeTriplet(a0=a0, verb_sense=sense, a1=a1, doc_id=n.ref, timestamp=0.0)
            for n in pool.reference_narratives for a0, sense, a1 in n.triplets]
print(f"{len(triplets)} raw triplets from {len(pool.reference_narratives)} narratives")

# verb senses from the same family land in one frame
mapped = apply_frame_map(triplets, frame_map)
example = [t for t in mapped if t.verb_sense in ("declare.01", "proclaim.01")][:4]
for t in example:
    print(f"  {t.verb_sense:13s} -> {t.frame:18s} | {t.render()}")

# clustering groups paraphrase variants under one representative
model = cluster_triplets(mapped, embedder)
print(f"\n{len(model.assignment)} unique triplets -> {len(model.representatives)} clusters")
largest = Counter(model.assignment.values()).most_common(3)
for cluster_id, size in largest:
    rep = " ".join(model.representatives[cluster_id])
    print(f"  cluster {cluster_id:3d} ({size:3d} unique): rep = {rep!r}")

# full pipeline: counts can only shrink
result = aggregate_triplets(triplets, embedder, frame_map)
print("\nstage counts:", " -> ".join(f"{name} {count}" for name, count in result.stage_counts))
