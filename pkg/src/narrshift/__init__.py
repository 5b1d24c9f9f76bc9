"""Collective narrative shift discovery for timestamped text corpora.

The pipeline detects distribution changes in a document stream by training
before/after classifiers at candidate boundaries, aggregates (agent, verb
frame, patient) narrative fragments with BIRCH clustering, ranks fragments
per time frame by prior-smoothed log-odds, and extracts backbone narrative
networks. A deterministic synthetic-data harness reproduces the robustness
experiments end to end.
"""

__version__ = "0.1.0"

from .corpus import (Document, FeatureVector, NarrativeTriplet, Vocabulary,
                     build_vocabulary, featurize, read_documents, read_triplets,
                     tfidf_transform, tokenize, write_documents, write_triplets)
from .changepoint import (ClassifierConfig, SegmentNode, SignificanceConfig,
                          TrialScore, baseline_kernel_cpd, detect_segment,
                          detect_tree, score_trial)
from .birch import CFTree, ClusteringFeature, birch_fit
from .fragments import (ClusterModel, FrameMap, HashedNgramEmbedder, VectorTable,
                        aggregate_triplets, apply_frame_map, canonicalize_arguments,
                        choose_representative, cluster_triplets, dbscan_cluster,
                        kmeans_cluster)
from .significance import CorpusCounts, SignificanceScore, log_odds, rank_frames
from .network import (BackboneResult, NarrativeNetwork, NetworkEdge, build_network,
                      disparity_filter, export_network, find_hubs, load_json_network,
                      overlap_report)
from .synthgen import (EventPool, build_pool, extract_triplets, gen_cluster_run,
                       gen_noise_run, gen_overlap_run, materialize,
                       paraphrase_sentence)
from .evalharness import (absolute_match, coherence, relative_pr,
                          run_cluster_experiment, run_noise_experiment,
                          run_overlap_experiment)
