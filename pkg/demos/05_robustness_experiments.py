"""Desk-scale versions of the synthetic robustness studies.

Runs small noise/overlap/clustering grids with the fast naive-Bayes
backend and writes the plot-ready CSV reports. The full grids (random
forest backend, ten seeds) live in the acceptance suite.
"""
import os
import tempfile

from narrshift.changepoint import ClassifierConfig
from narrshift.evalharness import (ChangePointExperimentConfig,
                                   ClusterExperimentConfig,
                                   run_cluster_experiment, run_noise_experiment,
                                   run_overlap_experiment, write_report_csv)
from narrshift.synthgen import build_pool

pool = build_pool()
cfg = ChangePointExperimentConfig(repeats=3,
                                  classifier=ClassifierConfig(backend="naive_bayes"))
out = tempfile.mkdtemp(prefix="narrshift-experiments-")

print("noise robustness (gap in days vs noise ratio, 3 seeds):")
noise = run_noise_experiment(pool, [0.0, 0.3, 0.6, 0.9], cfg)
print("  ratio  classifier  kernel")
for row in noise.rows:
    print(f"  {row['noise_ratio']:5.1f}  {row['classifier_mean_gap']:10.2f}"
          f"  {row['kernel_mean_gap']:6.2f}")
write_report_csv(os.path.join(out, "noise_gaps.csv"), noise.rows)

print("\noverlap shift (mean detected day, change planted at day 5):")
overlap = run_overlap_experiment(pool, [0.0, 1.0], [0.0, 1.0], [2], cfg)
for row in overlap.rows:
    print(f"  a1={row['a1']:.0f} a2={row['a2']:.0f} d={row['overlap_days']}: "
          f"classifier day {row['classifier_mean_day']:.1f}")
write_report_csv(os.path.join(out, "overlap_gaps.csv"), overlap.rows)

print("\nclustering quality vs noise fragments:")
clusters = run_cluster_experiment(pool, ClusterExperimentConfig(noise_sizes=(0, 52, 104)))
print("  noise  clusters  rel-P  rel-R  abs-P  abs-R  coherence")
for row in clusters.rows:
    print(f"  {row['n_noise']:5d}  {row['n_clusters']:8d}"
          f"  {row['relative_precision']:.3f}  {row['relative_recall']:.3f}"
          f"  {row['absolute_precision']:.3f}  {row['absolute_recall']:.3f}"
          f"  {row['mean_coherence']:.3f}")
write_report_csv(os.path.join(out, "cluster_eval.csv"), clusters.rows)

print(f"\nreports written to {out}")
