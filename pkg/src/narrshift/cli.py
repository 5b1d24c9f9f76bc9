"""Command-line pipeline: ingest, detect, cluster, rank, network, export,
synth, eval, and the end-to-end resumable `run`.

Every stage writes into a run directory and records a manifest entry with
a hash of its configuration and inputs; rerunning with nothing changed
skips the stage. Errors exit nonzero with a stage-tagged message.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import replace

from . import __version__, corpus, synthgen
from .changepoint import (ClassifierConfig, SignificanceConfig, detect_tree,
                          load_tree, save_tree)
from .evalharness import (ChangePointExperimentConfig, ClusterExperimentConfig,
                          run_cluster_experiment, run_noise_experiment,
                          run_overlap_experiment, write_report_csv)
from .fragments import (DEFAULT_BRANCHING, DEFAULT_THRESHOLD, FrameMap,
                        HashedNgramEmbedder, VectorTable, aggregate_triplets)
from .network import (build_network, disparity_filter, export_network,
                      find_hubs, load_json_network, overlap_report)
from .significance import CorpusCounts, rank_frames, write_ranked_csv


def _fail(stage: str, exc: Exception) -> int:
    print(f"[{stage}] error: {exc}", file=sys.stderr)
    return 1


def _ensure_out(args) -> str:
    out = args.out or "narrshift-run"
    os.makedirs(out, exist_ok=True)
    return out


def _load_corpus(docs_path, triplets_path=None):
    docs = corpus.read_documents(docs_path)
    triplets = corpus.read_triplets(triplets_path, docs) if triplets_path else []
    return docs, triplets


def _classifier_config(args, seed) -> ClassifierConfig:
    return ClassifierConfig(backend=args.backend, n_trees=args.trees,
                            cv_folds=args.cv_folds, seed=seed)


def _embedding_source(args):
    if getattr(args, "vectors", None):
        return VectorTable.from_file(args.vectors)
    return HashedNgramEmbedder()


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    out = _ensure_out(args)
    warnings = corpus.lint_file(args.docs, "documents")
    docs = corpus.read_documents(args.docs)
    corpus.write_documents(os.path.join(out, "docs.nfv1"), docs)
    n_triplets = 0
    if args.triplets:
        warnings += corpus.lint_file(args.triplets, "triplets")
        triplets = corpus.read_triplets(args.triplets, docs)
        corpus.write_triplets(os.path.join(out, "triplets.nfv1"), triplets)
        n_triplets = len(triplets)
    for w in warnings:
        print(f"[ingest] warning: {w}", file=sys.stderr)
    print(f"[ingest] {len(docs)} documents, {n_triplets} triplets, "
          f"{len(warnings)} warnings -> {out}")
    return 0


def cmd_detect(args) -> int:
    out = _ensure_out(args)
    docs, _ = _load_corpus(args.docs)
    vocab = corpus.build_vocabulary(docs, args.vocab_size)
    X = corpus.featurize(docs, vocab)
    ts = corpus.timestamps(docs)
    sig = None
    if args.significance != "none":
        sig = SignificanceConfig(method=args.significance, seed=args.seed)
    tree = detect_tree(X, ts, _classifier_config(args, args.seed), sig,
                       max_depth=args.max_depth, min_days=args.min_days)
    path = os.path.join(out, "segment_tree.json")
    save_tree(path, tree)
    print(f"[detect] {len(tree.leaves())} time frames -> {path}")
    return 0


def cmd_cluster(args) -> int:
    out = _ensure_out(args)
    docs, triplets = _load_corpus(args.docs, args.triplets)
    frame_map = FrameMap.from_file(args.frame_map) if args.frame_map else FrameMap.bundled()
    result = aggregate_triplets(triplets, _embedding_source(args), frame_map,
                                triplet_threshold=args.threshold,
                                argument_threshold=args.threshold,
                                branching=args.branching)
    result.model.write(os.path.join(out, "clusters.nfv1"))
    corpus.write_triplets(os.path.join(out, "triplets_aggregated.nfv1"), result.triplets)
    stages = ", ".join(f"{name}={count}" for name, count in result.stage_counts)
    print(f"[cluster] unique triplets: {stages} -> {out}")
    return 0


def cmd_rank(args) -> int:
    out = _ensure_out(args)
    docs, triplets = _load_corpus(args.docs, args.triplets)
    tree = load_tree(args.tree)
    rankings = rank_frames(tree, triplets, scheme=args.scheme, k=args.k,
                           target_tag=args.target_tag, reference_tag=args.reference_tag)
    path = os.path.join(out, "ranked_frames.csv")
    write_ranked_csv(path, rankings)
    print(f"[rank] {len(rankings)} frames, top {args.k} each -> {path}")
    return 0


def _scored_frames(tree, triplets, args):
    return rank_frames(tree, triplets, scheme=args.scheme, k=args.k,
                       target_tag=args.target_tag, reference_tag=args.reference_tag)


def cmd_network(args) -> int:
    out = _ensure_out(args)
    docs, triplets = _load_corpus(args.docs, args.triplets)
    tree = load_tree(args.tree)
    rankings = rank_frames(tree, triplets, scheme=args.scheme, k=max(args.k, 10000),
                           target_tag=args.target_tag, reference_tag=args.reference_tag)
    top = rank_frames(tree, triplets, scheme=args.scheme, k=args.k,
                      target_tag=args.target_tag, reference_tag=args.reference_tag)
    if args.frame is None:
        best: dict = {}
        support: dict = {}
        for ranking in rankings:
            for item in ranking.items:
                if item.score > best.get(item.key, 0.0):
                    best[item.key] = item.score
                support[item.key] = support.get(item.key, 0) + item.target_freq
        scored = [(key, best[key], support[key]) for key in sorted(best)]
        net = build_network(scored, mode="global")
        alpha = args.global_alpha
        top_items = [i.key for r in top for i in r.items]
        name = "network_global"
    else:
        ranking = rankings[args.frame]
        net = build_network(ranking.items, mode="local",
                            frame=(ranking.start, ranking.end))
        alpha = args.alpha
        top_items = [i.key for i in top[args.frame].items]
        name = f"network_frame{args.frame:02d}"
    backbone = disparity_filter(net, alpha)
    hubs = find_hubs(backbone.backbone())
    kept = overlap_report(backbone, top_items)
    path = os.path.join(out, f"{name}.{args.format}")
    export_network(backbone, path, fmt=args.format, hubs=hubs, top_fragments=top_items)
    print(f"[network] {len(net.edges)} edges, backbone {len(backbone.retained)}, "
          f"{kept}/{len(top_items)} top fragments kept -> {path}")
    return 0


def cmd_export(args) -> int:
    out = _ensure_out(args)
    net = load_json_network(args.graph)
    base = os.path.splitext(os.path.basename(args.graph))[0]
    path = os.path.join(out, f"{base}.{args.format}")
    export_network(net, path, fmt=args.format)
    print(f"[export] -> {path}")
    return 0


def cmd_synth(args) -> int:
    out = _ensure_out(args)
    pool = synthgen.build_pool(args.events, args.noise_events)
    if args.mode == "noise":
        run = synthgen.gen_noise_run(pool, args.noise_ratio, args.seed,
                                     days=args.days, docs_per_day=args.docs_per_day)
    elif args.mode == "overlap":
        run = synthgen.gen_overlap_run(pool, args.a1, args.a2, args.overlap_days,
                                       args.seed, days=args.days,
                                       docs_per_day=args.docs_per_day)
    else:
        items = synthgen.gen_cluster_run(pool, args.n_noise, args.seed)
        path = os.path.join(out, "labeled_fragments.nfv1")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(corpus.FORMAT_HEADER + " labeled-fragments\n")
            for item in items:
                rec = {"text": item.narrative.text, "a0": item.triplet[0],
                       "verb_sense": item.triplet[1], "a1": item.triplet[2],
                       "label": item.label}
                fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
        print(f"[synth] {len(items)} labeled fragments -> {path}")
        return 0
    run.write(out)
    print(f"[synth] {len(run.docs)} documents, {len(run.triplets)} triplets -> {out}")
    return 0


_EVAL_DEFAULTS = {
    "ratios": "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
    "grid": "0,0.5,1",
    "overlap_days": "0,2,4",
    "noise_sizes": "0,26,52,78,104",
    "thresholds": str(DEFAULT_THRESHOLD),
    "repeats": 10,
    "backend": "random_forest",
    "trees": 30,
    "seed": 0,
}


def cmd_eval(args) -> int:
    out = _ensure_out(args)
    # precedence: explicit flag > config file > defaults
    settings = dict(_EVAL_DEFAULTS)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            settings.update(json.load(fh))
    for key in _EVAL_DEFAULTS:
        flag = getattr(args, key)
        if flag is not None:
            settings[key] = flag
    pool = synthgen.build_pool()
    seed = int(settings["seed"])
    cfg = ChangePointExperimentConfig(
        repeats=int(settings["repeats"]), seed=seed,
        classifier=ClassifierConfig(backend=settings["backend"],
                                    n_trees=int(settings["trees"]), seed=seed))

    def numbers(value, cast):
        if isinstance(value, (list, tuple)):
            return [cast(x) for x in value]
        return [cast(x) for x in str(value).split(",")]

    if args.mode == "noise":
        curve = run_noise_experiment(pool, numbers(settings["ratios"], float), cfg)
        path = os.path.join(out, "noise_gaps.csv")
        write_report_csv(path, curve.rows)
    elif args.mode == "overlap":
        grid = numbers(settings["grid"], float)
        days = numbers(settings["overlap_days"], int)
        curve = run_overlap_experiment(pool, grid, grid, days, cfg)
        path = os.path.join(out, "overlap_gaps.csv")
        write_report_csv(path, curve.rows)
    else:
        result = run_cluster_experiment(pool, ClusterExperimentConfig(
            noise_sizes=tuple(numbers(settings["noise_sizes"], int)),
            thresholds=tuple(numbers(settings["thresholds"], float)),
            seed=seed))
        path = os.path.join(out, "cluster_eval.csv")
        write_report_csv(path, result.rows)
    print(f"[eval] -> {path}")
    return 0


# ---------------------------------------------------------------------------
# end-to-end pipeline with manifest-based stage skipping
# ---------------------------------------------------------------------------

_DEFAULT_CONFIG = {
    "docs": None,
    "triplets": None,
    "vectors": None,
    "frame_map": None,
    "seed": 0,
    "vocabulary_size": 5000,
    "changepoint": {"backend": "random_forest", "n_trees": 100, "cv_folds": 5,
                    "max_depth": 3, "min_days": 4, "significance": "permutation"},
    "clustering": {"threshold": DEFAULT_THRESHOLD, "branching": DEFAULT_BRANCHING},
    "ranking": {"scheme": "previous_frame", "k": 15,
                "target_tag": None, "reference_tag": None},
    "network": {"alpha": 0.01, "global_alpha": 1e-7, "formats": ["json", "graphml", "dot"]},
}


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        user = json.load(fh)
    cfg = json.loads(json.dumps(_DEFAULT_CONFIG))
    for key, value in user.items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict):
            cfg[key].update(value)
        else:
            cfg[key] = value
    return cfg


def _sha256(*parts) -> str:
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, bytes):
            h.update(part)
        else:
            h.update(str(part).encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


def _file_hash(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


class _RunManifest:
    def __init__(self, out_dir, config):
        self.path = os.path.join(out_dir, "run_manifest.json")
        self.out_dir = out_dir
        if os.path.exists(self.path):
            with open(self.path, encoding="utf-8") as fh:
                self.data = json.load(fh)
        else:
            self.data = {"version": __version__, "stages": {}}
        self.data["config_hash"] = _sha256(json.dumps(config, sort_keys=True))
        self.data["seed"] = config.get("seed", 0)

    def stage_done(self, name, stage_hash, outputs) -> bool:
        entry = self.data["stages"].get(name)
        if not entry or entry["hash"] != stage_hash:
            return False
        return all(os.path.exists(os.path.join(self.out_dir, p)) for p in outputs)

    def record(self, name, stage_hash, outputs) -> None:
        self.data["stages"][name] = {"hash": stage_hash, "outputs": outputs}
        with open(self.path, "w", encoding="utf-8") as fh:
            json.dump(self.data, fh, sort_keys=True, indent=1)
            fh.write("\n")


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out = args.out or cfg.get("out") or "narrshift-run"
    os.makedirs(out, exist_ok=True)
    manifest = _RunManifest(out, cfg)
    if not cfg["docs"]:
        raise ValueError("config must set 'docs'")

    def path(name):
        return os.path.join(out, name)

    # ingest
    stage_inputs = [_file_hash(cfg["docs"])]
    if cfg["triplets"]:
        stage_inputs.append(_file_hash(cfg["triplets"]))
    stage_hash = _sha256("ingest", *stage_inputs)
    outputs = ["docs.nfv1", "triplets.nfv1"]
    if manifest.stage_done("ingest", stage_hash, outputs):
        print("[run] ingest: skipped (inputs unchanged)")
    else:
        docs = corpus.read_documents(cfg["docs"])
        corpus.write_documents(path("docs.nfv1"), docs)
        triplets = corpus.read_triplets(cfg["triplets"], docs) if cfg["triplets"] else []
        corpus.write_triplets(path("triplets.nfv1"), triplets)
        manifest.record("ingest", stage_hash, outputs)
        print(f"[run] ingest: {len(docs)} documents, {len(triplets)} triplets")

    docs = corpus.read_documents(path("docs.nfv1"))
    triplets = corpus.read_triplets(path("triplets.nfv1"), docs)

    # detect
    cp = cfg["changepoint"]
    stage_hash = _sha256("detect", _file_hash(path("docs.nfv1")),
                         json.dumps(cp, sort_keys=True), cfg["seed"], cfg["vocabulary_size"])
    if manifest.stage_done("detect", stage_hash, ["segment_tree.json"]):
        print("[run] detect: skipped (inputs unchanged)")
    else:
        vocab = corpus.build_vocabulary(docs, cfg["vocabulary_size"])
        X = corpus.featurize(docs, vocab)
        ts = corpus.timestamps(docs)
        clf = ClassifierConfig(backend=cp["backend"], n_trees=cp["n_trees"],
                               cv_folds=cp["cv_folds"], seed=cfg["seed"])
        sig = None
        if cp["significance"] != "none":
            sig = SignificanceConfig(method=cp["significance"], seed=cfg["seed"])
        tree = detect_tree(X, ts, clf, sig, max_depth=cp["max_depth"],
                           min_days=cp["min_days"])
        save_tree(path("segment_tree.json"), tree)
        manifest.record("detect", stage_hash, ["segment_tree.json"])
        print(f"[run] detect: {len(tree.leaves())} time frames")

    tree = load_tree(path("segment_tree.json"))

    # cluster
    cl = cfg["clustering"]
    stage_hash = _sha256("cluster", _file_hash(path("triplets.nfv1")),
                         json.dumps(cl, sort_keys=True), cfg["vectors"], cfg["frame_map"])
    outputs = ["clusters.nfv1", "triplets_aggregated.nfv1"]
    if manifest.stage_done("cluster", stage_hash, outputs):
        print("[run] cluster: skipped (inputs unchanged)")
    else:
        frame_map = FrameMap.from_file(cfg["frame_map"]) if cfg["frame_map"] else FrameMap.bundled()
        source = VectorTable.from_file(cfg["vectors"]) if cfg["vectors"] else HashedNgramEmbedder()
        result = aggregate_triplets(triplets, source, frame_map,
                                    triplet_threshold=cl["threshold"],
                                    argument_threshold=cl["threshold"],
                                    branching=cl["branching"])
        result.model.write(path("clusters.nfv1"))
        corpus.write_triplets(path("triplets_aggregated.nfv1"), result.triplets)
        manifest.record("cluster", stage_hash, outputs)
        print("[run] cluster: " + ", ".join(f"{n}={c}" for n, c in result.stage_counts))

    aggregated = corpus.read_triplets(path("triplets_aggregated.nfv1"), docs)

    # rank
    rk = cfg["ranking"]
    stage_hash = _sha256("rank", _file_hash(path("triplets_aggregated.nfv1")),
                         _file_hash(path("segment_tree.json")), json.dumps(rk, sort_keys=True))
    if manifest.stage_done("rank", stage_hash, ["ranked_frames.csv"]):
        print("[run] rank: skipped (inputs unchanged)")
    else:
        rankings = rank_frames(tree, aggregated, scheme=rk["scheme"], k=rk["k"],
                               target_tag=rk["target_tag"], reference_tag=rk["reference_tag"])
        write_ranked_csv(path("ranked_frames.csv"), rankings)
        manifest.record("rank", stage_hash, ["ranked_frames.csv"])
        print(f"[run] rank: {len(rankings)} frames")

    # network + export
    nw = cfg["network"]
    stage_hash = _sha256("network", _file_hash(path("triplets_aggregated.nfv1")),
                         _file_hash(path("segment_tree.json")),
                         json.dumps(nw, sort_keys=True), json.dumps(rk, sort_keys=True))
    frame_count = len(tree.leaves())
    names = ["network_global"] + [f"network_frame{i:02d}" for i in range(frame_count)]
    outputs = [f"{n}.{fmt}" for n in names for fmt in nw["formats"]]
    if manifest.stage_done("network", stage_hash, outputs):
        print("[run] network: skipped (inputs unchanged)")
    else:
        rankings = rank_frames(tree, aggregated, scheme=rk["scheme"], k=10 ** 9,
                               target_tag=rk["target_tag"], reference_tag=rk["reference_tag"])
        top = rank_frames(tree, aggregated, scheme=rk["scheme"], k=rk["k"],
                          target_tag=rk["target_tag"], reference_tag=rk["reference_tag"])
        overlaps = []
        best: dict = {}
        support: dict = {}
        for ranking in rankings:
            for item in ranking.items:
                if item.score > best.get(item.key, 0.0):
                    best[item.key] = item.score
                support[item.key] = support.get(item.key, 0) + item.target_freq
        nets = [("network_global", build_network(
            [(k, best[k], support[k]) for k in sorted(best)], mode="global"),
            nw["global_alpha"], [i.key for r in top for i in r.items])]
        for i, ranking in enumerate(rankings):
            nets.append((f"network_frame{i:02d}",
                         build_network(ranking.items, mode="local",
                                       frame=(ranking.start, ranking.end)),
                         nw["alpha"], [it.key for it in top[i].items]))
        for name, net, alpha, top_items in nets:
            backbone = disparity_filter(net, alpha)
            hubs = find_hubs(backbone.backbone())
            overlaps.append({"network": name,
                             "edges": len(net.edges),
                             "backbone_edges": len(backbone.retained),
                             "top_fragments_kept": overlap_report(backbone, top_items)})
            for fmt in nw["formats"]:
                export_network(backbone, path(f"{name}.{fmt}"), fmt=fmt,
                               hubs=hubs, top_fragments=top_items)
        write_report_csv(path("network_overlap.csv"), overlaps)
        manifest.record("network", stage_hash, outputs)
        print(f"[run] network: global + {frame_count} local networks")

    print(f"[run] complete -> {out}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(p, with_seed=True):
    p.add_argument("--out", help="output directory (default narrshift-run)")
    if with_seed:
        p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="narrshift",
        description="Collective narrative shift discovery pipeline")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and normalize input files")
    p.add_argument("--docs", required=True)
    p.add_argument("--triplets")
    _add_common(p, with_seed=False)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("detect", help="detect hierarchical change points")
    p.add_argument("--docs", required=True)
    p.add_argument("--max-depth", type=int, default=3)
    p.add_argument("--min-days", type=int, default=4)
    p.add_argument("--backend", choices=["random_forest", "naive_bayes"],
                   default="random_forest")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--cv-folds", type=int, default=5)
    p.add_argument("--vocab-size", type=int, default=5000)
    p.add_argument("--significance", choices=["permutation", "none"],
                   default="permutation")
    _add_common(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("cluster", help="aggregate triplets into clusters")
    p.add_argument("--docs", required=True)
    p.add_argument("--triplets", required=True)
    p.add_argument("--vectors", help="external embedding file (#nfv1 vectors or .npz)")
    p.add_argument("--frame-map", help="verb sense -> frame table (tsv)")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--branching", type=int, default=DEFAULT_BRANCHING)
    _add_common(p, with_seed=False)
    p.set_defaults(func=cmd_cluster)

    def add_rank_args(p):
        p.add_argument("--docs", required=True)
        p.add_argument("--triplets", required=True)
        p.add_argument("--tree", required=True, help="segment tree json")
        p.add_argument("--scheme", choices=["previous_frame", "contrast_corpus"],
                       default="previous_frame")
        p.add_argument("--k", type=int, default=15)
        p.add_argument("--target-tag")
        p.add_argument("--reference-tag")

    p = sub.add_parser("rank", help="rank triplets per time frame")
    add_rank_args(p)
    _add_common(p, with_seed=False)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("network", help="build and filter a narrative network")
    add_rank_args(p)
    p.add_argument("--frame", type=int, help="leaf frame index; omit for global")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--global-alpha", type=float, default=1e-7)
    p.add_argument("--format", choices=["json", "graphml", "dot"], default="json")
    _add_common(p, with_seed=False)
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("export", help="re-export a canonical json network")
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=["dot", "graphml", "json"], required=True)
    _add_common(p, with_seed=False)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("synth", help="generate synthetic corpora")
    p.add_argument("mode", choices=["noise", "overlap", "cluster"])
    p.add_argument("--events", help="reference events tsv (default bundled)")
    p.add_argument("--noise-events", help="noise events tsv (default bundled)")
    p.add_argument("--noise-ratio", type=float, default=0.0)
    p.add_argument("--a1", type=float, default=0.0)
    p.add_argument("--a2", type=float, default=0.0)
    p.add_argument("--overlap-days", type=int, default=0)
    p.add_argument("--n-noise", type=int, default=0)
    p.add_argument("--days", type=int, default=10)
    p.add_argument("--docs-per-day", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="run robustness experiments")
    p.add_argument("mode", choices=["noise", "overlap", "cluster"])
    p.add_argument("--config", help="JSON file with experiment settings")
    p.add_argument("--ratios")
    p.add_argument("--grid")
    p.add_argument("--overlap-days", dest="overlap_days")
    p.add_argument("--noise-sizes", dest="noise_sizes")
    p.add_argument("--thresholds")
    p.add_argument("--repeats", type=int)
    p.add_argument("--backend", choices=["random_forest", "naive_bayes"])
    p.add_argument("--trees", type=int)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - stage-tagged CLI boundary
        return _fail(args.command, exc)


if __name__ == "__main__":
    sys.exit(main())
