"""Narrative networks: build, backbone-filter, classify hubs, export.

Nodes are argument strings; each edge is one unique (agent, frame, patient)
triplet carrying its log-odds weight. The disparity filter keeps edges that
are statistically surprising relative to uniform weight splitting at either
endpoint.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from xml.sax.saxutils import escape, quoteattr


class NetworkError(ValueError):
    pass


@dataclass(frozen=True)
class NetworkEdge:
    source: str
    target: str
    frame: str
    weight: float
    support: int = 1

    def key(self) -> tuple:
        return (self.source, self.frame, self.target)


@dataclass
class NarrativeNetwork:
    """Directed multigraph; parallel edges must carry distinct frames."""

    mode: str = "global"
    frame_start: float | None = None
    frame_end: float | None = None
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)

    def add_edge(self, edge: NetworkEdge) -> None:
        if not edge.source or not edge.target:
            raise NetworkError("edge endpoints must be non-empty strings")
        for existing in self.edges:
            if existing.key() == edge.key():
                raise NetworkError(f"duplicate edge {edge.key()}")
        for name in (edge.source, edge.target):
            if name not in self._node_set:
                self._node_set.add(name)
                self.nodes.append(name)
        self.edges.append(edge)

    def __post_init__(self):
        self._node_set = set(self.nodes)

    def degree(self, node: str) -> int:
        return sum(1 for e in self.edges if e.source == node) + \
            sum(1 for e in self.edges if e.target == node)

    def subgraph(self, edges: list) -> "NarrativeNetwork":
        sub = NarrativeNetwork(mode=self.mode, frame_start=self.frame_start,
                               frame_end=self.frame_end)
        for e in edges:
            sub.add_edge(e)
        return sub


def build_network(scored, mode: str = "global",
                  frame: tuple[float, float] | None = None) -> NarrativeNetwork:
    """Network from scored triplets; non-positive weights are dropped.

    ``scored`` yields (key, score, support) tuples or objects with ``key``,
    ``score`` and ``target_freq`` attributes (significance output).
    """
    start, end = frame if frame is not None else (None, None)
    net = NarrativeNetwork(mode=mode, frame_start=start, frame_end=end)
    for item in scored:
        if isinstance(item, tuple):
            key, score, support = item
        else:
            key, score, support = item.key, item.score, item.target_freq
        if score <= 0:
            continue
        a0, frame_label, a1 = key
        net.add_edge(NetworkEdge(source=a0, target=a1, frame=frame_label,
                                 weight=float(score), support=int(support)))
    return net


# ---------------------------------------------------------------------------
# disparity filter
# ---------------------------------------------------------------------------

@dataclass
class BackboneResult:
    network: NarrativeNetwork
    retained: list
    alphas: dict        # edge key -> (alpha at source/out, alpha at target/in)
    alpha: float

    def backbone(self) -> NarrativeNetwork:
        return self.network.subgraph(self.retained)


def _directional_alphas(edges: list, endpoint) -> dict:
    """alpha = (1 - w/strength)^(degree-1) per edge within each group.

    Degree-1 groups yield None: a single edge at an endpoint carries no
    evidence either way.
    """
    groups: dict[str, list] = {}
    for e in edges:
        groups.setdefault(endpoint(e), []).append(e)
    alphas = {}
    for group in groups.values():
        k = len(group)
        strength = sum(e.weight for e in group)
        for e in group:
            if k < 2:
                alphas[e.key()] = None
            else:
                p = e.weight / strength
                alphas[e.key()] = (1.0 - p) ** (k - 1)
    return alphas


def disparity_filter(net: NarrativeNetwork, alpha: float) -> BackboneResult:
    """Multiscale backbone of a weighted directed network.

    An edge survives if its disparity p-value beats ``alpha`` at either its
    source (among out-edges) or its target (among in-edges). Edges whose
    both endpoints have directional degree one are untestable and are kept
    only when ``alpha >= 0.5`` (documented convention), which preserves
    backbone nesting across alphas.
    """
    if not 0 < alpha < 1:
        raise NetworkError("alpha must be in (0, 1)")
    for e in net.edges:
        if e.weight <= 0:
            raise NetworkError(f"non-positive weight on {e.key()}")
    out_alpha = _directional_alphas(net.edges, lambda e: e.source)
    in_alpha = _directional_alphas(net.edges, lambda e: e.target)
    retained = []
    alphas = {}
    for e in net.edges:
        a_out = out_alpha[e.key()]
        a_in = in_alpha[e.key()]
        alphas[e.key()] = (a_out, a_in)
        if a_out is None and a_in is None:
            keep = alpha >= 0.5
        else:
            keep = (a_out is not None and a_out < alpha) or \
                   (a_in is not None and a_in < alpha)
        if keep:
            retained.append(e)
    return BackboneResult(network=net, retained=retained, alphas=alphas, alpha=alpha)


def find_hubs(net: NarrativeNetwork, major: int = 10, minor: int = 5) -> dict:
    """Label nodes by total degree: major (>= 10), minor ([5, 10)), plain."""
    labels = {}
    for node in net.nodes:
        deg = net.degree(node)
        if deg >= major:
            labels[node] = "major"
        elif deg >= minor:
            labels[node] = "minor"
        else:
            labels[node] = "plain"
    return labels


def overlap_report(backbone: NarrativeNetwork | BackboneResult, top_fragments) -> int:
    """How many top-ranked fragments survive as backbone edges."""
    if isinstance(backbone, BackboneResult):
        kept = {e.key() for e in backbone.retained}
    else:
        kept = {e.key() for e in backbone.edges}
    keys = [item if isinstance(item, tuple) else item.key for item in top_fragments]
    return sum(1 for key in keys if key in kept)


# ---------------------------------------------------------------------------
# export / import
# ---------------------------------------------------------------------------

def _sorted_edges(edges):
    return sorted(edges, key=lambda e: e.key())


def _export_payload(net: NarrativeNetwork, hubs: dict | None,
                    top_fragments: set) -> dict:
    return {
        "format": "narrative-network/v1",
        "mode": net.mode,
        "frame_start": net.frame_start,
        "frame_end": net.frame_end,
        "nodes": [
            {"id": n, "hub": (hubs or {}).get(n, "plain")} for n in sorted(net.nodes)
        ],
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "frame": e.frame,
                "weight": e.weight,
                "support": e.support,
                "top_fragment": e.key() in top_fragments,
            }
            for e in _sorted_edges(net.edges)
        ],
    }


def export_network(net: NarrativeNetwork | BackboneResult, path, fmt: str = "json",
                   hubs: dict | None = None, top_fragments=None) -> None:
    """Write dot / graphml / json. JSON round-trips losslessly.

    When exporting a backbone, top-ranked fragment edges are force-included
    with a distinct flag so isolated top narratives stay visible; they are
    not counted as backbone members by :func:`overlap_report`.
    """
    top_keys = set()
    if top_fragments:
        top_keys = {i if isinstance(i, tuple) else i.key for i in top_fragments}
    if isinstance(net, BackboneResult):
        kept = {e.key() for e in net.retained}
        edges = [replace(e, weight=e.weight) for e in net.network.edges
                 if e.key() in kept or e.key() in top_keys]
        graph = net.network.subgraph(edges)
    else:
        graph = net
    if hubs is None:
        hubs = find_hubs(graph)
    if fmt == "json":
        payload = _export_payload(graph, hubs, top_keys)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, sort_keys=True,
                      separators=(",", ": "), indent=1)
            fh.write("\n")
    elif fmt == "dot":
        _write_dot(graph, path, hubs, top_keys)
    elif fmt == "graphml":
        _write_graphml(graph, path, hubs, top_keys)
    else:
        raise NetworkError(f"unknown export format {fmt!r}")


def load_json_network(path) -> NarrativeNetwork:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != "narrative-network/v1":
        raise NetworkError(f"{path}: not a narrative network file")
    net = NarrativeNetwork(mode=payload["mode"], frame_start=payload["frame_start"],
                           frame_end=payload["frame_end"])
    for rec in payload["edges"]:
        net.add_edge(NetworkEdge(source=rec["source"], target=rec["target"],
                                 frame=rec["frame"], weight=rec["weight"],
                                 support=rec["support"]))
    for node in payload["nodes"]:
        if node["id"] not in net._node_set:
            net._node_set.add(node["id"])
            net.nodes.append(node["id"])
    net.nodes = sorted(net.nodes)
    return net


_DOT_HUB_COLOR = {"major": "red", "minor": "black", "plain": "gray"}


def _write_dot(net, path, hubs, top_keys) -> None:
    lines = ["digraph narrative {"]
    for n in sorted(net.nodes):
        color = _DOT_HUB_COLOR[hubs.get(n, "plain")]
        lines.append(f'  "{_dot_escape(n)}" [color={color}, hub={hubs.get(n, "plain")}];')
    for e in _sorted_edges(net.edges):
        attrs = f'label="{_dot_escape(e.frame)}", weight={e.weight:.6f}'
        if e.key() in top_keys:
            attrs += ", top_fragment=true, color=orange"
        lines.append(f'  "{_dot_escape(e.source)}" -> "{_dot_escape(e.target)}" [{attrs}];')
    lines.append("}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


_GRAPHML_KEYS = [
    ("hub", "node", "string"),
    ("frame", "edge", "string"),
    ("weight", "edge", "double"),
    ("support", "edge", "int"),
    ("top_fragment", "edge", "boolean"),
]


def _write_graphml(net, path, hubs, top_keys) -> None:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
    ]
    for name, domain, kind in _GRAPHML_KEYS:
        lines.append(f'  <key id="{name}" for="{domain}" attr.name="{name}" attr.type="{kind}"/>')
    lines.append('  <graph id="narrative" edgedefault="directed">')
    for n in sorted(net.nodes):
        lines.append(f"    <node id={quoteattr(n)}>")
        lines.append(f'      <data key="hub">{escape(hubs.get(n, "plain"))}</data>')
        lines.append("    </node>")
    for e in _sorted_edges(net.edges):
        lines.append(f"    <edge source={quoteattr(e.source)} target={quoteattr(e.target)}>")
        lines.append(f'      <data key="frame">{escape(e.frame)}</data>')
        lines.append(f'      <data key="weight">{e.weight:.12g}</data>')
        lines.append(f'      <data key="support">{e.support}</data>')
        lines.append(f'      <data key="top_fragment">{"true" if e.key() in top_keys else "false"}</data>')
        lines.append("    </edge>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
