"""Building a narrative network and extracting its disparity backbone.

A weighted directed multigraph is assembled from scored triplets, the
multiscale backbone filter keeps statistically surprising edges, hubs are
labeled by degree, and the graph is exported to dot/graphml/json.
"""
import os
import tempfile

from narrshift.network import (build_network, disparity_filter, export_network,
                               find_hubs, overlap_report)

# scored triplets: (agent, frame, patient), log-odds weight, frequency
scored = [
    (("people", "REQUIRE_NEED_WANT_HOPE", "stay home"), 1.4, 80),
    (("people", "FOLLOW_SUPPORT_SPONSOR_FUND", "the administration"), 0.2, 11),
    (("people", "CRITICIZE", "the response"), 0.9, 40),
    (("people", "REQUIRE_NEED_WANT_HOPE", "tests"), 0.3, 14),
    (("the administration", "FOLLOW_SUPPORT_SPONSOR_FUND", "people"), 1.1, 52),
    (("the administration", "AUTHORIZE_ADMIT", "infected americans"), 0.5, 17),
    (("the virus", "KILL", "thousands"), 2.0, 120),
    (("the virus", "REACH", "every state"), 1.2, 66),
    (("grocery stores", "BEGIN", "clearing out"), 0.8, 25),
    (("scientists", "CREATE_MATERIALIZE", "a vaccine"), -0.4, 9),  # dropped: negative
]
net = build_network(scored, mode="global")
print(f"network: {len(net.nodes)} nodes, {len(net.edges)} edges "
      f"(negative-weight fragments dropped)")

backbone = disparity_filter(net, alpha=0.35)
print(f"backbone at alpha=0.35: {len(backbone.retained)} edges kept")
for edge in backbone.retained:
    a_out, a_in = backbone.alphas[edge.key()]
    fmt = lambda a: "-" if a is None else f"{a:.3f}"
    print(f"  {edge.source} -[{edge.frame}]-> {edge.target}  "
          f"(alpha out {fmt(a_out)}, in {fmt(a_in)})")

hubs = find_hubs(backbone.backbone())
print("hubs:", {n: h for n, h in hubs.items() if h != "plain"} or "none at this size")

top = [key for key, score, _ in scored[:3]]
print(f"top fragments surviving the backbone: {overlap_report(backbone, top)}/{len(top)}")

out = tempfile.mkdtemp(prefix="narrshift-demo-")
for fmt in ("json", "graphml", "dot"):
    export_network(backbone, os.path.join(out, f"backbone.{fmt}"), fmt=fmt,
                   top_fragments=top)
print(f"exports written to {out}: {sorted(os.listdir(out))}")
