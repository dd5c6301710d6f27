"""
Graphviz DOT export of an e-graph for debugging.

One `cluster_<id>` subgraph per canonical class, labelled with the class id
and interval; one box per e-node labelled with its operator or payload; one
edge per child reference from the e-node to an anchor node inside the child
cluster (`compound=true` draws it to the cluster border).
"""

from typing import Dict, List, Tuple

from services.graph.egraph import EGraph


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: EGraph) -> str:
    lines: List[str] = [
        "digraph egraph {",
        "  compound=true;",
        "  clusterrank=local;",
        "  node [shape=box, fontname=monospace];",
    ]
    anchors: Dict[int, str] = {}
    edges: List[Tuple[str, int, int]] = []
    for eclass in g.classes():
        cid = eclass.id
        lines.append(f"  subgraph cluster_{cid} {{")
        lines.append("    style=dotted;")
        lines.append(f"    label={_quote(f'e{cid} {eclass.data}')};")
        for index, node in enumerate(eclass.nodes):
            name = f"n{cid}_{index}"
            if index == 0:
                anchors[cid] = name
            lines.append(f"    {name} [label={_quote(node.label)}];")
            for position, child in enumerate(node.children):
                edges.append((name, g.find(child), position))
        lines.append("  }")
    for name, child, position in edges:
        lines.append(
            f"  {name} -> {anchors[child]} [lhead=cluster_{child}, label={position}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
