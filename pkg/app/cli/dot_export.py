"""
Export graphs of complexes as graphviz DOT text.

Nodes and edges are written in a fixed order so the same object always
gives the same text. Render with, for example:

    dot -Tpng -O link.gv
"""
from typing import Any, Callable, Optional

import networkx as nx

from app.domain.complexes import sort_key
from app.domain.graph_product import NormalForm
from app.domain.polygonal import LinkGraph, PolygonalComplex, Wall
from app.services.polygonal.polygonal_service import polygonal_service


def quote(value: Any) -> str:
    return '"' + str(value).replace("\\", "\\\\").replace('"', '\\"') + '"'


def oriented_label(oe: tuple[Any, int]) -> str:
    e, s = oe
    return f"{e}{'+' if s > 0 else '-'}"


def export_dot(
    graph: nx.Graph,
    name: str = "G",
    node_label: Optional[Callable[[Any], str]] = None,
    node_attrs: Optional[Callable[[Any], dict[str, Any]]] = None,
    edge_attrs: Optional[Callable[[Any, Any, dict], dict[str, Any]]] = None,
) -> str:
    """
    Undirected DOT text for a networkx graph or multigraph.

    Args:
        graph: Graph to export
        name: Graph name
        node_label: Label of a node (str by default)
        node_attrs: Extra attributes of a node
        edge_attrs: Attributes of an edge from (u, v, data)

    Returns:
        DOT text ending with a newline
    """
    node_label = node_label or str
    lines = []
    write_line = lines.append
    write_line(f"graph {quote(name)} {{")
    nodes = sorted(graph.nodes, key=sort_key)
    ids = {v: f"n{k}" for k, v in enumerate(nodes)}
    for v in nodes:
        attrs = {"label": node_label(v), **(node_attrs(v) if node_attrs else {})}
        write_line(f"\t{ids[v]} [{format_attrs(attrs)}];")

    edges = []
    for u, v, data in graph.edges(data=True):
        a, b = sorted((u, v), key=lambda n: ids[n])
        attrs = edge_attrs(u, v, data) if edge_attrs else {}
        edges.append((ids[a], ids[b], format_attrs(attrs)))
    for a, b, attrs in sorted(edges, key=lambda t: (int(t[0][1:]), int(t[1][1:]), t[2])):
        write_line(f"\t{a} -- {b}" + (f" [{attrs}];" if attrs else ";"))
    write_line("}")
    return "\n".join(lines) + "\n"


def format_attrs(attrs: dict[str, Any]) -> str:
    return ", ".join(f"{key}={quote(value)}" for key, value in attrs.items())


def link_graph_dot(link: LinkGraph) -> str:
    """Link of a vertex; corners carry the side count k of their polygon."""
    return export_dot(
        link.graph(),
        name=f"link {link.vertex}",
        node_label=oriented_label,
        edge_attrs=lambda u, v, data: {"label": data["k"], "polygon": data["polygon"]},
    )


def chamber_graph_dot(graph: nx.Graph) -> str:
    """Chamber graph of a building ball; rank is the syllable length, edges carry i-labels."""
    return export_dot(
        graph,
        name="chambers",
        node_attrs=lambda c: {"rank": len(c.syllables) if isinstance(c, NormalForm) else 0},
        edge_attrs=lambda u, v, data: {"label": data.get("label", "")},
    )


def wall_dot(x: PolygonalComplex, wall: Optional[Wall]) -> str:
    """Geometric wall: edge midpoints (rank 1) and polygon centers (rank 2)."""
    graph = polygonal_service.wall_graph(x, wall) if wall is not None else nx.MultiGraph()
    return export_dot(
        graph,
        name="wall",
        node_label=lambda n: str(n[1]),
        node_attrs=lambda n: {"rank": 1 if n[0] == "e" else 2},
        edge_attrs=lambda u, v, data: {},
    )


def block_graph_dot(graph: nx.Graph, names: tuple[str, ...]) -> str:
    """Block adjacency of a Davis ball or quotient; edges carry the generator type."""
    def label(b: Any) -> str:
        if isinstance(b, tuple):
            return " ".join(names[i] for i in b) or "1"
        return str(b)

    return export_dot(
        graph,
        name="blocks",
        node_label=label,
        node_attrs=lambda b: {"rank": len(b) if isinstance(b, tuple) else 0},
        edge_attrs=lambda u, v, data: {"label": names[data["type"]]},
    )
