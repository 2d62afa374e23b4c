"""Per-option discourse graphs: EDU nodes, explicit-connective and punctuation edges."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from dagn.segmenter import DelimiterKind


class EmptyGraphError(ValueError):
    pass


class EdgeType(str, enum.Enum):
    EXPLICIT = "r_E"
    PUNCT = "r_I"

    @classmethod
    def from_kind(cls, kind):
        return cls.EXPLICIT if DelimiterKind(kind) is DelimiterKind.EXPLICIT else cls.PUNCT


class GraphVariant(str, enum.Enum):
    STANDARD = "standard"
    SINGLE_EDGE_TYPE = "single_edge_type"
    FULLY_CONNECTED = "fully_connected"


# Called with each newly built graph; the ablation tests use it to confirm
# the graph-free variant never builds one.
BUILD_HOOKS = []


@dataclass(frozen=True)
class DiscourseGraph:
    nodes: tuple  # EDUs, context first, in id order
    edges: frozenset  # (src id, EdgeType, dst id)
    option_index: int
    # (left id, delimiter phrase, right id) for each connecting hit, text order
    relations: tuple = ()

    @property
    def node_ids(self):
        return [e.id for e in self.nodes]

    def __len__(self):
        return len(self.nodes)

    def index_of(self):
        """Map EDU id -> row in node-state matrices."""
        return {e.id: i for i, e in enumerate(self.nodes)}

    def subgraph(self, keep_ids):
        """Drop nodes not in ``keep_ids`` together with their edges."""
        keep = set(keep_ids)
        nodes = tuple(e for e in self.nodes if e.id in keep)
        edges = frozenset(t for t in self.edges if t[0] in keep and t[2] in keep)
        relations = tuple(t for t in self.relations if t[0] in keep and t[2] in keep)
        return DiscourseGraph(nodes, edges, self.option_index, relations)

    def sorted_edges(self):
        return sorted(self.edges, key=lambda t: (t[0], t[2], t[1].value))

    def to_json(self):
        return {
            "option_index": self.option_index,
            "nodes": [e.to_json() for e in self.nodes],
            "edges": [{"src": s, "type": r.value, "dst": d} for s, r, d in self.sorted_edges()],
            "relations": [{"left": a, "phrase": p, "right": b} for a, p, b in self.relations],
        }

    def to_dot(self):
        lines = [f"digraph option_{self.option_index} {{"]
        for e in self.nodes:
            shape = "box" if e.source == "option" else "ellipse"
            lines.append(f"  n{e.id} [label={json.dumps(e.text)}, shape={shape}];")
        for s, r, d in self.sorted_edges():
            style = "solid" if r is EdgeType.EXPLICIT else "dashed"
            lines.append(f"  n{s} -> n{d} [label=\"{r.value}\", style={style}];")
        lines.append("}")
        return "\n".join(lines)


def _edges_from_hits(hits):
    edges = set()
    for hit in hits:
        if hit.left_edu is None or hit.right_edu is None:
            continue
        r = EdgeType.from_kind(hit.kind)
        edges.add((hit.left_edu, r, hit.right_edu))
        edges.add((hit.right_edu, r, hit.left_edu))
    return edges


def build_graph(context_edus, context_hits, option_edus, option_hits, k):
    """Graph G^k over context EDUs plus option ``k``'s EDUs.

    Every delimiter hit with an EDU on both sides contributes the two
    directed triplets (left, r, right) and (right, r, left). Context and
    option are not linked to each other.
    """
    nodes = tuple(context_edus) + tuple(option_edus)
    if not nodes:
        raise EmptyGraphError(f"option {k}: no EDUs in context or option")
    ids = [e.id for e in nodes]
    if len(set(ids)) != len(ids):
        raise ValueError(f"option {k}: EDU ids are not unique: {ids}")
    edges = _edges_from_hits(context_hits) | _edges_from_hits(option_hits)
    relations = tuple((h.left_edu, h.phrase, h.right_edu)
                      for h in list(context_hits) + list(option_hits)
                      if h.left_edu is not None and h.right_edu is not None)
    known = set(ids)
    for s, _, d in edges:
        if s not in known or d not in known:
            raise ValueError(f"option {k}: hit references unknown EDU {s if s not in known else d}")
    graph = DiscourseGraph(nodes, frozenset(edges), k, relations)
    for hook in BUILD_HOOKS:
        hook(graph)
    return graph


def apply_variant(g, variant):
    v = GraphVariant(variant)
    if v is GraphVariant.STANDARD:
        return g
    if v is GraphVariant.SINGLE_EDGE_TYPE:
        edges = frozenset((s, EdgeType.EXPLICIT, d) for s, _, d in g.edges)
    else:
        ids = g.node_ids
        edges = frozenset((i, EdgeType.EXPLICIT, j) for i in ids for j in ids if i != j)
    return DiscourseGraph(g.nodes, edges, g.option_index, g.relations)
