"""Edge-typed message passing over a discourse graph.

One round, with row-vector node states ``V[N×H]``:

    alpha_i = sigmoid(v_i . w_alpha + b_alpha)
    m_i     = 1/|N_i| * sum_{j in N_i} alpha_j * (v_j @ W_{r_ji})
    v'_i    = ReLU(v_i @ W_u + m_i + b_u)

``N_i`` holds one entry per incoming edge; nodes without incoming edges get
``m_i = 0``. Rounds repeat with shared weights, recomputing alpha each time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dagn.graph import EdgeType, EmptyGraphError
from dagn.numerics import ops
from dagn.numerics.init import uniform_weight, zeros
from dagn.numerics.tensor import Tensor, as_tensor


class ConfigError(ValueError):
    pass


class ReasonerWeights:
    def __init__(self, hidden, rng):
        self.w_alpha = uniform_weight(rng, (hidden, 1), "reasoner.w_alpha")
        self.b_alpha = zeros((1,), "reasoner.b_alpha")
        self.w_explicit = uniform_weight(rng, (hidden, hidden), "reasoner.w_rE")
        self.w_punct = uniform_weight(rng, (hidden, hidden), "reasoner.w_rI")
        self.w_u = uniform_weight(rng, (hidden, hidden), "reasoner.w_u")
        self.b_u = zeros((hidden,), "reasoner.b_u")

    def parameters(self):
        return [self.w_alpha, self.b_alpha, self.w_explicit, self.w_punct, self.w_u, self.b_u]

    def edge_weight(self, edge_type):
        return self.w_explicit if EdgeType(edge_type) is EdgeType.EXPLICIT else self.w_punct


@dataclass
class NodeState:
    v: Tensor  # [N×H]
    iteration: int = 0


@dataclass(frozen=True)
class Adjacency:
    """Dense per-type incoming-edge masks: ``masks[r][i, j] = 1`` iff (j, r, i) is an edge."""

    masks: dict
    in_degree: np.ndarray

    @classmethod
    def from_graph(cls, graph):
        index = graph.index_of()
        n = len(graph.nodes)
        masks = {r: np.zeros((n, n)) for r in EdgeType}
        for src, r, dst in graph.edges:
            masks[EdgeType(r)][index[dst], index[src]] += 1.0
        deg = sum(m.sum(axis=1) for m in masks.values())
        return cls(masks, deg)


def init_nodes(edu_embeddings):
    e = as_tensor(edu_embeddings)
    if e.ndim != 2 or e.shape[0] == 0:
        raise EmptyGraphError("cannot reason over a graph with no nodes")
    return NodeState(e, 0)


def node_weights(state, w):
    """alpha as an [N×1] column, each entry in (0, 1)."""
    return ops.sigmoid(state.v @ w.w_alpha + w.b_alpha)


def propagate(state, adjacency, alpha, w):
    if not isinstance(adjacency, Adjacency):
        adjacency = Adjacency.from_graph(adjacency)
    weighted = state.v * alpha
    inv_deg = np.where(adjacency.in_degree > 0, 1.0 / np.maximum(adjacency.in_degree, 1.0), 0.0)
    messages = None
    for r in EdgeType:
        mask = adjacency.masks[r]
        if not mask.any():
            continue
        term = Tensor(mask * inv_deg[:, None]) @ (weighted @ w.edge_weight(r))
        messages = term if messages is None else messages + term
    if messages is None:
        return Tensor(np.zeros(state.v.shape))
    return messages


def update(state, messages, w):
    v = ops.relu(state.v @ w.w_u + messages + w.b_u)
    return NodeState(v, state.iteration + 1)


def reason(edu_embeddings, graph, w, iterations, trace=None):
    """Run ``iterations`` rounds of weighting, propagation and update.

    ``trace``, if a list, receives a copy of the node matrix after each round.
    """
    if iterations < 1:
        raise ConfigError(f"graph reasoning needs at least one iteration, got {iterations}")
    adjacency = graph if isinstance(graph, Adjacency) else Adjacency.from_graph(graph)
    state = init_nodes(edu_embeddings)
    if adjacency.in_degree.shape[0] != state.v.shape[0]:
        raise ValueError(f"graph has {adjacency.in_degree.shape[0]} nodes but "
                         f"{state.v.shape[0]} embeddings were given")
    for _ in range(iterations):
        alpha = node_weights(state, w)
        messages = propagate(state, adjacency, alpha, w)
        state = update(state, messages, w)
        if trace is not None:
            trace.append(state.v.data.copy())
    return state.v


def enhance_tokens(tokens, v_final, edu_spans):
    """Add each EDU's final node state onto the token rows it covers."""
    tokens, v_final = as_tensor(tokens), as_tensor(v_final)
    s = np.zeros((len(edu_spans), tokens.shape[0]))
    for n, span in enumerate(edu_spans):
        s[n, list(span)] = 1.0
    return tokens + Tensor(s.T) @ v_final
