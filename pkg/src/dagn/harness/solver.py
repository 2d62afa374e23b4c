"""Symbolic reference solver: follow causal edges in the built graphs.

An option is supported when its explicit-connective relation, read as a
directed cause -> effect link, also appears among the context's relations.
Uses no learned parameters, so it checks generator, segmenter and graph
builder together.
"""

from dagn.graph import build_graph
from dagn.segmenter import load_delimiter_library, segment_sample

# left EDU causes right EDU
FORWARD = frozenset({"therefore", "thus", "hence", "consequently", "as a result",
                     "accordingly", "so", "so that", "thereby"})
# right EDU causes left EDU
BACKWARD = frozenset({"because", "since", "as"})


def causal_links(graph, ids):
    by_id = {e.id: e.text.strip().lower() for e in graph.nodes}
    links = set()
    for left, phrase, right in graph.relations:
        if left not in ids or right not in ids:
            continue
        if phrase in FORWARD:
            links.add((by_id[left], by_id[right]))
        elif phrase in BACKWARD:
            links.add((by_id[right], by_id[left]))
    return links


def solve(sample, lib=None):
    """Index of the first option whose causal link the context states, else 0."""
    seg = segment_sample(sample, lib or load_delimiter_library())
    context_ids = {e.id for e in seg.context.edus}
    for k in range(len(sample.options)):
        g = build_graph(seg.context.edus, seg.context.hits,
                        seg.options[k].edus, seg.options[k].hits, k)
        option_ids = {e.id for e in seg.options[k].edus}
        option_links = causal_links(g, option_ids)
        if option_links and option_links <= causal_links(g, context_ids):
            return k
    return 0


def accuracy(samples):
    hits = [solve(s) == s.label for s in samples]
    return sum(hits) / len(hits)
