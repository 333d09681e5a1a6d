# Building, validating, and querying a causal network.
#
# A graph is nodes (processes) plus weighted directed edges; the sign of
# a weight is the polarity of the influence, the magnitude is how much
# of a change passes along the edge per time step.

from causetext import causal_paths, graph_from_doc, validate_graph
from causetext.model import CausalEdge, CausalGraph, ProcessNode

# %% Build a small supply-chain style network from a document
doc = {
    "nodes": [
        {"id": "demand", "label": "Customer Demand"},
        {"id": "orders", "label": "Order Volume"},
        {"id": "backlog", "label": "Factory Backlog"},
        {"id": "delays", "label": "Shipping Delays"},
    ],
    "edges": [
        {"source": "demand", "target": "orders", "weight": 0.8},
        {"source": "orders", "target": "backlog", "weight": 0.6},
        {"source": "orders", "target": "delays", "weight": 0.3},
        {"source": "backlog", "target": "delays", "weight": 0.5},
    ],
}
graph = graph_from_doc(doc)
print("loaded:", len(graph.nodes), "nodes,", len(graph.edges), "edges")

# %% Validation reports every violated invariant instead of stopping at one
broken = CausalGraph(
    nodes=(ProcessNode("a", "A"), ProcessNode("a", "Dup"), ProcessNode("b", "")),
    edges=(CausalEdge("a", "a", 0.5), CausalEdge("a", "b", 1.7)),
)
for violation in validate_graph(broken).violations:
    print("violation:", violation.message)

# %% Path queries: every simple route from a cause to an effect
for path in causal_paths(graph, "demand", "delays"):
    print(" -> ".join(graph.labels[n] for n in path))

print("unreachable:", causal_paths(graph, "delays", "demand"))
