# From a finished simulation to ordered, merged content: clause
# extraction, degree-of-interest scoring, scene-graph grouping, and
# aggregation.

from causetext import (
    aggregate,
    build_scene_graph,
    extract_clauses,
    pagerank,
    propagate,
    score_clauses,
)
from causetext.fixtures import climate_graph, climate_selection

graph = climate_graph()
interventions, objectives = climate_selection()
trace = propagate(graph, interventions)

# %% Every candidate clause, scored by magnitude/occurrence/centrality
clauses = extract_clauses(graph, trace, interventions, objectives)
score_clauses(clauses, trace, pagerank(graph), interventions, objectives)
print("extracted", len(clauses), "clauses")
by_category = {}
for c in clauses:
    by_category.setdefault(c.category, []).append(c)
for category, members in sorted(by_category.items()):
    print(f"  {category}: {len(members)}")

# %% The scene graph groups clauses per process, highest interest first
scene = build_scene_graph(clauses)
print("\ntop scene groups:")
for group in scene.groups[:4]:
    print(f"  {graph.labels[group.node]:<28} max doi {group.max_doi:.3f}")

# %% Aggregation merges clauses sharing endpoints; nothing is lost
merged = aggregate(scene)
print("\nclauses before merge:", len(scene.all_clauses()))
print("clauses after merge: ", len(merged.all_clauses()))
for clause in merged.all_clauses():
    if len(clause.subjects) > 1:
        names = ", ".join(graph.labels[s] for s in clause.subjects)
        print(f"  merged {clause.category} [{clause.payload.get('trend', '')}]: {names}")
