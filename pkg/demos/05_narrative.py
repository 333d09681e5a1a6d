# The full pipeline: budget-constrained narrative rendering with spans,
# both narrative scopes, and the interaction index used for brushing.

from causetext import interaction_index, narrate, search_spans
from causetext.fixtures import climate_graph, climate_selection, wiki_cache_path
from causetext.wiki import WikiSummaryProvider

graph = climate_graph()
interventions, objectives = climate_selection()
kb = WikiSummaryProvider(wiki_cache_path(), mode="offline")

# %% Unbounded budget: the exhaustive summary
full = narrate(graph, interventions, objectives, budget=None, kb=kb)
print(full.doc.text)
print("\n--- total:", len(full.doc.text), "chars,", len(full.doc.spans), "spans")

# %% A tight budget keeps only the highest-interest sentences
short = narrate(graph, interventions, objectives, budget=400, kb=kb)
print("\n=== 400-char budget ===")
print(short.doc.text)
print("truncated:", short.doc.truncated)

# %% Instantaneous scope phrases per-hop moves instead of net change
hops = narrate(graph, interventions, objectives, budget=600, scope="instantaneous", kb=kb)
print("\n=== instantaneous scope ===")
print(hops.doc.text)

# %% Spans power brushing, hyperlinking, and search
index = interaction_index(full.doc)
marine = index["marine-quality"]
print("\nQuality of Marine Ecosystem is mentioned", len(marine), "times")
for start, end in search_spans(full.doc, "Marine")[:3]:
    print("search hit:", full.doc.text[start - 11 : end + 10].strip())

# %% Node/edge encodings for a linked graph view
shades = full.encodings["nodes"]
print("\ndarkest movers:")
for nid, enc in sorted(shades.items(), key=lambda kv: -abs(kv[1]["net"]))[:3]:
    print(f"  {graph.labels[nid]:<24} net {enc['net']:+.1f}  {enc['polarity']}/{enc['shade']}")
