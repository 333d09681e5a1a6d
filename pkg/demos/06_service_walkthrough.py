# Driving the HTTP service end to end: store a graph, open a session,
# steer it, and read the regenerating narrative.
#
# Uses the in-process test client so the demo needs no running server;
# `causetext-serve --port 8000` exposes the identical API over the wire.

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from causetext.fixtures import climate_graph_path, climate_selection_path
from causetext.service import ServiceConfig, create_app

workdir = Path(tempfile.mkdtemp(prefix="causetext-demo-"))
app = create_app(ServiceConfig(data_dir=workdir))
client = TestClient(app)

# %% Store the graph (content-addressed, idempotent)
doc = json.loads(climate_graph_path().read_text(encoding="utf-8"))
version = client.put("/graphs", json=doc).json()["version"]
print("graph version:", version)

# %% A cyclic edit is rejected with the offending cycle
cyclic = json.loads(json.dumps(doc))
cyclic["edges"].append({"source": "atmospheric-co2", "target": "fossil-fuel", "weight": 0.2})
resp = client.put("/graphs", json=cyclic)
print("cyclic upload ->", resp.status_code, resp.json()["detail"]["cycle"])

# %% Open a session and select interventions and objectives
selection = json.loads(climate_selection_path().read_text(encoding="utf-8"))
sid = client.post("/sessions", json={"graph_version": version}).json()["id"]
print("narrative before selecting ->", client.get(f"/sessions/{sid}/narrative").status_code)

client.patch(f"/sessions/{sid}", json=selection)
body = client.get(f"/sessions/{sid}/narrative").json()
print("\nfirst paragraph:")
print(" ", body["doc"]["blocks"][1]["text"])

# %% Steering: shrink the budget, flip the scope
client.patch(f"/sessions/{sid}", json={"budget": 300})
short = client.get(f"/sessions/{sid}/narrative").json()["doc"]
print("\nat budget 300 ->", [b["module"] for b in short["blocks"]])

client.patch(f"/sessions/{sid}", json={"scope": "instantaneous", "budget": 500})
inst = client.get(f"/sessions/{sid}/narrative").json()["doc"]
print("instantaneous ->", inst["blocks"][1]["text"][:90], "...")

# %% Search and the trace behind the text
hits = client.get(f"/sessions/{sid}/search", params={"q": "marine"}).json()["hits"]
print("\nsearch 'marine':", len(hits), "hits")
trace = client.get(f"/sessions/{sid}/trace").json()
print("CO2 series:", [round(v, 1) for v in trace["series"]["atmospheric-co2"]])
