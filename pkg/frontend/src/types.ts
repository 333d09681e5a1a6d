// Wire types for the causetext service. The UI holds no narrative logic
// of its own: everything here mirrors the JSON the service returns.

export interface GraphNode {
  id: string;
  label: string;
  baseline?: number;
}

export interface GraphEdge {
  source: string;
  target: string;
  weight: number;
}

export interface GraphDoc {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface InterventionSpec {
  node: string;
  delta: number;
  start?: number;
  kind?: "point" | "sustained";
}

export type Scope = "cumulative" | "instantaneous";

export interface Span {
  start: number;
  end: number;
  kind: "node-ref" | "emphasis" | "polarity-color" | "value" | "glyph" | "list-item";
  target: string | number | null;
}

export interface Block {
  module: string;
  text: string;
}

export interface NarrativeDoc {
  blocks: Block[];
  spans: Span[];
  scope: Scope;
  budget: number | null;
  truncated: boolean;
}

export interface NodeEncoding {
  net: number;
  polarity: "positive" | "negative" | "neutral";
  shade: number; // 0 (untouched) .. 3 (strongest impact)
}

export interface EdgeEncoding {
  source: string;
  target: string;
  weight: number;
  polarity: "positive" | "negative";
  thickness: number; // 1..3
}

export interface Encodings {
  nodes: Record<string, NodeEncoding>;
  edges: EdgeEncoding[];
}

export interface NarrativeResponse {
  doc: NarrativeDoc;
  net_changes: Record<string, number>;
  encodings: Encodings;
  interaction_index: Record<string, [number, number][]>;
  graph_version: string;
  session_version: number;
}

export interface TraceDoc {
  horizon: number;
  series: Record<string, number[]>;
  clamp_events: [string, number][];
}

export interface SessionDoc {
  id: string;
  graph_version: string;
  interventions: InterventionSpec[];
  objectives: string[];
  scope: Scope;
  budget: number | null;
  seed: number;
  horizon: number;
  version: number;
}
