// View state and the pure update rules behind the steering controls.
// Selections are kept valid against the loaded graph; the budget slider
// is clamped to its track.

import type { GraphDoc, InterventionSpec, Scope } from "./types.js";

export const BUDGET_MIN = 0;
export const BUDGET_MAX = 5000;
export const DEFAULT_DELTA = 20;

export interface ViewState {
  graphVersion: string;
  sessionId: string;
  interventions: InterventionSpec[];
  objectives: string[];
  scope: Scope;
  budget: number;
  searchQuery: string;
  hoverTarget: string | null;
  positions: Record<string, { x: number; y: number; pinned: boolean }>;
}

export function clampBudget(value: number): number {
  if (!Number.isFinite(value)) return BUDGET_MAX;
  return Math.min(BUDGET_MAX, Math.max(BUDGET_MIN, Math.round(value)));
}

export function toggleIntervention(
  state: ViewState,
  node: string,
  delta: number = DEFAULT_DELTA,
): InterventionSpec[] {
  const current = state.interventions;
  if (current.some((s) => s.node === node)) {
    return current.filter((s) => s.node !== node);
  }
  // a node is either a cause or an objective, never both
  if (state.objectives.includes(node)) return current;
  return [...current, { node, delta, start: 0, kind: "sustained" }];
}

export function toggleObjective(state: ViewState, node: string): string[] {
  const current = state.objectives;
  if (current.includes(node)) return current.filter((o) => o !== node);
  if (state.interventions.some((s) => s.node === node)) return current;
  return [...current, node];
}

export function pruneSelections(state: ViewState, graph: GraphDoc): ViewState {
  const ids = new Set(graph.nodes.map((n) => n.id));
  return {
    ...state,
    interventions: state.interventions.filter((s) => ids.has(s.node)),
    objectives: state.objectives.filter((o) => ids.has(o)),
  };
}

export function flipScope(scope: Scope): Scope {
  return scope === "cumulative" ? "instantaneous" : "cumulative";
}

// The service echoes the graph version with every narrative; a mismatch
// means our rendered graph is stale and must be refetched.
export function versionStale(state: ViewState, echoedVersion: string): boolean {
  return state.graphVersion !== echoedVersion;
}
