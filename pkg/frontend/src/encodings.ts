// Visual encoding of the service's impact classes: node fill by
// polarity + shade (darker = stronger impact), edge stroke width by
// thickness class, badges for interventions and objectives.

import type { EdgeEncoding, NodeEncoding } from "./types.js";

const POSITIVE_SHADES = ["#e8f0fe", "#aecbfa", "#669df6", "#1a73e8"];
const NEGATIVE_SHADES = ["#fdeeee", "#f6aea9", "#ee675c", "#d93025"];
const NEUTRAL_FILL = "#ececec";

export function nodeFill(enc: NodeEncoding | undefined): string {
  if (!enc || enc.polarity === "neutral" || enc.shade === 0) return NEUTRAL_FILL;
  const ramp = enc.polarity === "positive" ? POSITIVE_SHADES : NEGATIVE_SHADES;
  return ramp[Math.min(enc.shade, ramp.length - 1)] ?? NEUTRAL_FILL;
}

export function edgeStrokeWidth(enc: Pick<EdgeEncoding, "thickness">): number {
  return 1 + 1.5 * (enc.thickness - 1); // 1 / 2.5 / 4 px
}

export function edgeStroke(enc: Pick<EdgeEncoding, "polarity">): string {
  return enc.polarity === "negative" ? "#c5221f" : "#5f6368";
}

export type Badge = "intervention" | "objective" | null;

export function nodeBadge(
  id: string,
  interventions: Set<string>,
  objectives: Set<string>,
): Badge {
  if (interventions.has(id)) return "intervention";
  if (objectives.has(id)) return "objective";
  return null;
}
