/** Precision / recall / F1 panel; values taken verbatim from the payload. */

import type { Metrics } from "../api";
import { el, formatPercent } from "../format";

export function renderMetricsPanel(metrics: Metrics): HTMLElement {
  const panel = el("div", "metrics-panel");
  const entries: Array<[string, string]> = [
    ["precision", formatPercent(metrics.precision)],
    ["recall", formatPercent(metrics.recall)],
    ["f1", formatPercent(metrics.f1)],
    ["lines", `${metrics.matched} kept / ${metrics.removed} removed / ${metrics.added} added`],
  ];
  for (const [label, value] of entries) {
    const item = el("div", `metric metric-${label}`);
    item.append(el("span", "metric-label", label), el("span", "metric-value", value));
    panel.append(item);
  }
  return panel;
}
