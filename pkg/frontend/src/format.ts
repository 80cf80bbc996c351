/** Display helpers. All numbers come from service payloads; the UI never
 * computes diffs or metrics itself. */

/** Ratio -> percent string: 0.6667 -> "66.67%", 1 -> "100.0%". */
export function formatPercent(ratio: number): string {
  let text = (ratio * 100).toFixed(2);
  if (text.endsWith("0")) {
    text = text.slice(0, -1);
  }
  return `${text}%`;
}

export function formatUsd(cost: string | number): string {
  return `$${Number(cost).toFixed(4)}`;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = ""
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}
