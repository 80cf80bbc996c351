/** CSV dropzone + per-type counts once a session exists. */

import type { SessionSummary } from "../api";
import { el } from "../format";

export function renderUploadPanel(
  summary: SessionSummary | null,
  onCsv: (content: string) => void
): HTMLElement {
  const panel = el("div", "upload-panel");

  const zone = el("div", "dropzone", "Drop the issues CSV here, or ");
  const picker = el("input") as HTMLInputElement;
  picker.type = "file";
  picker.accept = ".csv,text/csv";
  picker.addEventListener("change", async () => {
    const file = picker.files?.[0];
    if (file) onCsv(await file.text());
  });
  zone.addEventListener("dragover", (event) => event.preventDefault());
  zone.addEventListener("drop", async (event) => {
    event.preventDefault();
    const file = event.dataTransfer?.files?.[0];
    if (file) onCsv(await file.text());
  });
  zone.append(picker);
  panel.append(zone);

  if (summary) {
    const counts = el("div", "issue-counts");
    for (const [type, count] of Object.entries(summary.issue_counts)) {
      counts.append(el("span", `count count-${type.toLowerCase()}`, `${type}: ${count}`));
    }
    panel.append(counts);
  } else {
    panel.append(el("div", "empty-state", "No issues loaded yet."));
  }
  return panel;
}
