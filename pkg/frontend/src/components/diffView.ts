/** Side-by-side diff: removed lines yellow, added lines green, unchanged
 * unstyled. Rows render exactly as the service sent them. */

import type { DiffRow } from "../api";
import { el } from "../format";

function cellPair(lineNo: number | null, text: string, klass: string): HTMLElement[] {
  const no = el("td", "lineno", lineNo === null ? "" : String(lineNo));
  const content = el("td", klass ? `code ${klass}` : "code", text);
  return [no, content];
}

export function renderDiffView(rows: DiffRow[]): HTMLElement {
  const table = el("table", "diff-view");
  for (const row of rows) {
    const tr = el("tr");
    if (row.kind === "unchanged") {
      tr.append(...cellPair(row.original_line_no, row.text, ""));
      tr.append(...cellPair(row.revised_line_no, row.text, ""));
    } else if (row.kind === "removed") {
      tr.append(...cellPair(row.original_line_no, row.text, "wall-removed"));
      tr.append(...cellPair(null, "", ""));
    } else {
      tr.append(...cellPair(null, "", ""));
      tr.append(...cellPair(row.revised_line_no, row.text, "wall-added"));
    }
    table.append(tr);
  }
  return table;
}
