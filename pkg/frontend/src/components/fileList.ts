/** File browser: one row per flagged file with per-type issue badges. */

import type { FileEntry } from "../api";
import { el } from "../format";

const BADGE_ORDER = ["BUG", "VULNERABILITY", "CODE_SMELL"];

export function renderFileList(
  files: FileEntry[],
  selected: string | null,
  onSelect: (location: string) => void
): HTMLElement {
  const list = el("ul", "file-list");
  for (const file of files) {
    const item = el("li", file.file_location === selected ? "file-row selected" : "file-row");
    const name = el("span", "file-name", file.file_location);
    item.append(name);
    for (const type of BADGE_ORDER) {
      const count = file.counts[type] ?? 0;
      if (count > 0) {
        item.append(el("span", `badge badge-${type.toLowerCase()}`, `${type} ${count}`));
      }
    }
    item.addEventListener("click", () => onSelect(file.file_location));
    list.append(item);
  }
  return list;
}
