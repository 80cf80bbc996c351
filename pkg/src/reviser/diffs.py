"""Exact line-level diff with change accounting and highlight rendering.

Unchanged lines form a longest common subsequence of the two files (Myers'
greedy algorithm, which consumes equal lines at the earliest opportunity in
the original). Precision is measured over the revised length, recall over the
original length, so identical files score 1.0 everywhere.
"""

from __future__ import annotations

import html
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class DiffKind(Enum):
    UNCHANGED = "unchanged"
    REMOVED = "removed"
    ADDED = "added"


@dataclass(frozen=True)
class DiffLine:
    kind: DiffKind
    original_line_no: int | None
    revised_line_no: int | None
    text: str

    def __post_init__(self):
        if self.kind is DiffKind.UNCHANGED and (
            self.original_line_no is None or self.revised_line_no is None
        ):
            raise ValueError("unchanged lines carry both line numbers")
        if self.kind is DiffKind.REMOVED and (
            self.original_line_no is None or self.revised_line_no is not None
        ):
            raise ValueError("removed lines carry only the original line number")
        if self.kind is DiffKind.ADDED and (
            self.original_line_no is not None or self.revised_line_no is None
        ):
            raise ValueError("added lines carry only the revised line number")


@dataclass(frozen=True)
class DiffMetrics:
    matched: int
    removed: int
    added: int
    precision: float
    recall: float
    f1: float


def split_lines(text: str) -> list[str]:
    """Split on \\n or \\r\\n; a final terminator does not yield an empty
    last line."""
    if not text:
        return []
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def detect_terminator(text: str) -> str:
    """The file's dominant line terminator (ties go to \\n)."""
    crlf = text.count("\r\n")
    lf = text.count("\n") - crlf
    return "\r\n" if crlf > lf else "\n"


def join_lines(lines: Sequence[str], terminator: str = "\n", final_newline: bool = True) -> str:
    if not lines:
        return ""
    body = terminator.join(lines)
    return body + terminator if final_newline else body


# --- Myers shortest edit script ------------------------------------------------


def _shortest_edit_trace(a: Sequence[str], b: Sequence[str]) -> list[dict[int, int]]:
    n, m = len(a), len(b)
    v: dict[int, int] = {1: 0}
    trace: list[dict[int, int]] = []
    for d in range(n + m + 1):
        trace.append(dict(v))
        for k in range(-d, d + 1, 2):
            if k == -d or (k != d and v.get(k - 1, 0) < v.get(k + 1, 0)):
                x = v.get(k + 1, 0)
            else:
                x = v.get(k - 1, 0) + 1
            y = x - k
            while x < n and y < m and a[x] == b[y]:
                x += 1
                y += 1
            v[k] = x
            if x >= n and y >= m:
                return trace
    return trace


def _backtrack_moves(trace, a, b):
    # Yields (prev_x, prev_y, x, y) steps from the end back to the origin.
    x, y = len(a), len(b)
    for d in range(len(trace) - 1, -1, -1):
        v = trace[d]
        k = x - y
        if k == -d or (k != d and v.get(k - 1, 0) < v.get(k + 1, 0)):
            prev_k = k + 1
        else:
            prev_k = k - 1
        prev_x = v.get(prev_k, 0)
        prev_y = prev_x - prev_k
        while x > prev_x and y > prev_y:
            yield (x - 1, y - 1, x, y)
            x -= 1
            y -= 1
        if d > 0:
            yield (prev_x, prev_y, x, y)
        x, y = prev_x, prev_y


def _myers_ops(a: Sequence[str], b: Sequence[str]) -> list[tuple[str, int, int]]:
    # Ops in forward order: ("eq"|"del"|"ins", original index, revised index).
    trace = _shortest_edit_trace(a, b)
    ops: list[tuple[str, int, int]] = []
    for prev_x, prev_y, x, y in _backtrack_moves(trace, a, b):
        if x == prev_x:
            ops.append(("ins", prev_x, prev_y))
        elif y == prev_y:
            ops.append(("del", prev_x, prev_y))
        else:
            ops.append(("eq", prev_x, prev_y))
    ops.reverse()
    return ops


def line_diff(original: Sequence[str], revised: Sequence[str]) -> list[DiffLine]:
    """Minimal edit script between two line sequences.

    Replaying the script (skip removed, keep unchanged, insert added)
    reproduces ``revised`` exactly; dropping added lines reproduces
    ``original``. Output is deterministic.
    """
    original = list(original)
    revised = list(revised)

    # Trim the common prefix and suffix first; Myers cost grows with the
    # number of differences, so this keeps mostly-equal files cheap.
    n, m = len(original), len(revised)
    prefix = 0
    while prefix < n and prefix < m and original[prefix] == revised[prefix]:
        prefix += 1
    suffix = 0
    while (
        suffix < n - prefix
        and suffix < m - prefix
        and original[n - 1 - suffix] == revised[m - 1 - suffix]
    ):
        suffix += 1

    diff: list[DiffLine] = []
    for i in range(prefix):
        diff.append(DiffLine(DiffKind.UNCHANGED, i + 1, i + 1, original[i]))

    middle_ops = _myers_ops(original[prefix : n - suffix], revised[prefix : m - suffix])
    for op, oi, ri in middle_ops:
        if op == "eq":
            diff.append(
                DiffLine(DiffKind.UNCHANGED, prefix + oi + 1, prefix + ri + 1, original[prefix + oi])
            )
        elif op == "del":
            diff.append(DiffLine(DiffKind.REMOVED, prefix + oi + 1, None, original[prefix + oi]))
        else:
            diff.append(DiffLine(DiffKind.ADDED, None, prefix + ri + 1, revised[prefix + ri]))

    for s in range(suffix, 0, -1):
        diff.append(DiffLine(DiffKind.UNCHANGED, n - s + 1, m - s + 1, original[n - s]))
    return diff


def replay(diff: Iterable[DiffLine]) -> list[str]:
    """Reconstruct the revised line sequence from a diff."""
    return [d.text for d in diff if d.kind is not DiffKind.REMOVED]


def reverse_replay(diff: Iterable[DiffLine]) -> list[str]:
    """Reconstruct the original line sequence from a diff."""
    return [d.text for d in diff if d.kind is not DiffKind.ADDED]


def compute_metrics(diff: Sequence[DiffLine]) -> DiffMetrics:
    """Change accounting over a line diff.

    precision = matched / revised length, recall = matched / original length;
    an empty side scores 1.0 only when the other side is empty too. Ratios
    are reported to 4 decimal places.
    """
    matched = sum(1 for d in diff if d.kind is DiffKind.UNCHANGED)
    removed = sum(1 for d in diff if d.kind is DiffKind.REMOVED)
    added = sum(1 for d in diff if d.kind is DiffKind.ADDED)

    revised_len = matched + added
    original_len = matched + removed
    if revised_len:
        precision = matched / revised_len
    else:
        precision = 1.0 if original_len == 0 else 0.0
    if original_len:
        recall = matched / original_len
    else:
        recall = 1.0 if revised_len == 0 else 0.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return DiffMetrics(
        matched=matched,
        removed=removed,
        added=added,
        precision=round(precision, 4),
        recall=round(recall, 4),
        f1=round(f1, 4),
    )


# --- rendering ------------------------------------------------------------------


class DiffFormat(Enum):
    SIDE_BY_SIDE_HTML = "html"
    TERMINAL = "tty"
    STRUCTURED = "structured"


def to_structured(diff: Iterable[DiffLine]) -> list[dict]:
    """Machine-readable rows consumed by the HTTP API and the UI."""
    return [
        {
            "kind": d.kind.value,
            "original_line_no": d.original_line_no,
            "revised_line_no": d.revised_line_no,
            "text": d.text,
        }
        for d in diff
    ]


def from_structured(rows: Iterable[dict]) -> list[DiffLine]:
    return [
        DiffLine(
            kind=DiffKind(row["kind"]),
            original_line_no=row["original_line_no"],
            revised_line_no=row["revised_line_no"],
            text=row["text"],
        )
        for row in rows
    ]


_HTML_STYLE = """\
body { font-family: monospace; margin: 0; }
table.diff { border-collapse: collapse; width: 100%; }
table.diff td { padding: 0 8px; white-space: pre-wrap; vertical-align: top; }
table.diff td.lineno { color: #888; text-align: right; user-select: none; }
td.wall-removed { background: #fff3b0; }
td.wall-added { background: #c8f0c8; }
"""

_ANSI_YELLOW = "\x1b[33m"
_ANSI_GREEN = "\x1b[32m"
_ANSI_RESET = "\x1b[0m"


def render_html(diff: Sequence[DiffLine]) -> str:
    """Self-contained side-by-side document; removed lines carry the
    ``wall-removed`` (yellow) class, added lines ``wall-added`` (green)."""
    rows = []
    for d in diff:
        text = html.escape(d.text) or "&nbsp;"
        if d.kind is DiffKind.UNCHANGED:
            left = f'<td class="lineno">{d.original_line_no}</td><td>{text}</td>'
            right = f'<td class="lineno">{d.revised_line_no}</td><td>{text}</td>'
        elif d.kind is DiffKind.REMOVED:
            left = f'<td class="lineno">{d.original_line_no}</td><td class="wall-removed">{text}</td>'
            right = '<td class="lineno"></td><td></td>'
        else:
            left = '<td class="lineno"></td><td></td>'
            right = f'<td class="lineno">{d.revised_line_no}</td><td class="wall-added">{text}</td>'
        rows.append(f"<tr>{left}{right}</tr>")
    body = "\n".join(rows)
    return (
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
        f"<style>{_HTML_STYLE}</style></head>\n"
        f'<body><table class="diff">\n{body}\n</table></body></html>\n'
    )


def render_terminal(diff: Sequence[DiffLine], color: bool = True) -> str:
    lines = []
    for d in diff:
        if d.kind is DiffKind.REMOVED:
            line = f"- {d.text}"
            lines.append(f"{_ANSI_YELLOW}{line}{_ANSI_RESET}" if color else line)
        elif d.kind is DiffKind.ADDED:
            line = f"+ {d.text}"
            lines.append(f"{_ANSI_GREEN}{line}{_ANSI_RESET}" if color else line)
        else:
            lines.append(f"  {d.text}")
    return "\n".join(lines) + ("\n" if lines else "")


def render_diff(diff: Sequence[DiffLine], format: DiffFormat):
    if format is DiffFormat.SIDE_BY_SIDE_HTML:
        return render_html(diff)
    if format is DiffFormat.TERMINAL:
        return render_terminal(diff)
    return to_structured(diff)


def diff_texts(
    original_text: str, revised_text: str, strip_trailing_ws: bool = False
) -> tuple[list[DiffLine], DiffMetrics]:
    """Diff two file contents; trailing-whitespace normalization is off by
    default (comparison is whitespace-sensitive)."""
    original = split_lines(original_text)
    revised = split_lines(revised_text)
    if strip_trailing_ws:
        original = [line.rstrip() for line in original]
        revised = [line.rstrip() for line in revised]
    diff = line_diff(original, revised)
    return diff, compute_metrics(diff)
