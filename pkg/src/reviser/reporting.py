"""Per-type, per-strategy cost and resolution ledgers and their reports.

Money is exact decimal arithmetic end to end: 4 internal places, 2 display
places, rounding applied only at display time. Success rates are truncated
(not rounded) at one decimal place; that is the arithmetic the replay
fixtures reproduce.
"""

from __future__ import annotations

import csv
import html
from dataclasses import dataclass, field
from decimal import ROUND_DOWN, ROUND_HALF_UP, Decimal
from enum import Enum
from pathlib import Path

from .errors import ConsistencyError, ZeroBaseline
from .issues import IssueType

LEDGER_HEADER = ("Issue_Type", "Strategy", "Total", "Resolved", "Cost_USD")


class Strategy(Enum):
    CHEAP_ONLY = "CheapOnly"
    ADVANCED_ON_REMAINING = "AdvancedOnRemaining"
    ADVANCED_ONLY = "AdvancedOnly"
    HYBRID = "Hybrid"


@dataclass
class LedgerEntry:
    issues_total: int = 0
    issues_resolved: int = 0
    cost_usd: Decimal = Decimal("0")


@dataclass
class CostLedger:
    """Tallies keyed by (issue type, model strategy)."""

    entries: dict[tuple[IssueType, Strategy], LedgerEntry] = field(default_factory=dict)

    def get(self, issue_type: IssueType, strategy: Strategy) -> LedgerEntry | None:
        return self.entries.get((issue_type, strategy))

    def accumulate(
        self,
        issue_type: IssueType,
        strategy: Strategy,
        total: int = 0,
        resolved: int = 0,
        cost: Decimal = Decimal("0"),
    ) -> LedgerEntry:
        entry = self.entries.setdefault((issue_type, strategy), LedgerEntry())
        entry.issues_total += total
        entry.issues_resolved += resolved
        entry.cost_usd += cost
        return entry

    def issue_types(self) -> list[IssueType]:
        present = {issue_type for issue_type, _ in self.entries}
        return [t for t in IssueType if t in present]

    def total_cost(self, strategy: Strategy) -> Decimal:
        return sum(
            (entry.cost_usd for (_, s), entry in self.entries.items() if s is strategy),
            Decimal("0"),
        )

    def total_issues(self, issue_type: IssueType) -> int:
        # Every strategy covering the full issue set agrees on the total;
        # prefer the hybrid entry, then either full-run strategy.
        for strategy in (Strategy.HYBRID, Strategy.CHEAP_ONLY, Strategy.ADVANCED_ONLY):
            entry = self.get(issue_type, strategy)
            if entry is not None:
                return entry.issues_total
        entry = self.get(issue_type, Strategy.ADVANCED_ON_REMAINING)
        return entry.issues_total if entry else 0

    def validate(self):
        for (issue_type, strategy), entry in self.entries.items():
            if entry.issues_resolved > entry.issues_total:
                raise ConsistencyError(
                    f"{issue_type.value}/{strategy.value}: resolved "
                    f"{entry.issues_resolved} > total {entry.issues_total}"
                )
            if entry.cost_usd < 0:
                raise ConsistencyError(
                    f"{issue_type.value}/{strategy.value}: negative cost {entry.cost_usd}"
                )


def success_rate(resolved: int, total: int) -> Decimal | None:
    """Success percentage truncated to one decimal; None when total is 0
    (reported as n/a)."""
    if total < 0:
        raise ValueError("total must be >= 0")
    if resolved > total:
        raise ConsistencyError(f"resolved {resolved} > total {total}")
    if total == 0:
        return None
    return (Decimal(100 * resolved) / Decimal(total)).quantize(
        Decimal("0.1"), rounding=ROUND_DOWN
    )


def hybrid_cost(stage1_cost: Decimal, stage2_cost: Decimal) -> Decimal:
    """Exact sum of the two stage costs (rounding is display-only)."""
    if stage1_cost < 0 or stage2_cost < 0:
        raise ValueError("stage costs must be >= 0")
    return stage1_cost + stage2_cost


def savings_vs_advanced(hybrid_total: Decimal, advanced_only_total: Decimal) -> Decimal:
    """Relative cost reduction of the hybrid run, percent to one decimal."""
    if advanced_only_total <= 0:
        raise ZeroBaseline("advanced-only baseline cost must be positive")
    fraction = (advanced_only_total - hybrid_total) / advanced_only_total
    return (fraction * 100).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)


# --- ledger persistence ---------------------------------------------------------


def write_ledger(ledger: CostLedger, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(LEDGER_HEADER)
        ordered = sorted(
            ledger.entries.items(),
            key=lambda item: (
                list(IssueType).index(item[0][0]),
                list(Strategy).index(item[0][1]),
            ),
        )
        for (issue_type, strategy), entry in ordered:
            writer.writerow(
                (
                    issue_type.value,
                    strategy.value,
                    entry.issues_total,
                    entry.issues_resolved,
                    str(entry.cost_usd),
                )
            )


def read_ledger(path: str | Path) -> CostLedger:
    ledger = CostLedger()
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != LEDGER_HEADER:
            raise ValueError(f"ledger file {path} must start with header {','.join(LEDGER_HEADER)}")
        for row in reader:
            if not row or not "".join(row).strip():
                continue
            type_token, strategy_token, total, resolved, cost = row
            ledger.entries[(IssueType(type_token), Strategy(strategy_token))] = LedgerEntry(
                issues_total=int(total),
                issues_resolved=int(resolved),
                cost_usd=Decimal(cost),
            )
    return ledger


# --- report emission ------------------------------------------------------------


class ReportFormat(Enum):
    TEXT = "text"
    STRUCTURED_ROWS = "structured"
    HTML = "html"


_TYPE_LABELS = {
    IssueType.BUG: "Bugs",
    IssueType.VULNERABILITY: "Vulnerability",
    IssueType.CODE_SMELL: "Code Smell",
}

_NA = "n/a"


def format_usd(value: Decimal) -> str:
    return "$" + str(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _count(n: int) -> str:
    return f"{n:,}"


def _count_cost_cell(entry: LedgerEntry | None) -> str:
    if entry is None:
        return _NA
    return f"{_count(entry.issues_resolved)} / {format_usd(entry.cost_usd)}"


def _rate_cell(entry: LedgerEntry | None) -> str:
    if entry is None:
        return _NA
    rate = success_rate(entry.issues_resolved, entry.issues_total)
    if rate is None:
        return _NA
    return f"{rate}% ({_count(entry.issues_resolved)}/{_count(entry.issues_total)})"


_REPORT_ROWS = (
    ("# Issues", lambda ledger, t: _count(ledger.total_issues(t))),
    ("Cheap only (# revised / cost)", lambda ledger, t: _count_cost_cell(ledger.get(t, Strategy.CHEAP_ONLY))),
    ("Advanced on remaining (# issues / cost)", lambda ledger, t: _count_cost_cell(ledger.get(t, Strategy.ADVANCED_ON_REMAINING))),
    ("Advanced only (# revised / cost)", lambda ledger, t: _count_cost_cell(ledger.get(t, Strategy.ADVANCED_ONLY))),
    ("Cheap + advanced (# revised / cost)", lambda ledger, t: _count_cost_cell(ledger.get(t, Strategy.HYBRID))),
    ("Cheap success rate (# revised / total)", lambda ledger, t: _rate_cell(ledger.get(t, Strategy.CHEAP_ONLY))),
    ("Advanced success rate (# revised / total)", lambda ledger, t: _rate_cell(ledger.get(t, Strategy.ADVANCED_ONLY))),
)


def structured_rows(ledger: CostLedger) -> list[dict]:
    """Ledger rows in the wire shape shared with the HTTP API."""
    rows = []
    ordered = sorted(
        ledger.entries.items(),
        key=lambda item: (list(IssueType).index(item[0][0]), list(Strategy).index(item[0][1])),
    )
    for (issue_type, strategy), entry in ordered:
        rows.append(
            {
                "issue_type": issue_type.value,
                "strategy": strategy.value,
                "total": entry.issues_total,
                "resolved": entry.issues_resolved,
                "cost_usd": str(entry.cost_usd),
            }
        )
    return rows


def _table_cells(ledger: CostLedger) -> tuple[list[str], list[tuple[str, list[str]]]]:
    types = ledger.issue_types()
    headers = ["Metric \\ Type"] + [_TYPE_LABELS[t] for t in types]
    rows = [(label, [cell(ledger, t) for t in types]) for label, cell in _REPORT_ROWS]
    return headers, rows


def render_text_report(ledger: CostLedger) -> str:
    headers, rows = _table_cells(ledger)
    if len(headers) == 1:
        return headers[0] + "\n"
    widths = [len(headers[0])] + [len(h) for h in headers[1:]]
    for label, cells in rows:
        widths[0] = max(widths[0], len(label))
        for i, cell in enumerate(cells):
            widths[i + 1] = max(widths[i + 1], len(cell))
    def fmt(values: list[str]) -> str:
        return " | ".join(value.ljust(width) for value, width in zip(values, widths)).rstrip()
    lines = [fmt(headers), "-+-".join("-" * w for w in widths)]
    for label, cells in rows:
        lines.append(fmt([label] + cells))
    return "\n".join(lines) + "\n"


def render_html_report(ledger: CostLedger) -> str:
    headers, rows = _table_cells(ledger)
    head = "".join(f"<th>{html.escape(h)}</th>" for h in headers)
    body = "".join(
        "<tr><td>{}</td>{}</tr>".format(
            html.escape(label), "".join(f"<td>{html.escape(cell)}</td>" for cell in cells)
        )
        for label, cells in rows
    )
    return (
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><style>"
        "table { border-collapse: collapse; } td, th { border: 1px solid #999; padding: 4px 8px; }"
        f"</style></head>\n<body><table><tr>{head}</tr>{body}</table></body></html>\n"
    )


def emit_report(ledger: CostLedger, format: ReportFormat = ReportFormat.TEXT):
    """Render the per-type, per-strategy comparison table.

    Raises ConsistencyError before rendering when any cell claims more
    resolved issues than it has issues.
    """
    ledger.validate()
    if format is ReportFormat.TEXT:
        return render_text_report(ledger)
    if format is ReportFormat.HTML:
        return render_html_report(ledger)
    return structured_rows(ledger)
