"""Revision runs: single file, whole project, and the hybrid two-model
pipeline.

Output naming follows the fixed convention: the output tree is the project
root name with ``.Revised`` appended, and every written file gets a
``Revised.`` prefix. Originals are never modified. The run manifest and the
hybrid cost ledger are written next to the tree, never inside it.
"""

from __future__ import annotations

import json
import logging
import shutil
import tempfile
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .analyzers import AnalysisProvider
from .errors import (
    MissingFile,
    PromptTooLarge,
    ProviderAuthError,
    ProviderError,
    RateLimited,
    UnknownModel,
)
from .gateway import CompletionResult, Gateway, TokenUsage, compute_cost, extract_code
from .issues import IssueRecord, IssueType
from .prompts import FewShotExample, PromptMode, build_prompt
from .reporting import CostLedger, Strategy, write_ledger

log = logging.getLogger(__name__)

DEFAULT_WORKERS = 4

REVISED_SUFFIX = ".Revised"
REVISED_PREFIX = "Revised."


class RevisionStatus:
    REVISED = "Revised"
    UNCHANGED = "Unchanged"
    FAILED = "Failed"


@dataclass(frozen=True)
class RevisionResult:
    """Outcome of one file revision attempt; failures carry a diagnostic and
    empty content."""

    file_location: str
    model_id: str
    revised_content: str
    usage: TokenUsage
    cost: Decimal
    status: str
    issues_targeted: tuple[IssueRecord, ...]
    diagnostic: str = ""


def revised_root_name(root: str) -> str:
    """Output tree name for a project root directory name."""
    if not root:
        raise ValueError("project root name must be non-empty")
    return root + REVISED_SUFFIX


def revised_file_name(name: str) -> str:
    """Output name for one revised file (plain prefix, no deduplication)."""
    if not name:
        raise ValueError("file name must be non-empty")
    return REVISED_PREFIX + name


def resolve_under_root(project_root: Path, file_location: str) -> Path | None:
    """Locate a CSV file_location under the project root.

    Locations may be root-relative (``client/src/App.jsx``) or include the
    root directory name as their first segment (``Project/client/src/App.jsx``,
    the extractor's display form); both resolve to the same file.
    """
    candidate = project_root / file_location
    if candidate.is_file():
        return candidate
    head, _, rest = file_location.partition("/")
    if rest and head == project_root.name:
        candidate = project_root / rest
        if candidate.is_file():
            return candidate
    return None


def group_by_file(records: Sequence[IssueRecord]) -> dict[str, list[IssueRecord]]:
    groups: dict[str, list[IssueRecord]] = {}
    for record in sorted(records):
        groups.setdefault(record.file_location, []).append(record)
    return groups


@dataclass
class HybridOutcome:
    stage1: list[RevisionResult]
    rescan_issues: list[IssueRecord]
    stage2: list[RevisionResult]
    final_unresolved: list[IssueRecord]
    ledger: CostLedger
    output_root: Path


@dataclass
class RevisionEngine:
    """Drives revisions through the gateway with a fixed prompt setup."""

    gateway: Gateway
    template: str | None = None
    registry: Sequence[FewShotExample] | None = None
    budget_tokens: int = 50_000
    workers: int = DEFAULT_WORKERS
    strip_fences: bool = True

    def _read_original(self, path: Path) -> str:
        data = path.read_bytes()
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError:
            log.warning("file %s is not valid UTF-8; decoding with replacement", path)
            return data.decode("utf-8", errors="replace")

    def revise_file(
        self,
        project_root: Path,
        file_location: str,
        issues: Sequence[IssueRecord],
        model_id: str,
        mode: PromptMode = PromptMode.BATCH,
        override: str | None = None,
        raise_on_error: bool = False,
    ) -> RevisionResult:
        """Revise one file in memory; writes nothing to disk.

        Status is Unchanged when the extracted reply equals the original
        byte-for-byte, Failed when the prompt or provider failed (cost then
        reflects only tokens actually billed). With ``raise_on_error`` the
        underlying typed error propagates instead (the HTTP layer wants the
        distinction; batch runs want the Failed record).
        """
        issues = tuple(sorted(issues))
        path = resolve_under_root(Path(project_root), file_location)
        if path is None:
            if raise_on_error:
                raise MissingFile(f"{file_location} not found under {project_root}")
            return RevisionResult(
                file_location=file_location,
                model_id=model_id,
                revised_content="",
                usage=TokenUsage(),
                cost=Decimal("0.0000"),
                status=RevisionStatus.FAILED,
                issues_targeted=issues,
                diagnostic=f"MissingFile: {file_location} not found under {project_root}",
            )
        original = self._read_original(path)
        try:
            prompt = build_prompt(
                original,
                issues,
                mode,
                override,
                template=self.template,
                registry=self.registry,
                budget_tokens=self.budget_tokens,
            )
            completion: CompletionResult = self.gateway.complete(prompt, model_id)
        except (PromptTooLarge, ProviderAuthError, ProviderError, RateLimited, UnknownModel) as exc:
            if raise_on_error:
                raise
            return RevisionResult(
                file_location=file_location,
                model_id=model_id,
                revised_content="",
                usage=TokenUsage(),
                cost=Decimal("0.0000"),
                status=RevisionStatus.FAILED,
                issues_targeted=issues,
                diagnostic=f"{type(exc).__name__}: {exc}",
            )
        revised = extract_code(completion.text) if self.strip_fences else completion.text
        status = RevisionStatus.UNCHANGED if revised == original else RevisionStatus.REVISED
        return RevisionResult(
            file_location=file_location,
            model_id=model_id,
            revised_content=revised,
            usage=completion.usage,
            cost=compute_cost(completion.usage, self.gateway.pricing_for(model_id)),
            status=status,
            issues_targeted=issues,
        )

    def revise_all(
        self,
        records: Sequence[IssueRecord],
        project_root: str | Path,
        model_id: str,
        output_root: str | Path | None = None,
        write_manifest: bool = True,
    ) -> list[RevisionResult]:
        """Revise every file named in the issue records.

        Writes each Revised/Unchanged result to
        ``<output_root>/<relative dirs>/Revised.<name>``; files without issues
        are not copied, failed files are left out of the tree entirely. An
        empty record set creates nothing. Results come back in path order.
        """
        project_root = Path(project_root)
        groups = group_by_file(records)
        if output_root is None:
            output_root = project_root.parent / revised_root_name(project_root.name)
        output_root = Path(output_root)

        def work(item: tuple[str, list[IssueRecord]]) -> RevisionResult:
            location, issues = item
            return self.revise_file(project_root, location, issues, model_id)

        items = sorted(groups.items())
        if not items:
            return []
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            results = list(pool.map(work, items))
        results.sort(key=lambda r: r.file_location)

        for result in results:
            if result.status == RevisionStatus.FAILED:
                log.warning("revision failed for %s: %s", result.file_location, result.diagnostic)
                continue
            source = resolve_under_root(project_root, result.file_location)
            relative = source.relative_to(project_root)
            target = output_root / relative.parent / revised_file_name(relative.name)
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(result.revised_content, encoding="utf-8", newline="")
        if write_manifest:
            write_run_manifest(manifest_path_for(output_root), results)
        return results

    def hybrid_pipeline(
        self,
        records: Sequence[IssueRecord],
        project_root: str | Path,
        cheap_model: str,
        advanced_model: str,
        analyzer: AnalysisProvider,
        output_root: str | Path | None = None,
    ) -> HybridOutcome:
        """Cheap-then-advanced routing.

        Stage 1 revises everything with the cheap model. A rescan of the
        revised tree (overlaid on untouched originals) finds what survived;
        stage 2 sends only those files to the advanced model, layered onto the
        same output tree. The ledger books attempted/resolved/cost per issue
        type for each stage and the combined run.
        """
        project_root = Path(project_root)
        if output_root is None:
            output_root = project_root.parent / revised_root_name(project_root.name)
        output_root = Path(output_root)

        totals = Counter(r.issue_type for r in records)
        stage1 = self.revise_all(records, project_root, cheap_model, output_root, write_manifest=False)
        stage1_cost = cost_per_type(stage1)

        with tempfile.TemporaryDirectory(prefix="rescan-") as scratch:
            merged = Path(scratch) / project_root.name
            shutil.copytree(project_root, merged)
            _overlay(merged, project_root, stage1)
            remaining1 = analyzer.analyze(merged)

            stage2_input = _remaining_within(remaining1, records)
            remaining_counts = Counter(r.issue_type for r in stage2_input)
            stage2 = self.revise_all(
                stage2_input, merged, advanced_model, output_root, write_manifest=False
            )
            stage2_cost = cost_per_type(stage2)

            _overlay(merged, merged, stage2)
            remaining2 = analyzer.analyze(merged) if stage2_input else []

        final_unresolved = _remaining_within(remaining2, stage2_input)
        resolved1 = _resolved_counts(records, stage2_input)
        resolved2 = _resolved_counts(stage2_input, final_unresolved)

        ledger = CostLedger()
        for issue_type in IssueType:
            if totals[issue_type] == 0:
                continue
            ledger.accumulate(
                issue_type,
                Strategy.CHEAP_ONLY,
                total=totals[issue_type],
                resolved=resolved1[issue_type],
                cost=stage1_cost[issue_type],
            )
            ledger.accumulate(
                issue_type,
                Strategy.ADVANCED_ON_REMAINING,
                total=remaining_counts[issue_type],
                resolved=resolved2[issue_type],
                cost=stage2_cost[issue_type],
            )
            ledger.accumulate(
                issue_type,
                Strategy.HYBRID,
                total=totals[issue_type],
                resolved=resolved1[issue_type] + resolved2[issue_type],
                cost=stage1_cost[issue_type] + stage2_cost[issue_type],
            )

        write_run_manifest(manifest_path_for(output_root), stage1 + stage2)
        write_ledger(ledger, ledger_path_for(output_root))
        return HybridOutcome(
            stage1=stage1,
            rescan_issues=stage2_input,
            stage2=stage2,
            final_unresolved=final_unresolved,
            ledger=ledger,
            output_root=output_root,
        )


def _overlay(target_root: Path, source_root: Path, results: Sequence[RevisionResult]) -> None:
    # Lay successful revisions over the tree, under their original names.
    for result in results:
        if result.status == RevisionStatus.FAILED:
            continue
        source = resolve_under_root(source_root, result.file_location)
        if source is None:
            continue
        destination = target_root / source.relative_to(source_root)
        destination.parent.mkdir(parents=True, exist_ok=True)
        destination.write_text(result.revised_content, encoding="utf-8", newline="")


def _remaining_within(
    rescan: Sequence[IssueRecord], reference: Sequence[IssueRecord]
) -> list[IssueRecord]:
    """Rescan findings that belong to the run's issue population.

    Issue identity across revisions is (file, message) — line numbers may
    shift. Rescan paths are root-relative while the input CSV may spell
    locations with the root-name prefix, so paths are re-anchored first.
    Findings outside the reference multiset (e.g. issues newly introduced by
    a revision) are ignored for accounting, keeping per-type conservation
    exact: resolved(stage1) + resolved(stage2) + unresolved == total.
    """
    by_relative: dict[str, str] = {}
    for record in reference:
        by_relative.setdefault(record.file_location, record.file_location)
        head, _, rest = record.file_location.partition("/")
        if rest:
            by_relative.setdefault(rest, record.file_location)
    budget = Counter((r.file_location, r.message, r.issue_type) for r in reference)
    kept = []
    for record in rescan:
        location = by_relative.get(record.file_location, record.file_location)
        key = (location, record.message, record.issue_type)
        if budget.get(key, 0) > 0:
            budget[key] -= 1
            kept.append(
                IssueRecord(
                    file_location=location,
                    line=record.line,
                    message=record.message,
                    issue_type=record.issue_type,
                )
            )
        else:
            log.debug(
                "rescan finding outside run scope ignored: %s: %s",
                record.file_location,
                record.message,
            )
    return sorted(kept)


def _resolved_counts(
    before: Sequence[IssueRecord], after: Sequence[IssueRecord]
) -> Counter:
    """Per-type count of issues present before but gone after, matched by
    (file, message) multisets."""
    before_keys = Counter((r.file_location, r.message, r.issue_type) for r in before)
    after_keys = Counter((r.file_location, r.message, r.issue_type) for r in after)
    resolved: Counter = Counter()
    for key, count in before_keys.items():
        gone = count - after_keys.get(key, 0)
        if gone > 0:
            resolved[key[2]] += gone
    return resolved


def cost_per_type(results: Sequence[RevisionResult]) -> dict[IssueType, Decimal]:
    """Attribute each file's cost to issue types, proportional to the file's
    issue mix; exact fraction arithmetic, quantized once per type."""
    shares: dict[IssueType, Fraction] = {t: Fraction(0) for t in IssueType}
    for result in results:
        if not result.issues_targeted:
            continue
        mix = Counter(issue.issue_type for issue in result.issues_targeted)
        total = sum(mix.values())
        for issue_type, count in mix.items():
            shares[issue_type] += Fraction(result.cost) * Fraction(count, total)
    out = {}
    for issue_type, share in shares.items():
        out[issue_type] = (
            Decimal(share.numerator) / Decimal(share.denominator)
        ).quantize(Decimal("0.0001"))
    return out


def manifest_path_for(output_root: Path) -> Path:
    return output_root.parent / (output_root.name + ".manifest.json")


def ledger_path_for(output_root: Path) -> Path:
    return output_root.parent / (output_root.name + ".ledger.csv")


def write_run_manifest(path: Path, results: Sequence[RevisionResult]) -> None:
    """Persist every revision outcome (status, model, usage, cost); contains
    no absolute paths or timestamps, so identical runs write identical
    bytes."""
    entries = [
        {
            "file_location": r.file_location,
            "status": r.status,
            "model_id": r.model_id,
            "prompt_tokens": r.usage.prompt_tokens,
            "completion_tokens": r.usage.completion_tokens,
            "cost_usd": str(r.cost),
            "issues_targeted": len(r.issues_targeted),
            "diagnostic": r.diagnostic,
        }
        for r in sorted(results, key=lambda r: (r.file_location, r.model_id))
    ]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"results": entries}, indent=2, sort_keys=True) + "\n", "utf-8")


def any_failed(results: Sequence[RevisionResult]) -> bool:
    return any(r.status == RevisionStatus.FAILED for r in results)
