"""Re-analysis providers: who decides which issues are still present.

Both implementations answer one question — ``analyze(project_root)`` — and
return findings with paths relative to that root, deterministically ordered.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

from .errors import AnalyzerUnavailable, TransportError
from .issues import IssueRecord, IssueType
from .sonar_client import ServerConfig, fetch_issues


class AnalysisProvider(Protocol):
    def analyze(self, project_root: Path) -> list[IssueRecord]: ...


@dataclass(frozen=True)
class AnalyzerRule:
    """One fixture finding plus the content marker that clears it."""

    file_location: str
    line: int
    message: str
    type: str
    resolved_when: str = ""

    def to_record(self) -> IssueRecord:
        return IssueRecord(
            file_location=self.file_location,
            line=self.line,
            message=self.message,
            issue_type=IssueType(self.type),
        )


def load_analyzer_rules(path: str | Path) -> list[AnalyzerRule]:
    raw = json.loads(Path(path).read_text("utf-8"))
    return [AnalyzerRule(**entry) for entry in raw]


class MockAnalysisProvider:
    """Fixture-backed analyzer: an issue is resolved exactly when its
    ``resolved_when`` marker appears in the file's current content.

    Deterministic for identical trees; a missing or unreadable file keeps its
    issues visible.
    """

    def __init__(self, rules: Sequence[AnalyzerRule]):
        self.rules = list(rules)

    def analyze(self, project_root: Path) -> list[IssueRecord]:
        project_root = Path(project_root)
        remaining = []
        for rule in self.rules:
            path = project_root / rule.file_location
            resolved = False
            if rule.resolved_when and path.is_file():
                content = path.read_text("utf-8", errors="replace")
                resolved = rule.resolved_when in content
            if not resolved:
                remaining.append(rule.to_record())
        remaining.sort()
        return remaining


class SonarScanAnalysisProvider:
    """SonarQube-backed analyzer: triggers a scan of the tree, then polls the
    issue search API.

    ``scan_command`` is a shell-style template run with ``{root}`` substituted
    (typically a sonar-scanner invocation); when omitted, the scan is assumed
    to be triggered externally and only the fetch is performed.
    """

    def __init__(
        self,
        config: ServerConfig,
        scan_command: str | None = None,
        poll_attempts: int = 5,
        poll_interval_s: float = 2.0,
    ):
        self.config = config
        self.scan_command = scan_command
        self.poll_attempts = poll_attempts
        self.poll_interval_s = poll_interval_s

    def analyze(self, project_root: Path) -> list[IssueRecord]:
        if self.scan_command:
            command = [part.format(root=str(project_root)) for part in shlex.split(self.scan_command)]
            try:
                subprocess.run(command, check=True, capture_output=True)
            except (OSError, subprocess.CalledProcessError) as exc:
                raise AnalyzerUnavailable(f"scan command failed: {exc}") from exc
        last_error: Exception | None = None
        for attempt in range(self.poll_attempts):
            try:
                return fetch_issues(self.config)
            except TransportError as exc:
                last_error = exc
                if attempt + 1 < self.poll_attempts:
                    time.sleep(self.poll_interval_s)
        raise AnalyzerUnavailable(f"analysis server not reachable: {last_error}")
