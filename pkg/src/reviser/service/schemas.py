"""Request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel


class HealthResponse(BaseModel):
    status: str = "ok"


class SessionSummary(BaseModel):
    session_id: str
    issue_counts: dict[str, int]


class FileEntry(BaseModel):
    file_location: str
    issue_count: int
    counts: dict[str, int]


class IssueModel(BaseModel):
    file_location: str
    file_name: str
    line: int
    message: str
    type: str


class FileDetail(BaseModel):
    file_location: str
    content: str
    issues: list[IssueModel]


class FewShotModel(BaseModel):
    language_tag: str
    flawed_snippet: str
    issue_message: str
    fixed_snippet: str


class PromptPreviewRequest(BaseModel):
    file_location: str
    mode: Literal["batch", "interactive"] = "interactive"


class PromptSpecModel(BaseModel):
    system_text: str
    user_text: str
    language_tag: str
    editable: bool
    examples: list[FewShotModel]


class ReviseRequest(BaseModel):
    file_location: str
    model_id: str
    mode: Literal["batch", "interactive"] = "interactive"
    prompt_override: Optional[str] = None


class RevisionModel(BaseModel):
    file_location: str
    model_id: str
    status: str
    revised_content: str
    prompt_tokens: int
    completion_tokens: int
    cost_usd: str
    diagnostic: str = ""


class DiffRowModel(BaseModel):
    kind: Literal["unchanged", "removed", "added"]
    original_line_no: Optional[int]
    revised_line_no: Optional[int]
    text: str


class MetricsModel(BaseModel):
    matched: int
    removed: int
    added: int
    precision: float
    recall: float
    f1: float


class RevisePayload(BaseModel):
    revision: RevisionModel
    diff: list[DiffRowModel]
    metrics: MetricsModel


class SaveRequest(BaseModel):
    file_location: str


class SaveResponse(BaseModel):
    saved_path: str


class LedgerRowModel(BaseModel):
    issue_type: str
    strategy: str
    total: int
    resolved: int
    cost_usd: str


class ReportResponse(BaseModel):
    rows: list[LedgerRowModel]


class ModelsResponse(BaseModel):
    models: list[str]
