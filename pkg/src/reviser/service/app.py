"""HTTP service exposing the interactive revision workflow.

Sessions are in-memory: upload a CSV, browse the files it names, preview or
edit prompts, run revisions, inspect side-by-side diffs, save accepted
revisions into the ``.Revised`` tree. Original project files are never
mutated.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.staticfiles import StaticFiles

from ..diffs import diff_texts, to_structured
from ..errors import (
    HeaderMismatch,
    MissingFile,
    PromptTooLarge,
    ProviderAuthError,
    ProviderError,
    RateLimited,
    RowParseError,
    UnknownModel,
)
from ..issues import IssueRecord, IssueType, count_by_type, read_csv
from ..orchestrator import (
    RevisionEngine,
    RevisionResult,
    RevisionStatus,
    cost_per_type,
    resolve_under_root,
    revised_file_name,
    revised_root_name,
)
from ..prompts import PromptMode
from . import schemas

import io


@dataclass
class Session:
    session_id: str
    records: list[IssueRecord]
    revisions: dict[str, RevisionResult] = field(default_factory=dict)
    activity: list[RevisionResult] = field(default_factory=list)


@dataclass
class ServiceState:
    project_root: Path
    engine: RevisionEngine
    output_root: Path | None = None
    sessions: dict[str, Session] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    in_flight: set[tuple[str, str]] = field(default_factory=set)
    counter: int = 0

    def resolved_output_root(self) -> Path:
        if self.output_root is not None:
            return self.output_root
        return self.project_root.parent / revised_root_name(self.project_root.name)


def _issue_model(record: IssueRecord) -> schemas.IssueModel:
    return schemas.IssueModel(
        file_location=record.file_location,
        file_name=record.file_name,
        line=record.line,
        message=record.message,
        type=record.issue_type.value,
    )


def _revision_model(result: RevisionResult) -> schemas.RevisionModel:
    return schemas.RevisionModel(
        file_location=result.file_location,
        model_id=result.model_id,
        status=result.status,
        revised_content=result.revised_content,
        prompt_tokens=result.usage.prompt_tokens,
        completion_tokens=result.usage.completion_tokens,
        cost_usd=str(result.cost),
        diagnostic=result.diagnostic,
    )


def create_app(
    project_root: str | Path,
    engine: RevisionEngine,
    output_root: str | Path | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service around one project root and one configured engine."""
    state = ServiceState(
        project_root=Path(project_root),
        engine=engine,
        output_root=Path(output_root) if output_root else None,
    )
    app = FastAPI(title="reviser", version="0.1.0")
    app.state.service = state

    def get_session(session_id: str) -> Session:
        with state.lock:
            session = state.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    def session_issues(session: Session, file_location: str) -> list[IssueRecord]:
        issues = [r for r in session.records if r.file_location == file_location]
        if not issues:
            raise HTTPException(status_code=404, detail=f"no issues for file {file_location!r}")
        return issues

    @app.get("/api/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse()

    @app.get("/api/models", response_model=schemas.ModelsResponse)
    def models():
        return schemas.ModelsResponse(models=state.engine.gateway.models())

    @app.post("/api/sessions", response_model=schemas.SessionSummary)
    async def upload_csv(request: Request):
        body = await request.body()
        try:
            records = read_csv(io.BytesIO(body))
        except (HeaderMismatch, RowParseError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        with state.lock:
            state.counter += 1
            session = Session(session_id=f"sess-{state.counter}", records=records)
            state.sessions[session.session_id] = session
        counts = {t.value: n for t, n in count_by_type(records).items()}
        return schemas.SessionSummary(session_id=session.session_id, issue_counts=counts)

    @app.get("/api/sessions/{session_id}/files", response_model=list[schemas.FileEntry])
    def list_files(session_id: str):
        session = get_session(session_id)
        by_file: dict[str, list[IssueRecord]] = {}
        for record in session.records:
            by_file.setdefault(record.file_location, []).append(record)
        entries = []
        for location in sorted(by_file):
            issues = by_file[location]
            counts = Counter(issue.issue_type.value for issue in issues)
            entries.append(
                schemas.FileEntry(
                    file_location=location,
                    issue_count=len(issues),
                    counts=dict(counts),
                )
            )
        return entries

    @app.get("/api/sessions/{session_id}/files/{file_location:path}", response_model=schemas.FileDetail)
    def get_file(session_id: str, file_location: str):
        session = get_session(session_id)
        issues = session_issues(session, file_location)
        path = resolve_under_root(state.project_root, file_location)
        if path is None:
            raise HTTPException(status_code=404, detail=f"file {file_location!r} not found on disk")
        content = path.read_text("utf-8", errors="replace")
        ordered = sorted(issues, key=lambda r: (r.line, r.message))
        return schemas.FileDetail(
            file_location=file_location,
            content=content,
            issues=[_issue_model(issue) for issue in ordered],
        )

    @app.post("/api/sessions/{session_id}/prompt/preview", response_model=schemas.PromptSpecModel)
    def preview_prompt(session_id: str, body: schemas.PromptPreviewRequest):
        session = get_session(session_id)
        issues = session_issues(session, body.file_location)
        path = resolve_under_root(state.project_root, body.file_location)
        if path is None:
            raise HTTPException(status_code=404, detail=f"file {body.file_location!r} not found on disk")
        content = path.read_text("utf-8", errors="replace")
        from ..prompts import build_prompt

        try:
            spec = build_prompt(
                content,
                issues,
                PromptMode(body.mode),
                template=state.engine.template,
                registry=state.engine.registry,
                budget_tokens=state.engine.budget_tokens,
            )
        except PromptTooLarge as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return schemas.PromptSpecModel(
            system_text=spec.system_text,
            user_text=spec.user_text,
            language_tag=spec.language_tag,
            editable=spec.editable,
            examples=[
                schemas.FewShotModel(
                    language_tag=e.language_tag,
                    flawed_snippet=e.flawed_snippet,
                    issue_message=e.issue_message,
                    fixed_snippet=e.fixed_snippet,
                )
                for e in spec.examples
            ],
        )

    @app.post("/api/sessions/{session_id}/revise", response_model=schemas.RevisePayload)
    def revise(session_id: str, body: schemas.ReviseRequest):
        session = get_session(session_id)
        issues = session_issues(session, body.file_location)
        if body.mode == "batch" and body.prompt_override is not None:
            raise HTTPException(
                status_code=400, detail="batch-mode prompts are fixed and cannot be overridden"
            )
        key = (session_id, body.file_location)
        with state.lock:
            if key in state.in_flight:
                raise HTTPException(
                    status_code=409, detail=f"a revision of {body.file_location!r} is already running"
                )
            state.in_flight.add(key)
        try:
            path = resolve_under_root(state.project_root, body.file_location)
            if path is None:
                raise HTTPException(
                    status_code=404, detail=f"file {body.file_location!r} not found on disk"
                )
            original = path.read_text("utf-8", errors="replace")
            try:
                result = state.engine.revise_file(
                    state.project_root,
                    body.file_location,
                    issues,
                    body.model_id,
                    PromptMode(body.mode),
                    body.prompt_override,
                    raise_on_error=True,
                )
            except UnknownModel as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            except PromptTooLarge as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            except MissingFile as exc:
                raise HTTPException(status_code=404, detail=str(exc)) from exc
            except (ProviderError, RateLimited, ProviderAuthError) as exc:
                raise HTTPException(
                    status_code=502,
                    detail=(
                        f"provider failure after up to {state.engine.gateway.max_attempts}"
                        f" attempt(s): {exc}"
                    ),
                ) from exc
        finally:
            with state.lock:
                state.in_flight.discard(key)
        with state.lock:
            session.revisions[body.file_location] = result
            session.activity.append(result)
        diff, metrics = diff_texts(original, result.revised_content)
        return schemas.RevisePayload(
            revision=_revision_model(result),
            diff=[schemas.DiffRowModel(**row) for row in to_structured(diff)],
            metrics=schemas.MetricsModel(**metrics.__dict__),
        )

    @app.post("/api/sessions/{session_id}/save", response_model=schemas.SaveResponse)
    def save_revision(session_id: str, body: schemas.SaveRequest):
        session = get_session(session_id)
        result = session.revisions.get(body.file_location)
        if result is None or result.status != RevisionStatus.REVISED:
            raise HTTPException(
                status_code=409, detail=f"no revised content to save for {body.file_location!r}"
            )
        source = resolve_under_root(state.project_root, body.file_location)
        if source is None:
            raise HTTPException(status_code=404, detail=f"file {body.file_location!r} not found on disk")
        relative = source.relative_to(state.project_root)
        target = (
            state.resolved_output_root() / relative.parent / revised_file_name(relative.name)
        )
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(result.revised_content, encoding="utf-8", newline="")
        except OSError as exc:
            raise HTTPException(status_code=500, detail=f"could not write {target}: {exc}") from exc
        return schemas.SaveResponse(saved_path=str(target))

    @app.get("/api/sessions/{session_id}/report", response_model=schemas.ReportResponse)
    def report(session_id: str):
        session = get_session(session_id)
        rows = []
        by_model: dict[str, list[RevisionResult]] = {}
        for result in session.activity:
            by_model.setdefault(result.model_id, []).append(result)
        for model_id in sorted(by_model):
            results = by_model[model_id]
            costs = cost_per_type(results)
            attempted: Counter = Counter()
            resolved: Counter = Counter()
            for result in results:
                for issue in result.issues_targeted:
                    attempted[issue.issue_type] += 1
                    if result.status == RevisionStatus.REVISED:
                        resolved[issue.issue_type] += 1
            for issue_type in IssueType:
                if attempted[issue_type] == 0:
                    continue
                rows.append(
                    schemas.LedgerRowModel(
                        issue_type=issue_type.value,
                        strategy=model_id,
                        total=attempted[issue_type],
                        resolved=resolved[issue_type],
                        cost_usd=str(costs.get(issue_type, Decimal("0.0000"))),
                    )
                )
        return schemas.ReportResponse(rows=rows)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
