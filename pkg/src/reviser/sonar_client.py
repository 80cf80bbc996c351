"""Client for a SonarQube-compatible issue search API.

Pages through ``/api/issues/search`` for one project and returns the findings
as IssueRecords, deduplicated by issue key and deterministically ordered.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from urllib.parse import urlparse

import requests

from .errors import AuthError, ProjectNotFound, SchemaError, TransportError, UnknownType
from .issues import IssueRecord, map_issue

log = logging.getLogger(__name__)

DEFAULT_PAGE_SIZE = 100
REQUEST_TIMEOUT_S = 30.0


@dataclass(frozen=True)
class ServerConfig:
    """Connection parameters for the analysis server."""

    server_url: str
    api_token: str
    project_key: str

    def __post_init__(self):
        parsed = urlparse(self.server_url)
        if parsed.scheme not in ("http", "https") or not parsed.netloc:
            raise ValueError(f"server_url must be an absolute http(s) URL, got {self.server_url!r}")
        if not self.project_key:
            raise ValueError("project_key must be non-empty")

    def __repr__(self) -> str:  # token must never leak into logs
        return (
            f"ServerConfig(server_url={self.server_url!r}, "
            f"api_token='***', project_key={self.project_key!r})"
        )


def _get_page(
    config: ServerConfig, page: int, page_size: int, session: requests.Session
) -> dict:
    url = config.server_url.rstrip("/") + "/api/issues/search"
    try:
        response = session.get(
            url,
            params={"componentKeys": config.project_key, "p": page, "ps": page_size},
            headers={"Authorization": f"Bearer {config.api_token}"},
            timeout=REQUEST_TIMEOUT_S,
        )
    except requests.RequestException as exc:
        raise TransportError(f"analysis server unreachable: {exc}") from exc
    if response.status_code in (401, 403):
        raise AuthError(f"analysis server rejected credentials (HTTP {response.status_code})")
    if response.status_code == 404:
        raise ProjectNotFound(f"no component found for project key {config.project_key!r}")
    if response.status_code >= 400:
        raise TransportError(f"analysis server returned HTTP {response.status_code}")
    try:
        body = response.json()
    except ValueError as exc:
        raise SchemaError("analysis server response is not JSON") from exc
    if "issues" not in body or "paging" not in body or "total" not in body.get("paging", {}):
        raise SchemaError("analysis server response missing issues[] or paging.total")
    return body


def fetch_issues(
    config: ServerConfig,
    page_size: int = DEFAULT_PAGE_SIZE,
    session: requests.Session | None = None,
) -> list[IssueRecord]:
    """Fetch every open issue of the configured project, fully paginated.

    Issues are deduplicated by their server-side key and returned sorted by
    (file_location, line, message). Issues with a type outside the supported
    set are skipped with a warning.
    """
    if page_size < 1:
        raise ValueError("page_size must be positive")
    own_session = session is None
    session = session or requests.Session()
    try:
        seen_keys: set[str] = set()
        records: list[IssueRecord] = []
        skipped = 0
        page = 1
        while True:
            body = _get_page(config, page, page_size, session)
            for raw in body["issues"]:
                key = str(raw.get("key", ""))
                if key and key in seen_keys:
                    continue
                if key:
                    seen_keys.add(key)
                try:
                    records.append(map_issue(raw, project_key=config.project_key))
                except UnknownType as exc:
                    skipped += 1
                    log.warning("skipping issue %s: %s", key or "<no key>", exc)
            total = int(body["paging"]["total"])
            if page * page_size >= total or not body["issues"]:
                break
            page += 1
        if skipped:
            log.warning("skipped %d issue(s) with unsupported types", skipped)
        records.sort()
        return records
    finally:
        if own_session:
            session.close()
