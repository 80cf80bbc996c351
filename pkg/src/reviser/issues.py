"""Issue records and the canonical CSV they travel in.

One record is one static-analysis finding: where it lives, the 1-based line,
the analyzer message, and one of the three supported issue types. The CSV
schema is fixed; ``read_csv`` inverts ``write_csv`` exactly.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import BinaryIO, Iterable, Mapping

from .errors import (
    BadLineNumber,
    BadType,
    HeaderMismatch,
    RowParseError,
    SchemaError,
    UnknownType,
)

CSV_HEADER = ("File_Location", "File_Name", "Line", "Message", "Type")

FILE_LEVEL_PREFIX = "[file-level] "


class IssueType(Enum):
    """The three analyzer categories this pipeline accepts."""

    BUG = "BUG"
    VULNERABILITY = "VULNERABILITY"
    CODE_SMELL = "CODE_SMELL"

    @classmethod
    def parse(cls, token: str) -> "IssueType":
        try:
            return cls(token)
        except ValueError:
            raise UnknownType(f"unsupported issue type {token!r}") from None


def _normalize_path(path: str) -> str:
    # Analyzer output on Windows arrives with backslashes; stored form is
    # always forward slashes.
    return path.replace("\\", "/").strip("/")


def _basename(path: str) -> str:
    return path.rsplit("/", 1)[-1]


@dataclass(frozen=True, order=True)
class IssueRecord:
    """One finding, ordered by (file_location, line, message)."""

    file_location: str
    line: int
    message: str
    issue_type: IssueType = field(compare=False)
    file_name: str = field(default="", compare=False)

    def __post_init__(self):
        loc = _normalize_path(self.file_location)
        if not loc:
            raise ValueError("file_location must be non-empty")
        object.__setattr__(self, "file_location", loc)
        name = self.file_name or _basename(loc)
        if name != _basename(loc):
            raise ValueError(
                f"file_name {name!r} does not match basename of {loc!r}"
            )
        object.__setattr__(self, "file_name", name)
        if self.line < 1:
            raise ValueError(f"line must be >= 1, got {self.line}")
        if not self.message:
            raise ValueError("message must be non-empty")
        # NUL cannot survive any CSV round-trip and is not valid RFC 4180
        # text data.
        if "\x00" in self.message or "\x00" in self.file_location:
            raise ValueError("NUL characters are not allowed")


def map_issue(raw: Mapping, project_key: str | None = None) -> IssueRecord:
    """Translate one analysis-server issue payload into an IssueRecord.

    The server's component key is ``<project_key>:<path>``; the prefix is
    stripped. Issues without a line number are file-level findings: they keep
    line 1 and get a ``[file-level]`` marker prepended to the message so the
    reviser prompt still sees them.
    """
    for key in ("component", "message", "type"):
        if key not in raw or raw[key] in (None, ""):
            raise SchemaError(f"issue payload missing required field {key!r}")
    component = str(raw["component"])
    if project_key is not None and component.startswith(project_key + ":"):
        location = component[len(project_key) + 1 :]
    else:
        location = component.split(":", 1)[-1]
    issue_type = IssueType.parse(str(raw["type"]))
    message = str(raw["message"])
    line = raw.get("line")
    if line is None:
        line = 1
        message = FILE_LEVEL_PREFIX + message
    return IssueRecord(
        file_location=location,
        line=int(line),
        message=message,
        issue_type=issue_type,
    )


def write_csv(records: Iterable[IssueRecord], sink: BinaryIO) -> int:
    """Serialize records to the canonical CSV; returns the bytes written.

    Header is exactly ``File_Location,File_Name,Line,Message,Type``. Fields
    containing commas, quotes, or newlines get RFC 4180 quoting; encoding is
    UTF-8 with CRLF row terminators.
    """
    buf = io.StringIO(newline="")
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(
            (
                record.file_location,
                record.file_name,
                str(record.line),
                record.message,
                record.issue_type.value,
            )
        )
    data = buf.getvalue().encode("utf-8")
    sink.write(data)
    return len(data)


def read_csv(source: BinaryIO) -> list[IssueRecord]:
    """Parse the canonical issues CSV back into records.

    Raises HeaderMismatch for a wrong header, and RowParseError (or its
    BadLineNumber/BadType refinements) carrying the 1-based row index, where
    the header counts as row 1.
    """
    text = io.TextIOWrapper(source, encoding="utf-8", newline="")
    reader = csv.reader(text)
    try:
        header = next(reader)
    except StopIteration:
        raise HeaderMismatch("empty input, expected issue CSV header") from None
    if tuple(header) != CSV_HEADER:
        raise HeaderMismatch(
            f"expected header {','.join(CSV_HEADER)}, got {','.join(header)}"
        )
    records = []
    for index, row in enumerate(reader, start=2):
        if len(row) != len(CSV_HEADER):
            raise RowParseError(index, f"expected {len(CSV_HEADER)} fields, got {len(row)}")
        location, name, line_text, message, type_token = row
        try:
            line = int(line_text)
        except ValueError:
            raise BadLineNumber(index, f"line number {line_text!r} is not an integer") from None
        if line < 1:
            raise BadLineNumber(index, f"line number {line} must be >= 1")
        try:
            issue_type = IssueType(type_token)
        except ValueError:
            raise BadType(index, f"unknown issue type {type_token!r}") from None
        try:
            record = IssueRecord(
                file_location=location,
                line=line,
                message=message,
                issue_type=issue_type,
                file_name=name,
            )
        except ValueError as exc:
            raise RowParseError(index, str(exc)) from None
        records.append(record)
    return records


def count_by_type(records: Iterable[IssueRecord]) -> dict[IssueType, int]:
    """Issue tally per type, with zero entries for absent types."""
    counts = Counter(record.issue_type for record in records)
    return {issue_type: counts.get(issue_type, 0) for issue_type in IssueType}
