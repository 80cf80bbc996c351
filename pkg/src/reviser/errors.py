"""Exception taxonomy shared across the pipeline modules."""

from __future__ import annotations


class ReviserError(Exception):
    """Base class for every error raised by this package."""


# --- analysis-server extraction ---------------------------------------------


class AuthError(ReviserError):
    """The analysis server rejected our credentials (401/403)."""


class ProjectNotFound(ReviserError):
    """The analysis server has no component for the requested project key."""


class TransportError(ReviserError):
    """Network-level failure talking to the analysis server."""


class SchemaError(ReviserError):
    """Server response is missing fields the extractor requires."""


class UnknownType(ReviserError):
    """Issue type outside the supported BUG/VULNERABILITY/CODE_SMELL set."""


class MissingLine(ReviserError):
    """File-level issue without a line number (normally repaired, not raised)."""


# --- CSV schema ---------------------------------------------------------------


class HeaderMismatch(ReviserError):
    """CSV header row does not match the canonical issue schema."""


class RowParseError(ReviserError):
    """A CSV data row could not be parsed; carries the 1-based row index."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class BadLineNumber(RowParseError):
    """Line column is not a positive integer."""


class BadType(RowParseError):
    """Type column is not one of the three supported tokens."""


# --- prompting ---------------------------------------------------------------


class MixedFiles(ReviserError):
    """Issues passed to one prompt reference more than one file."""


class EmptyIssueList(ReviserError):
    """A prompt was requested for a file with no issues."""


class PromptTooLarge(ReviserError):
    """Composed prompt exceeds the configured budget; never truncated silently."""


# --- LLM gateway --------------------------------------------------------------


class ProviderAuthError(ReviserError):
    """Completion provider rejected our API key."""


class RateLimited(ReviserError):
    """Provider kept rate-limiting after retries were exhausted."""


class ProviderError(ReviserError):
    """Completion provider failed for a non-auth, non-rate-limit reason."""


class UnknownModel(ReviserError):
    """Requested model id has no registered provider."""


# --- orchestration / reporting -------------------------------------------------


class MissingFile(ReviserError):
    """Issues CSV references a path that does not exist under the project root."""


class AnalyzerUnavailable(ReviserError):
    """Re-analysis provider cannot be reached."""


class ConsistencyError(ReviserError):
    """A ledger cell claims more resolved issues than it has issues."""


class ZeroBaseline(ReviserError):
    """Savings requested against a zero-cost baseline."""
