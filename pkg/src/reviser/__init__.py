"""Issue extraction, LLM-backed code revision, and line-level diff evaluation."""

__version__ = "0.1.0"
