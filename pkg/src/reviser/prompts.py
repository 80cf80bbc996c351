"""Prompt composition for file revision requests.

A prompt carries four ingredients: the target file, its issue list, few-shot
fix examples, and a language tag. Batch-mode prompts are frozen so model
comparisons stay apples-to-apples; interactive prompts may be overridden by
the user.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmptyIssueList, MixedFiles, PromptTooLarge
from .issues import IssueRecord

DEFAULT_PROMPT_BUDGET_TOKENS = 50_000

SYSTEM_TEXT = (
    "You are a careful senior engineer revising source files flagged by static "
    "analysis. Fix every listed issue without changing unrelated behavior. "
    "Always reply with the complete revised file and nothing else."
)

# Rough chars-per-token divisor used for the prompt budget. A precise
# tokenizer would be model-specific; the budget exists to refuse oversized
# prompts, not to bill them.
_CHARS_PER_TOKEN = 4

_EXTENSION_LANGUAGES = {
    "c": "C",
    "cc": "C++",
    "cpp": "C++",
    "cs": "C#",
    "css": "CSS",
    "go": "Go",
    "h": "C",
    "hpp": "C++",
    "html": "HTML",
    "java": "Java",
    "js": "JavaScript",
    "json": "JSON",
    "jsx": "JavaScript (React)",
    "kt": "Kotlin",
    "md": "Markdown",
    "php": "PHP",
    "py": "Python",
    "rb": "Ruby",
    "rs": "Rust",
    "sh": "Shell",
    "sql": "SQL",
    "tf": "Terraform",
    "ts": "TypeScript",
    "tsx": "TypeScript (React)",
    "xml": "XML",
    "yaml": "YAML",
    "yml": "YAML",
}

_SPECIAL_FILENAMES = {
    "dockerfile": "Dockerfile",
    "makefile": "Makefile",
}

FALLBACK_LANGUAGE = "plain text"

_PLACEHOLDER_RE = re.compile(r"\{\{(language|issue_table|examples|file_content)\}\}")


class PromptMode(Enum):
    BATCH = "batch"
    INTERACTIVE = "interactive"


@dataclass(frozen=True)
class FewShotExample:
    """One flawed-snippet/fixed-snippet pair used for few-shot guidance."""

    language_tag: str
    flawed_snippet: str
    issue_message: str
    fixed_snippet: str

    def __post_init__(self):
        for name in ("language_tag", "flawed_snippet", "issue_message", "fixed_snippet"):
            if not getattr(self, name):
                raise ValueError(f"few-shot example field {name!r} must be non-empty")


@dataclass(frozen=True)
class PromptSpec:
    """A fully composed revision prompt.

    ``file_location``, ``file_content``, and ``issue_messages`` are routing
    metadata for providers (the rule-based mock matches on them and echoes
    ``file_content`` when refusing); the text the model sees is exactly
    ``system_text`` + ``user_text``.
    """

    system_text: str
    user_text: str
    examples: tuple[FewShotExample, ...]
    language_tag: str
    editable: bool
    file_location: str = ""
    file_content: str = ""
    issue_messages: tuple[str, ...] = field(default=())


def infer_language(file_name: str) -> str:
    """Extension-keyed language tag; unknown extensions map to plain text."""
    name = file_name.rsplit("/", 1)[-1]
    if name.lower() in _SPECIAL_FILENAMES:
        return _SPECIAL_FILENAMES[name.lower()]
    if "." not in name[1:]:
        return FALLBACK_LANGUAGE
    extension = name.rsplit(".", 1)[-1].lower()
    return _EXTENSION_LANGUAGES.get(extension, FALLBACK_LANGUAGE)


def default_template() -> str:
    return resources.files("reviser.data").joinpath("prompt_template.txt").read_text("utf-8")


def load_few_shots(path: str | Path | None = None) -> list[FewShotExample]:
    """Read the few-shot registry (JSON Lines, one example per line)."""
    if path is None:
        text = resources.files("reviser.data").joinpath("few_shots.jsonl").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    examples = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        examples.append(FewShotExample(**json.loads(line)))
    return examples


def _family(tag: str) -> str:
    return tag.split(" ")[0]


def select_examples(
    registry: Sequence[FewShotExample], language_tag: str
) -> tuple[FewShotExample, ...]:
    """Examples for the file's language: exact tag, then language family,
    then the plain-text generics."""
    exact = tuple(e for e in registry if e.language_tag == language_tag)
    if exact:
        return exact
    family = tuple(e for e in registry if _family(e.language_tag) == _family(language_tag))
    if family:
        return family
    return tuple(e for e in registry if e.language_tag == FALLBACK_LANGUAGE)


def _render_issue_table(issues: Sequence[IssueRecord]) -> str:
    rows = [
        f"- line {issue.line} ({issue.issue_type.value}): {issue.message}"
        for issue in issues
    ]
    return "\n".join(rows)


def _render_examples(examples: Iterable[FewShotExample]) -> str:
    blocks = []
    for example in examples:
        blocks.append(
            f"Language: {example.language_tag}\n"
            f"Issue: {example.issue_message}\n"
            f"Before:\n{example.flawed_snippet}\n"
            f"After:\n{example.fixed_snippet}"
        )
    return "\n\n".join(blocks) if blocks else "(none)"


def estimate_tokens(text: str) -> int:
    return (len(text) + _CHARS_PER_TOKEN - 1) // _CHARS_PER_TOKEN


def build_prompt(
    file_content: str,
    issues: Sequence[IssueRecord],
    mode: PromptMode,
    override: str | None = None,
    *,
    template: str | None = None,
    registry: Sequence[FewShotExample] | None = None,
    budget_tokens: int = DEFAULT_PROMPT_BUDGET_TOKENS,
) -> PromptSpec:
    """Compose the revision prompt for one file.

    Batch mode ignores ``override`` and marks the prompt non-editable.
    Interactive mode uses ``override`` verbatim as the user text when given.
    Raises PromptTooLarge instead of truncating oversized file content.
    """
    if not issues:
        raise EmptyIssueList("cannot build a prompt without issues")
    locations = {issue.file_location for issue in issues}
    if len(locations) > 1:
        raise MixedFiles(f"issues span multiple files: {sorted(locations)}")

    ordered = sorted(issues)
    language_tag = infer_language(ordered[0].file_name)
    examples = select_examples(registry if registry is not None else load_few_shots(), language_tag)

    # Single-pass substitution: placeholder-shaped text inside the file or the
    # issue messages must never be expanded.
    values = {
        "language": language_tag,
        "issue_table": _render_issue_table(ordered),
        "examples": _render_examples(examples),
        "file_content": file_content,
    }
    rendered = _PLACEHOLDER_RE.sub(
        lambda match: values[match.group(1)],
        template if template is not None else default_template(),
    )

    if mode is PromptMode.INTERACTIVE and override is not None:
        user_text = override
        editable = True
    else:
        user_text = rendered
        editable = mode is PromptMode.INTERACTIVE

    used = estimate_tokens(SYSTEM_TEXT) + estimate_tokens(user_text)
    if used > budget_tokens:
        raise PromptTooLarge(
            f"prompt needs ~{used} tokens, budget is {budget_tokens}; "
            "split the file or raise the budget"
        )

    return PromptSpec(
        system_text=SYSTEM_TEXT,
        user_text=user_text,
        examples=examples,
        language_tag=language_tag,
        editable=editable,
        file_location=ordered[0].file_location,
        file_content=file_content,
        issue_messages=tuple(issue.message for issue in ordered),
    )
