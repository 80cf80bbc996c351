"""Prompt composition: language tags, templates, modes, budget."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reviser.errors import EmptyIssueList, MixedFiles, PromptTooLarge
from reviser.issues import IssueRecord, IssueType
from reviser.prompts import (
    FALLBACK_LANGUAGE,
    FewShotExample,
    PromptMode,
    build_prompt,
    infer_language,
    load_few_shots,
    select_examples,
)


@pytest.fixture
def app_issue():
    return IssueRecord(
        file_location="Project/client/src/App.jsx",
        line=12,
        message="A fragment with only one child is redundant.",
        issue_type=IssueType.CODE_SMELL,
    )


APP_CONTENT = "function App() {\n  return <div />;\n}\n"


class TestInferLanguage:
    @pytest.mark.parametrize(
        "name,expected",
        [
            ("App.jsx", "JavaScript (React)"),
            ("deployment.yaml", "YAML"),
            ("README", "plain text"),
            ("main.py", "Python"),
            ("widget.ts", "TypeScript"),
            ("Dockerfile", "Dockerfile"),
            (".gitignore", "plain text"),
            ("archive.unknownext", "plain text"),
        ],
    )
    def test_examples(self, name, expected):
        assert infer_language(name) == expected


class TestFewShots:
    def test_default_registry_loads(self):
        registry = load_few_shots()
        assert len(registry) == 12
        assert all(isinstance(e, FewShotExample) for e in registry)

    def test_exact_tag_selection(self):
        registry = load_few_shots()
        chosen = select_examples(registry, "Python")
        assert chosen and all(e.language_tag == "Python" for e in chosen)

    def test_family_fallback(self):
        registry = load_few_shots()
        chosen = select_examples(registry, "JavaScript (React)")
        assert chosen and all(e.language_tag.startswith("JavaScript") for e in chosen)

    def test_generic_fallback(self):
        registry = load_few_shots()
        chosen = select_examples(registry, "COBOL")
        assert chosen and all(e.language_tag == FALLBACK_LANGUAGE for e in chosen)

    def test_empty_fields_rejected(self):
        with pytest.raises(ValueError):
            FewShotExample(language_tag="Python", flawed_snippet="", issue_message="m", fixed_snippet="f")


class TestBuildPrompt:
    def test_batch_contains_issue_and_line(self, app_issue):
        spec = build_prompt(APP_CONTENT, [app_issue], PromptMode.BATCH)
        assert "A fragment with only one child is redundant." in spec.user_text
        assert "line 12" in spec.user_text
        assert APP_CONTENT in spec.user_text
        assert spec.editable is False
        assert spec.language_tag == "JavaScript (React)"

    def test_interactive_override_verbatim(self, app_issue):
        spec = build_prompt(APP_CONTENT, [app_issue], PromptMode.INTERACTIVE, override="FIX IT")
        assert spec.user_text == "FIX IT"
        assert spec.editable is True

    def test_interactive_without_override_is_editable_template(self, app_issue):
        spec = build_prompt(APP_CONTENT, [app_issue], PromptMode.INTERACTIVE)
        assert spec.editable is True
        assert "line 12" in spec.user_text

    def test_batch_ignores_override(self, app_issue):
        with_override = build_prompt(APP_CONTENT, [app_issue], PromptMode.BATCH, override="FIX IT")
        without = build_prompt(APP_CONTENT, [app_issue], PromptMode.BATCH)
        assert with_override == without

    def test_mixed_files_rejected(self, app_issue):
        other = IssueRecord("other.py", 1, "m", IssueType.BUG)
        with pytest.raises(MixedFiles):
            build_prompt(APP_CONTENT, [app_issue, other], PromptMode.BATCH)

    def test_empty_issue_list_rejected(self):
        with pytest.raises(EmptyIssueList):
            build_prompt(APP_CONTENT, [], PromptMode.BATCH)

    def test_deterministic(self, app_issue):
        first = build_prompt(APP_CONTENT, [app_issue], PromptMode.BATCH)
        second = build_prompt(APP_CONTENT, [app_issue], PromptMode.BATCH)
        assert first == second
        assert first.user_text == second.user_text

    def test_budget_enforced(self, app_issue):
        with pytest.raises(PromptTooLarge):
            build_prompt(APP_CONTENT, [app_issue], PromptMode.BATCH, budget_tokens=10)

    def test_no_unfilled_placeholders(self, app_issue):
        spec = build_prompt(APP_CONTENT, [app_issue], PromptMode.BATCH)
        assert "{{" not in spec.user_text

    def test_metadata_carries_routing_fields(self, app_issue):
        spec = build_prompt(APP_CONTENT, [app_issue], PromptMode.BATCH)
        assert spec.file_location == app_issue.file_location
        assert spec.file_content == APP_CONTENT
        assert spec.issue_messages == (app_issue.message,)

    def test_instructions_demand_complete_file(self, app_issue):
        spec = build_prompt(APP_CONTENT, [app_issue], PromptMode.BATCH)
        assert "complete revised file" in (spec.system_text + spec.user_text)


issue_lists = st.lists(
    st.builds(
        IssueRecord,
        file_location=st.just("pkg/mod.py"),
        line=st.integers(min_value=1, max_value=100000),
        message=st.text(
            alphabet=st.characters(codec="utf-8", exclude_categories=("Cs",), exclude_characters="\x00"),
            min_size=1,
            max_size=60,
        ).filter(lambda s: s.strip()),
        issue_type=st.sampled_from(IssueType),
    ),
    min_size=1,
    max_size=6,
)


@settings(max_examples=300, deadline=None)
@given(issues=issue_lists)
def test_every_issue_message_and_line_in_user_text(issues):
    spec = build_prompt("content = 1\n", issues, PromptMode.BATCH)
    for issue in issues:
        assert issue.message in spec.user_text
        assert f"line {issue.line}" in spec.user_text
