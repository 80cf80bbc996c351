"""Diff engine against a brute-force LCS oracle, plus metrics and renderers."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reviser.diffs import (
    DiffFormat,
    DiffKind,
    DiffLine,
    compute_metrics,
    detect_terminator,
    diff_texts,
    from_structured,
    join_lines,
    line_diff,
    render_diff,
    render_html,
    render_terminal,
    replay,
    reverse_replay,
    split_lines,
    to_structured,
)


def lcs_length_oracle(a: list[str], b: list[str]) -> int:
    # Straight dynamic program over all prefixes; independent of the
    # implementation under test (which walks Myers diagonals).
    rows = len(a)
    cols = len(b)
    table = [[0] * (cols + 1) for _ in range(rows + 1)]
    for i in range(rows - 1, -1, -1):
        for j in range(cols - 1, -1, -1):
            if a[i] == b[j]:
                table[i][j] = table[i + 1][j + 1] + 1
            else:
                table[i][j] = max(table[i + 1][j], table[i][j + 1])
    return table[0][0]


class TestLineDiffExamples:
    def test_identical_inputs_all_unchanged(self):
        lines = ["alpha", "beta", "gamma"]
        diff = line_diff(lines, lines)
        assert all(d.kind is DiffKind.UNCHANGED for d in diff)
        metrics = compute_metrics(diff)
        assert (metrics.removed, metrics.added) == (0, 0)

    def test_single_replacement(self):
        diff = line_diff(["a", "b", "c"], ["a", "x", "c"])
        kinds = [(d.kind, d.text) for d in diff]
        assert kinds == [
            (DiffKind.UNCHANGED, "a"),
            (DiffKind.REMOVED, "b"),
            (DiffKind.ADDED, "x"),
            (DiffKind.UNCHANGED, "c"),
        ]
        assert lcs_length_oracle(["a", "b", "c"], ["a", "x", "c"]) == 2

    def test_empty_original(self):
        diff = line_diff([], ["a"])
        assert [(d.kind, d.text) for d in diff] == [(DiffKind.ADDED, "a")]

    def test_empty_both(self):
        assert line_diff([], []) == []

    def test_line_numbers_are_one_based_and_consistent(self):
        diff = line_diff(["a", "b", "c"], ["a", "x", "c"])
        assert diff[0].original_line_no == 1 and diff[0].revised_line_no == 1
        assert diff[1].original_line_no == 2 and diff[1].revised_line_no is None
        assert diff[2].original_line_no is None and diff[2].revised_line_no == 2
        assert diff[3].original_line_no == 3 and diff[3].revised_line_no == 3


class TestDiffLineInvariants:
    def test_unchanged_needs_both_numbers(self):
        with pytest.raises(ValueError):
            DiffLine(DiffKind.UNCHANGED, 1, None, "x")

    def test_removed_forbids_revised_number(self):
        with pytest.raises(ValueError):
            DiffLine(DiffKind.REMOVED, 1, 1, "x")

    def test_added_forbids_original_number(self):
        with pytest.raises(ValueError):
            DiffLine(DiffKind.ADDED, 1, 1, "x")


sequences = st.lists(st.sampled_from(["v", "w", "x", "y", "z"]), max_size=30)


class TestDiffProperties:
    @settings(max_examples=1000, deadline=None)
    @given(original=sequences, revised=sequences)
    def test_matched_equals_oracle_lcs(self, original, revised):
        diff = line_diff(original, revised)
        metrics = compute_metrics(diff)
        assert metrics.matched == lcs_length_oracle(original, revised)

    @settings(max_examples=500, deadline=None)
    @given(original=sequences, revised=sequences)
    def test_replay_reconstructs_both_sides(self, original, revised):
        diff = line_diff(original, revised)
        assert replay(diff) == revised
        assert reverse_replay(diff) == original

    @settings(max_examples=500, deadline=None)
    @given(original=sequences, revised=sequences)
    def test_metric_bounds_and_symmetry(self, original, revised):
        forward = compute_metrics(line_diff(original, revised))
        backward = compute_metrics(line_diff(revised, original))
        for value in (forward.precision, forward.recall, forward.f1):
            assert 0.0 <= value <= 1.0
        assert forward.precision == backward.recall
        assert forward.recall == backward.precision
        assert forward.f1 == backward.f1

    @settings(max_examples=500, deadline=None)
    @given(original=sequences, revised=sequences)
    def test_f1_is_one_iff_no_changes(self, original, revised):
        diff = line_diff(original, revised)
        metrics = compute_metrics(diff)
        no_changes = metrics.removed == 0 and metrics.added == 0
        assert (metrics.f1 == 1.0) == no_changes

    @settings(max_examples=300, deadline=None)
    @given(original=sequences, revised=sequences)
    def test_deterministic(self, original, revised):
        assert line_diff(original, revised) == line_diff(original, revised)


class TestComputeMetrics:
    def test_identical_files_score_one(self):
        metrics = compute_metrics(line_diff(["a", "b"], ["a", "b"]))
        assert (metrics.precision, metrics.recall, metrics.f1) == (1.0, 1.0, 1.0)

    def test_replacement_scores_two_thirds(self):
        metrics = compute_metrics(line_diff(["a", "b", "c"], ["a", "x", "c"]))
        assert metrics.matched == 2 and metrics.removed == 1 and metrics.added == 1
        assert metrics.precision == 0.6667
        assert metrics.recall == 0.6667
        assert metrics.f1 == 0.6667

    def test_empty_revised_convention(self):
        metrics = compute_metrics(line_diff(["a"], []))
        assert (metrics.precision, metrics.recall, metrics.f1) == (0.0, 0.0, 0.0)

    def test_empty_original_convention(self):
        metrics = compute_metrics(line_diff([], ["a"]))
        assert metrics.precision == 0.0
        assert metrics.recall == 0.0

    def test_both_empty_vacuously_identical(self):
        metrics = compute_metrics(line_diff([], []))
        assert (metrics.precision, metrics.recall, metrics.f1) == (1.0, 1.0, 1.0)

    def test_counts_partition_both_files(self):
        original = ["a", "b", "c", "d"]
        revised = ["b", "c", "e"]
        metrics = compute_metrics(line_diff(original, revised))
        assert metrics.matched + metrics.removed == len(original)
        assert metrics.matched + metrics.added == len(revised)


class TestSplitJoin:
    def test_final_newline_does_not_create_empty_line(self):
        assert split_lines("a\nb\n") == ["a", "b"]
        assert split_lines("a\nb") == ["a", "b"]

    def test_crlf_terminators(self):
        assert split_lines("a\r\nb\r\n") == ["a", "b"]

    def test_empty_text(self):
        assert split_lines("") == []

    def test_detect_terminator(self):
        assert detect_terminator("a\r\nb\r\nc\n") == "\r\n"
        assert detect_terminator("a\nb\n") == "\n"
        assert detect_terminator("") == "\n"

    def test_join_round_trip_preserves_terminator(self):
        text = "a\r\nb\r\n"
        lines = split_lines(text)
        assert join_lines(lines, detect_terminator(text)) == text


class TestRenderers:
    def test_structured_round_trips(self):
        diff = line_diff(["a", "b", "c"], ["a", "x", "c"])
        assert from_structured(to_structured(diff)) == diff

    def test_empty_diff_renders_valid_documents(self):
        assert render_html([]).startswith("<!DOCTYPE html>")
        assert render_terminal([]) == ""
        assert render_diff([], DiffFormat.STRUCTURED) == []

    def test_html_highlights_one_yellow_and_one_green_row(self):
        diff = line_diff(["a", "b", "c"], ["a", "x", "c"])
        document = render_html(diff)
        assert document.count('class="wall-removed"') == 1
        assert document.count('class="wall-added"') == 1
        assert "&lt;" not in document.split("<style>")[0]

    def test_html_escapes_content(self):
        diff = line_diff(["<script>"], ["<b>"])
        document = render_html(diff)
        assert "<script>" not in document
        assert "&lt;script&gt;" in document

    def test_terminal_markers(self):
        diff = line_diff(["a", "b"], ["a", "x"])
        output = render_terminal(diff, color=False)
        assert output == "  a\n- b\n+ x\n"
        colored = render_terminal(diff, color=True)
        assert "\x1b[33m- b\x1b[0m" in colored
        assert "\x1b[32m+ x\x1b[0m" in colored


class TestDiffTexts:
    def test_whitespace_sensitive_by_default(self):
        diff, metrics = diff_texts("a \n", "a\n")
        assert metrics.matched == 0

    def test_normalization_flag(self):
        diff, metrics = diff_texts("a \n", "a\n", strip_trailing_ws=True)
        assert metrics.matched == 1

    def test_mixed_terminators_compare_by_content(self):
        diff, metrics = diff_texts("a\r\nb\r\n", "a\nb\n")
        assert metrics.matched == 2
