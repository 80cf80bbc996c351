"""Acceptance suite: every release criterion at its stated tolerance.

Each test prints one PASS line when its criterion holds; tolerances are fixed
here, not tuned elsewhere. The live-model revision rates reported for the
original experiments depend on proprietary files and paid models; the
deterministic mock fixtures below are the committed substitute, and the
recorded count discrepancy between the source text and its tables is
documented, not adjudicated.
"""

from __future__ import annotations

import random
import shutil
import time
from decimal import Decimal
from pathlib import Path

import pytest

from conftest import FIXTURES, build_engine_with_rules
from reviser.analyzers import MockAnalysisProvider, load_analyzer_rules
from reviser.diffs import compute_metrics, line_diff, replay, reverse_replay
from reviser.issues import IssueRecord, IssueType, read_csv, write_csv
from reviser.orchestrator import (
    ledger_path_for,
    manifest_path_for,
    revised_file_name,
)
from reviser.reporting import Strategy, read_ledger, savings_vs_advanced, success_rate

import io


def announce(criterion: str):
    print(f"ACCEPTANCE PASS: {criterion}")


RATE_TOLERANCE = Decimal("0.05")  # percentage points, on 1-decimal rates
SAVINGS_TOLERANCE = Decimal("0.1")


def assert_rate(ledger, issue_type, strategy, expected: str):
    entry = ledger.get(issue_type, strategy)
    rate = success_rate(entry.issues_resolved, entry.issues_total)
    assert abs(rate - Decimal(expected)) <= RATE_TOLERANCE, (
        f"{issue_type}/{strategy}: {rate} != {expected} ±{RATE_TOLERANCE}"
    )


def check_ledger_replay(path: Path, totals, hybrid_costs, stage_costs, cheap_rates, advanced_rates):
    started = time.perf_counter()
    ledger = read_ledger(path)
    types = (IssueType.BUG, IssueType.VULNERABILITY, IssueType.CODE_SMELL)

    for issue_type, expected_total in zip(types, totals):
        assert ledger.total_issues(issue_type) == expected_total
    assert sum(ledger.total_issues(t) for t in types) == sum(totals)

    for issue_type, expected_cost, (stage1, stage2) in zip(types, hybrid_costs, stage_costs):
        cheap = ledger.get(issue_type, Strategy.CHEAP_ONLY)
        remaining = ledger.get(issue_type, Strategy.ADVANCED_ON_REMAINING)
        hybrid = ledger.get(issue_type, Strategy.HYBRID)
        assert cheap.cost_usd == Decimal(stage1)
        assert remaining.cost_usd == Decimal(stage2)
        assert hybrid.cost_usd == Decimal(stage1) + Decimal(stage2)
        assert hybrid.cost_usd == Decimal(expected_cost)
        assert hybrid.issues_resolved == cheap.issues_resolved + remaining.issues_resolved

    for issue_type, expected in zip(types, cheap_rates):
        assert_rate(ledger, issue_type, Strategy.CHEAP_ONLY, expected)
    for issue_type, expected in zip(types, advanced_rates):
        assert_rate(ledger, issue_type, Strategy.ADVANCED_ONLY, expected)

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"ledger replay took {elapsed:.3f}s, budget is 1s"


def test_table2_ledger_replay():
    check_ledger_replay(
        FIXTURES / "ledgers" / "experiment1.csv",
        totals=(234, 61, 7304),
        hybrid_costs=("4.76", "0.38", "26.82"),
        stage_costs=(("1.68", "3.08"), ("0.25", "0.13"), ("8.13", "18.69")),
        cheap_rates=("50.0", "96.7", "50.9"),
        advanced_rates=("100.0", "100.0", "81.2"),
    )
    assert sum((234, 61, 7304)) == 7599
    announce(
        "experiment-1 ledger replay: totals 234/61/7304 (sum 7,599), hybrid costs "
        "$4.76/$0.38/$26.82 as exact stage sums, rates 50.0/96.7/50.9 and "
        "100/100/81.2 within ±0.05pp, under 1s"
    )


def test_table3_ledger_replay():
    check_ledger_replay(
        FIXTURES / "ledgers" / "experiment2.csv",
        totals=(21, 2, 401),
        hybrid_costs=("0.90", "0.01", "1.71"),
        stage_costs=(("0.31", "0.59"), ("0.01", "0.00"), ("1.05", "0.66")),
        cheap_rates=("90.4", "100.0", "92.0"),
        advanced_rates=("100.0", "100.0", "99.0"),
    )
    announce(
        "experiment-2 ledger replay: totals 21/2/401, hybrid costs "
        "$0.90/$0.01/$1.71, rates 90.4/100/92 and 100/100/99 within ±0.05pp, under 1s"
    )


def test_hybrid_savings_over_advanced_only():
    ledger1 = read_ledger(FIXTURES / "ledgers" / "experiment1.csv")
    savings1 = savings_vs_advanced(
        ledger1.total_cost(Strategy.HYBRID), ledger1.total_cost(Strategy.ADVANCED_ONLY)
    )
    assert abs(savings1 - Decimal("19.7")) <= SAVINGS_TOLERANCE

    ledger2 = read_ledger(FIXTURES / "ledgers" / "experiment2.csv")
    savings2 = savings_vs_advanced(
        ledger2.total_cost(Strategy.HYBRID), ledger2.total_cost(Strategy.ADVANCED_ONLY)
    )
    assert abs(savings2 - Decimal("75.4")) <= SAVINGS_TOLERANCE
    announce(
        "hybrid savings over advanced-only: 19.7% (experiment 1) and 75.4% "
        "(experiment 2), ±0.1pp, derived from the replayed table totals; the "
        "'up to 40%' headline is not a target (documented discrepancy)"
    )


def lcs_length_oracle(a, b) -> int:
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) - 1, -1, -1):
        for j in range(len(b) - 1, -1, -1):
            if a[i] == b[j]:
                table[i][j] = table[i + 1][j + 1] + 1
            else:
                table[i][j] = max(table[i + 1][j], table[i][j + 1])
    return table[0][0]


def test_diff_oracle_suite():
    started = time.perf_counter()
    rng = random.Random(0xD1FF)
    alphabet = ["v", "w", "x", "y", "z"]
    cases = 0
    while cases < 1000:
        original = [rng.choice(alphabet) for _ in range(rng.randint(0, 30))]
        revised = [rng.choice(alphabet) for _ in range(rng.randint(0, 30))]
        diff = line_diff(original, revised)
        metrics = compute_metrics(diff)

        assert metrics.matched == lcs_length_oracle(original, revised)
        assert replay(diff) == revised
        assert reverse_replay(diff) == original
        for value in (metrics.precision, metrics.recall, metrics.f1):
            assert 0.0 <= value <= 1.0
        mirrored = compute_metrics(line_diff(revised, original))
        assert mirrored.precision == metrics.recall
        assert mirrored.recall == metrics.precision
        cases += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"diff oracle suite took {elapsed:.1f}s, budget is 30s"
    announce(
        f"diff oracle suite: {cases} random pairs match the brute-force LCS, "
        f"replay reconstructs both sides, bounds and symmetry hold, in {elapsed:.1f}s"
    )


def random_issue_record(rng: random.Random) -> IssueRecord:
    message_pool = [
        "plain message",
        'quotes "inside" here',
        "comma, separated, clauses",
        "line\nbreak",
        "crlf\r\nbreak",
        "unicode café 中文 — ok",
        "trailing space ",
        "semi;colon",
    ]
    parts = [rng.choice("abcdefgh") + str(rng.randint(0, 99)) for _ in range(rng.randint(1, 4))]
    return IssueRecord(
        file_location="/".join(parts) + rng.choice([".py", ".jsx", ".yaml", ""]) ,
        line=rng.randint(1, 100000),
        message=rng.choice(message_pool) + " #" + str(rng.randint(0, 10**6)),
        issue_type=rng.choice(list(IssueType)),
    )


def test_csv_round_trip(table1_records):
    sink = io.BytesIO()
    write_csv(table1_records, sink)
    golden = (FIXTURES / "table1.csv").read_bytes()
    assert sink.getvalue() == golden
    assert read_csv(io.BytesIO(sink.getvalue())) == table1_records

    rng = random.Random(4180)
    records = [random_issue_record(rng) for _ in range(1000)]
    first = io.BytesIO()
    write_csv(records, first)
    parsed = read_csv(io.BytesIO(first.getvalue()))
    assert parsed == records
    second = io.BytesIO()
    write_csv(parsed, second)
    assert second.getvalue() == first.getvalue()
    announce(
        "CSV round-trip: the three reference rows hit the golden file exactly; "
        "1000 randomized records survive a write/read cycle byte-exact"
    )


def test_naming_and_tree_conventions(tmp_path):
    rng = random.Random(811)
    root = tmp_path / "proj"
    directories = ["", "app", "app/core", "lib", "lib/utils/deep"]
    all_files = []
    for index in range(40):
        rel_dir = rng.choice(directories)
        rel = (f"{rel_dir}/" if rel_dir else "") + f"mod_{index:02d}.py"
        target = root / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(f"thing_{index} = bug({index})\n")
        all_files.append(rel)
    with_issues = sorted(rng.sample(all_files, 25))
    records = [
        IssueRecord(rel, 1, f"Issue inside {rel}.", IssueType.BUG) for rel in with_issues
    ]

    from reviser.gateway import Gateway, MockProvider, MockRule, ModelPricing

    provider = MockProvider([MockRule(action="replace", find="bug(", replace="fixed(")])
    gateway = Gateway(
        providers={"m": provider},
        pricing={"m": ModelPricing("m", Decimal("0.001"), Decimal("0.002"))},
    )
    from reviser.orchestrator import RevisionEngine

    engine = RevisionEngine(gateway=gateway)
    engine.revise_all(records, root, "m")

    out = tmp_path / "proj.Revised"
    expected = {
        str(Path(rel).parent / revised_file_name(Path(rel).name)).replace("\\", "/").lstrip("./")
        for rel in with_issues
    }
    expected = {path[2:] if path.startswith("./") else path for path in expected}
    actual = {str(p.relative_to(out)) for p in out.rglob("*") if p.is_file()}
    assert actual == expected
    announce(
        "naming conventions: outputs exist at <root>.Revised/<relative>/Revised.<name> "
        "for all 25 files with issues and nowhere else"
    )


def run_bundled_hybrid(tmp_path: Path, run_name: str):
    base = tmp_path / run_name
    root = base / "project"
    shutil.copytree(FIXTURES / "hybrid" / "project", root)
    engine = build_engine_with_rules(FIXTURES / "hybrid" / "provider_rules.json")
    analyzer = MockAnalysisProvider(
        load_analyzer_rules(FIXTURES / "hybrid" / "analyzer_rules.json")
    )
    with open(FIXTURES / "hybrid" / "issues.csv", "rb") as handle:
        records = read_csv(handle)
    outcome = engine.hybrid_pipeline(records, root, "mock-cheap", "mock-advanced", analyzer)
    out = outcome.output_root
    tree = {
        str(p.relative_to(out)): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()
    }
    return outcome, tree, manifest_path_for(out).read_bytes(), ledger_path_for(out).read_bytes()


def test_end_to_end_determinism(tmp_path):
    outcome1, tree1, manifest1, ledger_bytes1 = run_bundled_hybrid(tmp_path, "one")
    outcome2, tree2, manifest2, ledger_bytes2 = run_bundled_hybrid(tmp_path, "two")

    assert tree1 == tree2
    assert manifest1 == manifest2
    assert ledger_bytes1 == ledger_bytes2

    cheap = outcome1.ledger.get(IssueType.BUG, Strategy.CHEAP_ONLY)
    remaining = outcome1.ledger.get(IssueType.BUG, Strategy.ADVANCED_ON_REMAINING)
    hybrid = outcome1.ledger.get(IssueType.BUG, Strategy.HYBRID)
    assert cheap.issues_resolved == 117
    assert remaining.issues_resolved == 117
    assert hybrid.issues_resolved == 234
    assert hybrid.issues_resolved == cheap.issues_resolved + remaining.issues_resolved
    announce(
        "end-to-end determinism: two hybrid runs on the bundled mock project produced "
        "byte-identical trees, manifests, and ledgers; resolved composition 117+117=234"
    )


def test_live_model_quality_substituted_by_mock_fixtures():
    # The original experiments' revision quality (71.6% / 85.5% over 7,599
    # issues) needs proprietary inputs and paid models. The committed
    # substitute is the deterministic fixture set exercised above; this run
    # only asserts the substitutes ship with the repo.
    for name in ("provider_rules.json", "analyzer_rules.json", "issues.csv"):
        assert (FIXTURES / "hybrid" / name).is_file()
    assert (FIXTURES / "ledgers" / "experiment1.csv").is_file()
    assert (FIXTURES / "ledgers" / "experiment2.csv").is_file()
    announce(
        "live-model revision quality is out of scope by design; deterministic mock "
        "fixtures and ledger replays stand in (recorded, not adjudicated)"
    )
