from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from reviser.gateway import Gateway, MockProvider, load_mock_rules, load_pricing
from reviser.issues import IssueRecord, IssueType
from reviser.orchestrator import RevisionEngine

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def table1_records() -> list[IssueRecord]:
    return [
        IssueRecord(
            file_location="Project/client/src/App.jsx",
            line=12,
            message="A fragment with only one child is redundant.",
            issue_type=IssueType.CODE_SMELL,
        ),
        IssueRecord(
            file_location="Project/client/src/components/OfflineControl.jsx",
            line=116,
            message=(
                "Visible, non-interactive elements with click handlers must have "
                "at least one keyboard listener."
            ),
            issue_type=IssueType.BUG,
        ),
        IssueRecord(
            file_location="Project/deploy/helm/dis/deployment.yaml",
            line=20,
            message="Specify a CPU limit for this container.",
            issue_type=IssueType.VULNERABILITY,
        ),
    ]


@pytest.fixture
def table1_project(tmp_path: Path) -> Path:
    root = tmp_path / "Project"
    shutil.copytree(FIXTURES / "table1_project" / "Project", root)
    return root


@pytest.fixture
def hybrid_project(tmp_path: Path) -> Path:
    root = tmp_path / "project"
    shutil.copytree(FIXTURES / "hybrid" / "project", root)
    return root


def build_engine_with_rules(rules_path: Path | None, workers: int = 4) -> RevisionEngine:
    """Engine wired to the mock provider for every model in the default
    pricing table."""
    from importlib import resources

    pricing = load_pricing(str(resources.files("reviser.data").joinpath("pricing.csv")))
    provider = MockProvider(load_mock_rules(rules_path) if rules_path else [])
    gateway = Gateway(
        providers={model_id: provider for model_id in pricing},
        pricing=pricing,
        backoff_base_s=0.0,
    )
    return RevisionEngine(gateway=gateway, workers=workers)


@pytest.fixture
def table1_engine() -> RevisionEngine:
    return build_engine_with_rules(FIXTURES / "table1_rules.json")


@pytest.fixture
def hybrid_engine() -> RevisionEngine:
    return build_engine_with_rules(FIXTURES / "hybrid" / "provider_rules.json")
