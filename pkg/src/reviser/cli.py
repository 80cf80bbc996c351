"""Command-line front door: extract, revise-all, hybrid, compare, report, serve.

Exit codes are part of the contract: 2 auth failure, 3 transport failure
(extract); 4 any failed file (revise-all, hybrid); 1 missing input file
(compare). Secrets are taken from environment variables named on the command
line, never from flags. Machine-readable output goes to stdout, human text to
stderr.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from dataclasses import dataclass
from decimal import Decimal
from importlib import resources
from pathlib import Path

import click

from .analyzers import MockAnalysisProvider, SonarScanAnalysisProvider, load_analyzer_rules
from .diffs import DiffFormat, diff_texts, render_diff
from .errors import AuthError, ProjectNotFound, SchemaError, TransportError
from .gateway import Gateway, HttpChatProvider, MockProvider, load_mock_rules, load_pricing
from .issues import IssueType, count_by_type, read_csv, write_csv
from .orchestrator import RevisionEngine, RevisionStatus, any_failed, cost_per_type
from .prompts import load_few_shots
from .reporting import (
    ReportFormat,
    Strategy,
    emit_report,
    format_usd,
    read_ledger,
    savings_vs_advanced,
)
from .sonar_client import ServerConfig, fetch_issues

log = logging.getLogger(__name__)

EXIT_AUTH = 2
EXIT_TRANSPORT = 3
EXIT_FAILED_FILES = 4


@dataclass
class CliConfig:
    pricing_file: str | None = None
    template_file: str | None = None
    few_shots_file: str | None = None
    mock_rules: str | None = None
    api_key_env: str = "OPENAI_API_KEY"
    provider_base_url: str = "https://api.openai.com/v1"
    workers: int = 4
    prompt_budget_tokens: int = 50_000

    @classmethod
    def load(cls, path: str | None) -> "CliConfig":
        if path is None:
            return cls()
        data = json.loads(Path(path).read_text("utf-8"))
        config = cls(**data)
        for name in ("pricing_file", "template_file", "few_shots_file", "mock_rules"):
            value = getattr(config, name)
            if value is not None and not Path(value).is_file():
                raise click.ClickException(f"config {name} points at missing file {value}")
        if config.workers < 1:
            raise click.ClickException("workers must be >= 1")
        return config


def _default_pricing_path() -> Path:
    return Path(str(resources.files("reviser.data").joinpath("pricing.csv")))


def build_engine(config: CliConfig, mock_rules: str | None = None) -> RevisionEngine:
    pricing = load_pricing(config.pricing_file or _default_pricing_path())
    rules_path = mock_rules or config.mock_rules
    if rules_path:
        provider = MockProvider(load_mock_rules(rules_path))
    else:
        provider = HttpChatProvider(
            base_url=config.provider_base_url, api_key_env=config.api_key_env
        )
    gateway = Gateway(
        providers={model_id: provider for model_id in pricing},
        pricing=pricing,
        max_in_flight=config.workers,
    )
    template = Path(config.template_file).read_text("utf-8") if config.template_file else None
    registry = load_few_shots(config.few_shots_file) if config.few_shots_file else None
    return RevisionEngine(
        gateway=gateway,
        template=template,
        registry=registry,
        budget_tokens=config.prompt_budget_tokens,
        workers=config.workers,
    )


def _read_records(csv_path: str):
    with open(csv_path, "rb") as handle:
        return read_csv(handle)


def _echo_summary(results) -> None:
    revised = sum(1 for r in results if r.status == RevisionStatus.REVISED)
    unchanged = sum(1 for r in results if r.status == RevisionStatus.UNCHANGED)
    failed = sum(1 for r in results if r.status == RevisionStatus.FAILED)
    ok = revised + unchanged
    click.echo(
        f"files: {revised} revised, {unchanged} unchanged, {failed} failed "
        f"({ok}/{len(results)})",
        err=True,
    )
    costs = cost_per_type(results)
    for issue_type in IssueType:
        targeted = sum(
            1 for r in results for issue in r.issues_targeted if issue.issue_type is issue_type
        )
        if targeted:
            click.echo(
                f"{issue_type.value}: {targeted} issue(s) targeted, "
                f"cost {format_usd(costs[issue_type])}",
                err=True,
            )
    total = sum((r.cost for r in results), start=Decimal("0"))
    click.echo(f"total cost: {format_usd(total)}", err=True)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON config overriding defaults (pricing, template, few-shots, provider).")
@click.option("--verbose", is_flag=True, default=False)
@click.pass_context
def main(ctx, config_path, verbose):
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = CliConfig.load(config_path)


@main.command()
@click.option("--server-url", required=True)
@click.option("--token-env", required=True, help="Environment variable holding the API token.")
@click.option("--project-key", required=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--page-size", default=100, show_default=True)
def extract(server_url, token_env, project_key, out_path, page_size):
    """Pull a project's open issues into the canonical CSV."""
    token = os.environ.get(token_env, "")
    if not token:
        click.echo(f"error: environment variable {token_env} is not set", err=True)
        sys.exit(EXIT_AUTH)
    try:
        config = ServerConfig(server_url=server_url, api_token=token, project_key=project_key)
        records = fetch_issues(config, page_size=page_size)
    except AuthError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_AUTH)
    except (TransportError, ProjectNotFound, SchemaError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_TRANSPORT)
    with open(out_path, "wb") as handle:
        write_csv(records, handle)
    for issue_type, count in count_by_type(records).items():
        click.echo(f"{issue_type.value}: {count}", err=True)
    click.echo(f"wrote {len(records)} issue(s) to {out_path}", err=True)


@main.command("revise-all")
@click.option("--csv", "csv_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--root", "root_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--model", required=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Output tree (default: sibling <root>.Revised).")
@click.option("--mock-rules", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Route all models to the rule-based mock provider.")
@click.pass_obj
def revise_all_cmd(config: CliConfig, csv_path, root_dir, model, out_dir, mock_rules):
    """Revise every file named in the issues CSV with one model."""
    records = _read_records(csv_path)
    if not records:
        click.echo("nothing to do: issues CSV is empty", err=True)
        return
    engine = build_engine(config, mock_rules)
    results = engine.revise_all(records, root_dir, model, out_dir)
    _echo_summary(results)
    if any_failed(results):
        sys.exit(EXIT_FAILED_FILES)


def _build_analyzer(spec: str, token_env: str, project_key: str | None):
    kind, _, value = spec.partition(":")
    if kind == "mock":
        return MockAnalysisProvider(load_analyzer_rules(value))
    if kind == "sonar":
        token = os.environ.get(token_env, "")
        if not token or not project_key:
            raise click.ClickException(
                "sonar analyzer needs --analyzer-project-key and the token env var set"
            )
        return SonarScanAnalysisProvider(
            ServerConfig(server_url=value, api_token=token, project_key=project_key)
        )
    raise click.ClickException(f"unknown analyzer spec {spec!r}; use mock:FIXTURE or sonar:URL")


@main.command()
@click.option("--csv", "csv_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--root", "root_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--cheap", required=True, help="Model for the first pass.")
@click.option("--advanced", required=True, help="Model for issues the first pass left behind.")
@click.option("--analyzer", required=True, help="mock:FIXTURE or sonar:URL rescan provider.")
@click.option("--analyzer-token-env", default="SONAR_TOKEN", show_default=True)
@click.option("--analyzer-project-key", default=None)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None)
@click.option("--mock-rules", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_obj
def hybrid(config: CliConfig, csv_path, root_dir, cheap, advanced, analyzer,
           analyzer_token_env, analyzer_project_key, out_dir, mock_rules):
    """Cheap-then-advanced pipeline: revise, rescan, re-revise the remainder."""
    records = _read_records(csv_path)
    if not records:
        click.echo("nothing to do: issues CSV is empty", err=True)
        return
    engine = build_engine(config, mock_rules)
    provider = _build_analyzer(analyzer, analyzer_token_env, analyzer_project_key)
    outcome = engine.hybrid_pipeline(records, root_dir, cheap, advanced, provider, out_dir)
    click.echo(emit_report(outcome.ledger, ReportFormat.TEXT), err=True)
    _echo_summary(outcome.stage1 + outcome.stage2)
    if any_failed(outcome.stage1) or any_failed(outcome.stage2):
        sys.exit(EXIT_FAILED_FILES)


@main.command()
@click.option("--original", "original_path", required=True, type=click.Path(dir_okay=False))
@click.option("--revised", "revised_path", required=True, type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["tty", "html", "structured"]), default="tty",
              show_default=True)
def compare(original_path, revised_path, fmt):
    """Line-level diff of two files with precision/recall/F1."""
    for path in (original_path, revised_path):
        if not Path(path).is_file():
            click.echo(f"error: {path} is not a readable file", err=True)
            sys.exit(1)
    original = Path(original_path).read_text("utf-8", errors="replace")
    revised = Path(revised_path).read_text("utf-8", errors="replace")
    diff, metrics = diff_texts(original, revised)
    metrics_line = (
        f"precision={metrics.precision:.4f} recall={metrics.recall:.4f} f1={metrics.f1:.4f}"
    )
    if fmt == "structured":
        rows = render_diff(diff, DiffFormat.STRUCTURED)
        click.echo(json.dumps({"diff": rows, "metrics": metrics.__dict__}))
        click.echo(metrics_line, err=True)
    elif fmt == "html":
        click.echo(render_diff(diff, DiffFormat.SIDE_BY_SIDE_HTML), nl=False)
        click.echo(metrics_line, err=True)
    else:
        click.echo(render_diff(diff, DiffFormat.TERMINAL), nl=False)
        click.echo(metrics_line)


@main.command()
@click.option("--ledger", "ledger_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["text", "html", "structured"]), default="text",
              show_default=True)
def report(ledger_path, fmt):
    """Render a persisted cost ledger as the per-type comparison table."""
    ledger = read_ledger(ledger_path)
    if fmt == "structured":
        click.echo(json.dumps(emit_report(ledger, ReportFormat.STRUCTURED_ROWS)))
    elif fmt == "html":
        click.echo(emit_report(ledger, ReportFormat.HTML), nl=False)
    else:
        click.echo(emit_report(ledger, ReportFormat.TEXT), nl=False)
    hybrid_total = ledger.total_cost(Strategy.HYBRID)
    advanced_total = ledger.total_cost(Strategy.ADVANCED_ONLY)
    if hybrid_total and advanced_total:
        click.echo(
            f"hybrid savings vs advanced-only: {savings_vs_advanced(hybrid_total, advanced_total)}%",
            err=True,
        )


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--root", "root_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None)
@click.option("--static-dir", type=click.Path(file_okay=False), default=None,
              help="Built UI bundle to host at / (default: ./frontend/dist if present).")
@click.option("--mock-rules", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_obj
def serve(config: CliConfig, port, host, root_dir, out_dir, static_dir, mock_rules):
    """Run the HTTP service for the interactive workflow."""
    import uvicorn

    from .service import create_app

    engine = build_engine(config, mock_rules)
    if static_dir is None and Path("frontend/dist").is_dir():
        static_dir = "frontend/dist"
    app = create_app(root_dir, engine, output_root=out_dir, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
