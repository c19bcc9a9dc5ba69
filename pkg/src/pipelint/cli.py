"""Command-line surface: lint runs, the API server, and rule utilities."""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import click

from . import llm
from .corpus import RuleCorpus, load_corpus
from .corpus import list_rules as corpus_list_rules
from .dsl import load_rule_documents
from .engine import Environment, fix_one, run_rules
from .report import Report, exit_code, render_text, write_report_dir


def _build_env(allow_net: bool, allow_exec: bool, allow_scripts: bool) -> Environment:
    return Environment(
        provider=llm.Provider(llm.load_default_config()),
        allow_network=allow_net,
        allow_exec=allow_exec,
        allow_scripts=allow_scripts,
    )


def _select_rules(
    corpus: RuleCorpus, preset_name: Optional[str], rule_names: Optional[str]
) -> tuple[list, list[str]]:
    errors: list[str] = []
    if preset_name and rule_names:
        raise click.UsageError("--preset and --rules are mutually exclusive")
    if preset_name:
        preset = corpus.presets.get(preset_name)
        if preset is None:
            available = ", ".join(sorted(corpus.presets)) or "(none)"
            raise click.UsageError(
                f"unknown preset {preset_name!r}; available presets: {available}"
            )
        rules, missing = corpus.resolve(preset)
        errors.extend(
            f"preset {preset_name!r} names unknown rule {name!r}" for name in missing
        )
        return rules, errors
    if rule_names:
        rules = []
        for name in [n.strip() for n in rule_names.split(",") if n.strip()]:
            rule = corpus.rules.get(name)
            if rule is None:
                errors.append(f"unknown rule {name!r}")
            else:
                rules.append(rule)
        return rules, errors
    return list(corpus.rules.values()), errors


@click.group()
@click.version_option(package_name="pipelint", prog_name="pipelint")
def main() -> None:
    """Lint markdown documents with operator-pipeline rules."""


@main.command()
@click.argument(
    "files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False)
)
@click.option("--preset", "preset_name", help="Run a named preset.")
@click.option("--rules", "rule_names", help="Comma-separated rule names to run.")
@click.option(
    "--rules-dir",
    type=click.Path(exists=True, file_okay=False),
    help="Load the corpus from this directory instead of the shipped one.",
)
@click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text"
)
@click.option(
    "--fix", "apply_fix", is_flag=True, help="Write per-diagnostic fix candidates."
)
@click.option("--allow-net", is_flag=True, help="Permit network operators.")
@click.option("--allow-exec", is_flag=True, help="Permit the execute operator.")
@click.option("--allow-scripts", is_flag=True, help="Permit the customCode operator.")
@click.option(
    "--ignore",
    "global_ignores",
    multiple=True,
    help="Rule name to skip everywhere (repeatable).",
)
@click.option(
    "--report-dir",
    type=click.Path(file_okay=False),
    help="Also write diagnostics.csv, report.json, and an outcome figure here.",
)
def run(
    files: tuple[str, ...],
    preset_name: Optional[str],
    rule_names: Optional[str],
    rules_dir: Optional[str],
    fmt: str,
    apply_fix: bool,
    allow_net: bool,
    allow_exec: bool,
    allow_scripts: bool,
    global_ignores: tuple[str, ...],
    report_dir: Optional[str],
) -> None:
    """Lint FILES and print a text or JSON report per file."""
    corpus, load_errors = load_corpus(rules_dir or None)
    selected, selection_errors = _select_rules(corpus, preset_name, rule_names)
    config_errors = load_errors + selection_errors
    env = _build_env(allow_net, allow_exec, allow_scripts)

    def lint_one(path: str) -> Report:
        text = Path(path).read_text(encoding="utf-8")
        results = run_rules(text, selected, env, global_ignores=global_ignores)
        return Report(path, results, config_errors=list(config_errors))

    try:
        if len(files) == 1:
            reports = [lint_one(files[0])]
        else:
            with ThreadPoolExecutor(max_workers=min(4, len(files))) as pool:
                reports = list(pool.map(lint_one, files))
    except OSError as exc:
        raise click.UsageError(str(exc)) from exc

    if fmt == "json":
        if len(reports) == 1:
            click.echo(reports[0].to_json(), nl=False)
        else:
            click.echo(
                json.dumps(
                    [r.to_dict() for r in reports], indent=2, ensure_ascii=False
                )
            )
    else:
        for report in reports:
            click.echo(render_text(report), nl=False)

    if report_dir:
        for written in write_report_dir(reports, report_dir):
            click.echo(f"wrote {written}", err=True)

    if apply_fix:
        for path, report in zip(files, reports):
            _write_fix_candidates(path, corpus, report, env)

    sys.exit(exit_code(reports))


def _write_fix_candidates(
    path: str, corpus: RuleCorpus, report: Report, env: Environment
) -> None:
    """One sidecar file per (rule, diagnostic); the original is never touched."""
    text = Path(path).read_text(encoding="utf-8")
    for result in report.results:
        if not (result.fixable and result.diagnostics):
            continue
        rule = corpus.rules.get(result.rule_name)
        if rule is None:
            continue
        for i in range(len(result.diagnostics)):
            try:
                fixed, _ = fix_one(text, rule, i, env)
            except (ValueError, llm.FixFormatError, llm.ProviderError) as exc:
                click.echo(f"fix failed for {result.rule_name}[{i}]: {exc}", err=True)
                continue
            sidecar = Path(f"{path}.{result.rule_name}.{i}.fixed.md")
            sidecar.write_text(fixed, encoding="utf-8")
            click.echo(f"wrote fix candidate {sidecar}", err=True)
            if sys.stdin.isatty() and click.confirm(
                f"apply this fix over {path}?", default=False
            ):
                Path(path).write_text(fixed, encoding="utf-8")
                click.echo(f"applied fix to {path}", err=True)
                text = fixed


@main.command()
@click.option("--port", default=8787, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--rules-dir", type=click.Path(exists=True, file_okay=False))
@click.option("--allow-net", is_flag=True)
@click.option("--allow-exec", is_flag=True)
@click.option("--allow-scripts", is_flag=True)
def serve(
    port: int,
    host: str,
    rules_dir: Optional[str],
    allow_net: bool,
    allow_exec: bool,
    allow_scripts: bool,
) -> None:
    """Serve the JSON API the playground talks to."""
    import uvicorn

    from .server import create_app

    corpus, errors = load_corpus(rules_dir or None)
    app = create_app(
        corpus=corpus,
        env=_build_env(allow_net, allow_exec, allow_scripts),
        corpus_errors=errors,
    )
    uvicorn.run(app, host=host, port=port)


@main.group()
def rules() -> None:
    """Inspect, validate, and generate rules."""


@rules.command("list")
@click.argument("query", required=False)
@click.option("--rules-dir", type=click.Path(exists=True, file_okay=False))
def rules_list(query: Optional[str], rules_dir: Optional[str]) -> None:
    """List rules as name<TAB>description, optionally filtered."""
    corpus, errors = load_corpus(rules_dir or None)
    for name, description in corpus_list_rules(corpus, query):
        click.echo(f"{name}\t{description}")
    for message in errors:
        click.echo(f"warning: {message}", err=True)


@rules.command("validate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
def rules_validate(file: str) -> None:
    """Validate a rule file; violations exit 2."""
    text = Path(file).read_text(encoding="utf-8")
    parsed, violations = load_rule_documents(text)
    failed = False
    for violation in violations:
        prefix = f"{violation.path}: " if violation.path else ""
        click.echo(f"{violation.level}: {prefix}{violation.message}")
        failed = failed or violation.level == "error"
    if failed or not parsed:
        if not parsed and not failed:
            click.echo("error: no rule documents found")
        sys.exit(2)
    click.echo(f"ok: {len(parsed)} rule(s) valid")


@rules.command("generate")
@click.argument("idea")
@click.option("--model", default=None, help="Override the configured model id.")
def rules_generate(idea: str, model: Optional[str]) -> None:
    """Turn a natural-language idea into validated rule YAML."""
    provider = llm.Provider(llm.load_default_config())
    try:
        text = llm.generate_rule(idea, provider, model=model)
    except llm.GenerationError as exc:
        click.echo("generation failed:", err=True)
        for violation in exc.violations:
            click.echo(f"  {violation.message}", err=True)
        click.echo("raw response:", err=True)
        click.echo(exc.raw_response, err=True)
        sys.exit(2)
    except llm.ProviderError as exc:
        click.echo(f"provider error: {exc}", err=True)
        sys.exit(2)
    click.echo(text, nl=not text.endswith("\n"))
