"""The command-line surface, driven in-process through click's runner."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from pipelint import llm
from pipelint.cli import main

STUB_ENV = {"PIPELINT_LLM_MODE": "stub"}


@pytest.fixture()
def runner():
    return CliRunner(env=STUB_ENV)


def write(tmp_path: Path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# --- run: formats and exit codes -------------------------------------------


def test_run_clean_file_exits_zero(runner, tmp_path):
    doc = write(tmp_path, "doc.md", "calm text\n")
    result = runner.invoke(main, ["run", doc, "--rules", "enforce-emoji-limit"])
    assert result.exit_code == 0
    assert result.output == f"{doc}: ok (1 rules passed)\n"


def test_run_reports_findings_and_exits_one(runner, tmp_path):
    doc = write(tmp_path, "doc.md", "🎉🎉 loud\n")
    result = runner.invoke(main, ["run", doc, "--rules", "enforce-emoji-limit"])
    assert result.exit_code == 1
    assert result.output == (
        f"{doc}:1:1 error enforce-emoji-limit line value 2 is not lessthan 2\n"
    )


def test_run_json_format(runner, tmp_path):
    doc = write(tmp_path, "doc.md", "🎉🎉 loud\n")
    result = runner.invoke(
        main, ["run", doc, "--rules", "enforce-emoji-limit", "--format", "json"]
    )
    assert result.exit_code == 1
    data = json.loads(result.output)
    assert data["formatVersion"] == 1
    assert data["documentPath"] == doc
    assert data["summary"]["errors"] == 1
    (rule_result,) = data["ruleResults"]
    assert rule_result["ruleName"] == "enforce-emoji-limit"
    assert rule_result["outcome"] == "fail"


def test_run_many_files_yields_a_json_array(runner, tmp_path):
    a = write(tmp_path, "a.md", "fine\n")
    b = write(tmp_path, "b.md", "also fine\n")
    result = runner.invoke(
        main, ["run", a, b, "--rules", "enforce-emoji-limit", "--format", "json"]
    )
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert [r["documentPath"] for r in data] == [a, b]


def test_run_unknown_rule_is_a_config_error(runner, tmp_path):
    doc = write(tmp_path, "doc.md", "text\n")
    result = runner.invoke(main, ["run", doc, "--rules", "no-such-rule"])
    assert result.exit_code == 2
    assert "configuration error: unknown rule 'no-such-rule'" in result.output


def test_run_unknown_preset_is_a_usage_error(runner, tmp_path):
    doc = write(tmp_path, "doc.md", "text\n")
    result = runner.invoke(main, ["run", doc, "--preset", "nope"])
    assert result.exit_code == 2
    assert "unknown preset 'nope'" in result.stderr
    assert "available presets:" in result.stderr


def test_run_preset_and_rules_are_exclusive(runner, tmp_path):
    doc = write(tmp_path, "doc.md", "text\n")
    result = runner.invoke(
        main, ["run", doc, "--preset", "recipe-rules", "--rules", "enforce-emoji-limit"]
    )
    assert result.exit_code == 2
    assert "mutually exclusive" in result.stderr


def test_run_missing_file_is_rejected(runner):
    result = runner.invoke(main, ["run", "/does/not/exist.md"])
    assert result.exit_code == 2


def test_run_halting_rule_exits_two(runner, tmp_path):
    rules_dir = tmp_path / "corpus"
    (rules_dir / "rules").mkdir(parents=True)
    (rules_dir / "presets").mkdir()
    (rules_dir / "rules" / "halt.yaml").write_text(
        "rule: halting-rule\ndescription: d\npipeline:\n  - operator: count\n",
        encoding="utf-8",
    )
    doc = write(tmp_path, "doc.md", "text\n")
    result = runner.invoke(main, ["run", doc, "--rules-dir", str(rules_dir)])
    assert result.exit_code == 2
    assert "rule halting-rule halted: step 1 (count)" in result.output


def test_run_ignore_flag_skips_rules(runner, tmp_path):
    doc = write(tmp_path, "doc.md", "🎉🎉 loud\n")
    result = runner.invoke(
        main,
        ["run", doc, "--rules", "enforce-emoji-limit", "--ignore", "enforce-emoji-limit"],
    )
    assert result.exit_code == 0
    assert "skipped (rule ignored globally)" in result.output


def test_run_preset_selects_its_rules(runner, tmp_path):
    doc = write(
        tmp_path,
        "recipe.md",
        "# Cake\n\nServes 2.\n\n## Ingredients\n\n- 100 g sugar\n\n## Instructions\n\n1. Mix.\n",
    )
    result = runner.invoke(
        main, ["run", doc, "--preset", "recipe-rules", "--format", "json"]
    )
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert len(data["ruleResults"]) == 12
    assert all(r["ruleName"].startswith("recipe-") for r in data["ruleResults"])


# --- run: report directory and fixes ----------------------------------------


def test_run_report_dir_writes_files(runner, tmp_path):
    doc = write(tmp_path, "doc.md", "🎉🎉 loud\n")
    out = tmp_path / "report"
    result = runner.invoke(
        main,
        ["run", doc, "--rules", "enforce-emoji-limit", "--report-dir", str(out)],
    )
    assert result.exit_code == 1
    for name in ("diagnostics.csv", "report.json", "outcomes.png"):
        assert (out / name).exists(), name
        assert f"wrote {out / name}" in result.stderr
    assert (out / "outcomes.png").read_bytes().startswith(b"\x89PNG")


def test_run_fix_writes_sidecars_only(runner, tmp_path):
    doc = write(tmp_path, "doc.md", "dirty line  \n")
    result = runner.invoke(
        main, ["run", doc, "--rules", "no-trailing-whitespace", "--fix"]
    )
    assert result.exit_code == 1
    sidecar = Path(f"{doc}.no-trailing-whitespace.0.fixed.md")
    assert sidecar.exists()
    assert f"wrote fix candidate {sidecar}" in result.stderr
    # the stub fixer echoes the document; the original is never rewritten
    assert sidecar.read_text("utf-8") == "dirty line  \n"
    assert Path(doc).read_text("utf-8") == "dirty line  \n"


def test_run_fix_skips_unfixable_rules(runner, tmp_path):
    doc = write(tmp_path, "doc.md", "🎉🎉 loud\n")
    result = runner.invoke(
        main, ["run", doc, "--rules", "enforce-emoji-limit", "--fix"]
    )
    assert result.exit_code == 1
    assert list(tmp_path.glob("*.fixed.md")) == []


# --- rules list / validate / generate ----------------------------------------


def test_rules_list_tab_separated(runner):
    result = runner.invoke(main, ["rules", "list"])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert len(lines) == 33
    names = [line.split("\t")[0] for line in lines]
    assert names == sorted(names)
    assert all("\t" in line for line in lines)


def test_rules_list_filter(runner):
    result = runner.invoke(main, ["rules", "list", "emoji"])
    assert result.output.splitlines() == [
        "enforce-emoji-limit\tLimit emoji usage at document, paragraph, and line levels."
    ]


def test_rules_validate_accepts_good_file(runner, tmp_path):
    path = write(
        tmp_path,
        "rule.yaml",
        "rule: my-rule\ndescription: d\npipeline:\n  - operator: extract\n    target: emoji\n",
    )
    result = runner.invoke(main, ["rules", "validate", path])
    assert result.exit_code == 0
    assert result.output == "ok: 1 rule(s) valid\n"


def test_rules_validate_rejects_bad_file(runner, tmp_path):
    path = write(tmp_path, "rule.yaml", "rule: Bad Name\npipeline: []\n")
    result = runner.invoke(main, ["rules", "validate", path])
    assert result.exit_code == 2
    assert "error:" in result.output


def test_rules_validate_empty_file(runner, tmp_path):
    path = write(tmp_path, "rule.yaml", "")
    result = runner.invoke(main, ["rules", "validate", path])
    assert result.exit_code == 2
    assert "no rule documents found" in result.output


def test_rules_generate_prints_valid_yaml(runner):
    result = runner.invoke(main, ["rules", "generate", "require two headings"])
    assert result.exit_code == 0
    assert "rule: require-two-headings" in result.output
    assert "pipeline:" in result.output


def test_rules_generate_failure_shows_raw_response(runner, monkeypatch):
    from pipelint.dsl import Violation

    def boom(idea, provider, model=None):
        raise llm.GenerationError("operator: nonsense", [Violation("pipeline", "bad")])

    monkeypatch.setattr(llm, "generate_rule", boom)
    result = runner.invoke(main, ["rules", "generate", "anything"])
    assert result.exit_code == 2
    assert "generation failed:" in result.stderr
    assert "operator: nonsense" in result.stderr


def test_version_flag(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert "pipelint" in result.output
