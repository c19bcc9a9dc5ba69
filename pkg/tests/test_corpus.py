"""The shipped rule corpus: every rule loads, runs, and discriminates."""

from __future__ import annotations

from pathlib import Path

import pytest

from conftest import make_stub_env
from pipelint.corpus import default_corpus_dir, list_rules, load_corpus
from pipelint.dsl import validate_rule
from pipelint.engine import Outcome, run_rule, type_check

CORPUS, CORPUS_ERRORS = load_corpus()

LLM_RULES = {
    "detect-hate-speech",
    "ensure-neutral-tone",
    "jargon-explanation-check",
    "objectivity-check",
    "section-completeness",
    "recipe-common-cookware-terms",
    "recipe-generic-ingredient-names",
    "recipe-ingredient-order",
    "recipe-single-task-steps",
    "recipe-substitutions-at-end",
}
NETWORK_RULES = {"no-unreachable-links"}

# rule -> (document that passes, document that fails)
STRUCTURAL_CASES = {
    "check-back-to-top-link-presence": (
        "intro\n\n[back to top](#top)\n",
        "intro only\n",
    ),
    "citation-bibtex-present": (
        "## Citation\n\n```bibtex\n@article{key,\n}\n```\n",
        "no citation here\n",
    ),
    "code-block-language-check": (
        "```python\nx = 1\n```\n",
        "```\nx = 1\n```\n",
    ),
    "consistent-heading-format": (
        "# Good Title\n\n## 2nd Part\n",
        "# bad title\n",
    ),
    "consistent-list-format": (
        "- item one\n- item two\n",
        "* item one\n",
    ),
    "date-validation-lint": (
        "Released 2024-01-15.\n",
        "Released 1/2/24.\n",
    ),
    "detect-duplicate-sentences": (
        "One thing here. Another thing there.\n",
        "Same old line here. Filler text.\nSame old line here.\n",
    ),
    "enforce-emoji-limit": (
        "one 🎉 here\n\nand 🚀 there\n",
        "🎉🎉 double\n",
    ),
    "enforce-newline-at-eof": (
        "ends properly\n",
        "no newline at end",
    ),
    "minimum-readme-length": (
        ("padding words " * 25).strip() + ".\n",
        "tiny\n",
    ),
    "no-trailing-whitespace": (
        "clean line\n",
        "dirty line  \n",
    ),
    "require-alt-text-for-images": (
        "![a diagram](x.png)\n",
        "![](x.png)\n",
    ),
    "sentence-length-limit": (
        "Short enough sentence.\n",
        "A" + "a" * 250 + ".\n",
    ),
    "table-of-contents-check": (
        "## Table of Contents\n",
        "just prose\n",
    ),
    "validate-internal-links-to-headings": (
        "# Setup\n\n[go](#setup)\n",
        "# Setup\n\n[go](#missing)\n",
    ),
    "recipe-title-present": (
        "# Cake\n",
        "## Only Subheading\n",
    ),
    "recipe-ingredients-section": (
        "## Ingredients\n",
        "## Shopping\n",
    ),
    "recipe-instructions-section": (
        "## Instructions\n",
        "## Afterword\n",
    ),
    "recipe-yield-stated": (
        "Serves 4.\n",
        "A tasty dish.\n",
    ),
    "recipe-nested-step-depth": (
        "- step\n  - sub\n",
        "- step\n    - deep\n",
    ),
    "recipe-temperature-format": (
        "Bake at 350°F.\n",
        "Bake at 350 degrees.\n",
    ),
    "recipe-weight-and-volume": (
        "- 2 cups (250 g) flour\n",
        "- 2 cups flour\n",
    ),
}


# --- corpus shape ---------------------------------------------------------


def test_corpus_loads_without_errors():
    assert CORPUS_ERRORS == []
    assert len(CORPUS.rules) == 33
    assert set(CORPUS.presets) == {
        "software-library",
        "interactive-system",
        "dataset-repository",
        "recipe-rules",
    }


def test_every_rule_case_is_covered_here():
    assert set(CORPUS.rules) == set(STRUCTURAL_CASES) | LLM_RULES | NETWORK_RULES


def test_rule_files_are_named_after_their_rule():
    for path in sorted((default_corpus_dir() / "rules").glob("*.yaml")):
        assert path.stem in CORPUS.rules


def test_every_rule_validates_and_type_checks():
    for rule in CORPUS.rules.values():
        assert validate_rule(rule) == [], rule.name
        assert type_check(rule) is None, rule.name


def test_presets_resolve_completely():
    for preset in CORPUS.presets.values():
        found, missing = CORPUS.resolve(preset)
        assert missing == []
        assert len(found) == len(preset.rule_names)
        assert preset.description


def test_preset_memberships():
    recipe = CORPUS.presets["recipe-rules"]
    assert sorted(recipe.rule_names) == sorted(
        n for n in CORPUS.rules if n.startswith("recipe-")
    )
    assert len(recipe.rule_names) == 12
    library = set(CORPUS.presets["software-library"].rule_names)
    assert {"enforce-emoji-limit", "no-trailing-whitespace", "table-of-contents-check"} <= library
    assert not any(n.startswith("recipe-") for n in library)
    interactive = set(CORPUS.presets["interactive-system"].rule_names)
    assert "check-back-to-top-link-presence" in interactive
    dataset = set(CORPUS.presets["dataset-repository"].rule_names)
    assert "citation-bibtex-present" in dataset


def test_severities_are_deliberate():
    assert CORPUS.rules["check-back-to-top-link-presence"].severity == "info"
    assert CORPUS.rules["sentence-length-limit"].severity == "warning"
    assert CORPUS.rules["ensure-neutral-tone"].severity == "warning"
    assert CORPUS.rules["enforce-emoji-limit"].severity == "error"


# --- structural rules discriminate ----------------------------------------


@pytest.mark.parametrize("rule_name", sorted(STRUCTURAL_CASES))
def test_structural_rule_accepts_its_positive_doc(rule_name):
    doc, _ = STRUCTURAL_CASES[rule_name]
    result = run_rule(doc, CORPUS.rules[rule_name], make_stub_env())
    assert result.outcome is Outcome.PASS, result.error or result.diagnostics


@pytest.mark.parametrize("rule_name", sorted(STRUCTURAL_CASES))
def test_structural_rule_rejects_its_negative_doc(rule_name):
    _, doc = STRUCTURAL_CASES[rule_name]
    result = run_rule(doc, CORPUS.rules[rule_name], make_stub_env())
    assert result.outcome is Outcome.FAIL, result.error or result.outcome
    assert result.diagnostics


def test_fixable_corpus_rules_carry_their_directive():
    result = run_rule(
        "dirty line  \n", CORPUS.rules["no-trailing-whitespace"], make_stub_env()
    )
    assert result.outcome is Outcome.FAIL
    assert result.fixable
    assert "trailing whitespace" in result.fix_directive["prompt"]


# --- judgment-call rules under the scripted model --------------------------


@pytest.mark.parametrize("rule_name", sorted(LLM_RULES))
def test_llm_rule_passes_under_the_default_script(rule_name):
    env = make_stub_env()
    result = run_rule("# A Document\n\nCalm and factual text.\n", CORPUS.rules[rule_name], env)
    assert result.outcome is Outcome.PASS
    assert env.transport_calls.calls == 0


@pytest.mark.parametrize("rule_name", sorted(LLM_RULES))
def test_llm_rule_fails_when_the_model_objects(rule_name):
    env = make_stub_env()
    env.provider.stub.add(
        "**FAIL**\nLine(s): 1\nIssue: the text violates the rule\nSuggestion: reword it",
        when=lambda system, user, name=rule_name: name in system,
    )
    result = run_rule("# A Document\n\nSome text.\n", CORPUS.rules[rule_name], env)
    assert result.outcome is Outcome.FAIL
    assert [d.span.start_line for d in result.diagnostics] == [1]
    assert env.transport_calls.calls == 0


def test_neutral_tone_failures_are_fixable():
    env = make_stub_env()
    env.provider.stub.add(
        "**FAIL**\nLine(s): 1\nIssue: loaded wording\nSuggestion: neutral wording",
        when=lambda system, user: "ensure-neutral-tone" in system,
    )
    result = run_rule("Blazingly amazing!\n", CORPUS.rules["ensure-neutral-tone"], env)
    assert result.outcome is Outcome.FAIL
    assert result.fixable


# --- the network rule ------------------------------------------------------


def test_link_rule_skips_without_network_access():
    result = run_rule(
        "[x](https://example.com)\n", CORPUS.rules["no-unreachable-links"], make_stub_env()
    )
    assert result.outcome is Outcome.SKIPPED


def test_link_rule_discriminates_against_loopback(loopback):
    env = make_stub_env(allow_network=True)
    rule = CORPUS.rules["no-unreachable-links"]
    ok = run_rule(f"[x]({loopback.url('/ok')})\n", rule, env)
    assert ok.outcome is Outcome.PASS
    broken = run_rule(f"[x]({loopback.url('/missing')})\n", rule, env)
    assert broken.outcome is Outcome.FAIL


# --- listing ----------------------------------------------------------------


def test_list_rules_sorted_and_filtered():
    everything = list_rules(CORPUS)
    assert len(everything) == 33
    assert everything == sorted(everything)
    (hit,) = list_rules(CORPUS, "emoji")
    assert hit[0] == "enforce-emoji-limit"
    assert list_rules(CORPUS, "zzz-no-such") == []


def test_list_rules_matches_descriptions_too():
    names = [name for name, _ in list_rules(CORPUS, "bibtex")]
    assert "citation-bibtex-present" in names


# --- degraded corpora -------------------------------------------------------


def _write_corpus(root: Path, rules: dict[str, str], presets: dict[str, str]):
    (root / "rules").mkdir(parents=True)
    (root / "presets").mkdir()
    for name, text in rules.items():
        (root / "rules" / name).write_text(text, "utf-8")
    for name, text in presets.items():
        (root / "presets" / name).write_text(text, "utf-8")


GOOD_RULE = """rule: good-rule
description: A fine rule.
pipeline:
  - operator: extract
    target: emoji
"""


def test_missing_directory_raises():
    with pytest.raises(OSError):
        load_corpus("/nonexistent/corpus")


def test_duplicate_rule_names_across_files(tmp_path):
    dupe = GOOD_RULE.replace("A fine rule.", "The same name again.")
    _write_corpus(tmp_path, {"a.yaml": GOOD_RULE, "z.yaml": dupe}, {})
    corpus, errors = load_corpus(tmp_path)
    assert list(corpus.rules) == ["good-rule"]
    assert corpus.rules["good-rule"].description == "A fine rule."
    assert errors == ["z.yaml: duplicate rule name 'good-rule'"]


def test_broken_rule_does_not_hide_the_rest(tmp_path):
    _write_corpus(
        tmp_path,
        {"bad.yaml": "rule: Bad Name\npipeline: []\n", "ok.yaml": GOOD_RULE},
        {},
    )
    corpus, errors = load_corpus(tmp_path)
    assert list(corpus.rules) == ["good-rule"]
    assert errors
    assert all(e.startswith("bad.yaml: ") for e in errors)


def test_preset_naming_unknown_rule_is_reported(tmp_path):
    preset = "name: demo\ndescription: d\nrules:\n  - good-rule\n  - ghost-rule\n"
    _write_corpus(tmp_path, {"ok.yaml": GOOD_RULE}, {"demo.yaml": preset})
    corpus, errors = load_corpus(tmp_path)
    assert list(corpus.presets) == ["demo"]
    assert errors == ["demo.yaml: preset names unknown rule 'ghost-rule'"]
    found, missing = corpus.resolve(corpus.presets["demo"])
    assert [r.name for r in found] == ["good-rule"]
    assert missing == ["ghost-rule"]


def test_duplicate_preset_names(tmp_path):
    preset = "name: demo\ndescription: d\nrules:\n  - good-rule\n"
    _write_corpus(
        tmp_path,
        {"ok.yaml": GOOD_RULE},
        {"a.yaml": preset, "b.yaml": preset},
    )
    corpus, errors = load_corpus(tmp_path)
    assert list(corpus.presets) == ["demo"]
    assert errors == ["b.yaml: duplicate preset name 'demo'"]
