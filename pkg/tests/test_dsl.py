"""Rule YAML parsing, validation, and serialization."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pipelint.dsl import (
    OperatorStep,
    Rule,
    RuleError,
    load_preset_text,
    load_rule_documents,
    parse_rule,
    serialize_rule,
    validate_rule,
)

EMOJI_RULE_YAML = """\
rule: enforce-emoji-limit
description: Limit emoji usage at document, paragraph, and line levels.
pipeline:
  - operator: extract
    target: emoji
    scopes: [document, paragraph, line]
  - operator: count
  - operator: threshold
    conditions:
      - scope: document
        comparator: lessthan
        limit: 20
      - scope: paragraph
        comparator: lessthan
        limit: 4
      - scope: line
        comparator: lessthan
        limit: 2
"""


def test_parse_rule_roundtrip_fields():
    rule = parse_rule(EMOJI_RULE_YAML)
    assert rule.name == "enforce-emoji-limit"
    assert rule.severity == "error"
    assert [s.operator_id for s in rule.pipeline] == ["extract", "count", "threshold"]
    conditions = rule.pipeline[2].params["conditions"]
    assert conditions[0] == {"scope": "document", "comparator": "lessthan", "limit": 20}


def test_parse_rule_missing_keys():
    with pytest.raises(RuleError) as err:
        parse_rule("rule: x\npipeline:\n  - operator: count\n")
    messages = [v.message for v in err.value.violations]
    assert any("description" in m for m in messages)


def test_validation_collects_multiple_violations():
    text = """\
rule: Bad Name!
description: d
pipeline:
  - operator: nonexistent
  - operator: threshold
    conditions:
      - scope: chapter
        comparator: almost
        limit: one
"""
    rules, violations = load_rule_documents(text)
    assert rules == []
    paths = {v.path for v in violations if v.level == "error"}
    assert "rule" in paths
    assert "pipeline[0].operator" in paths
    assert "pipeline[1].conditions[0].scope" in paths
    assert "pipeline[1].conditions[0].comparator" in paths
    assert "pipeline[1].conditions[0].limit" in paths


def test_validation_flags_unknown_fields_and_bad_enum():
    text = """\
rule: r
description: d
pipeline:
  - operator: extract
    target: heading
    bogus: 1
  - operator: regexMatch
    patterns: ['[unclosed']
    mode: sideways
"""
    rules, violations = load_rule_documents(text)
    assert rules == []
    joined = "\n".join(v.message for v in violations)
    assert "bogus" in joined
    assert "invalid regex" in joined
    assert "'sideways' is not one of" in joined


def test_validation_checks_compare_references():
    text = """\
rule: r
description: d
pipeline:
  - operator: extract
    target: heading
  - operator: compare
    baseline: 1
    against: 5
"""
    rules, violations = load_rule_documents(text)
    assert rules == []
    assert any("does not resolve" in v.message for v in violations)


def test_unknown_top_level_key_is_a_warning_not_error():
    text = EMOJI_RULE_YAML + "notes: extra\n"
    rules, violations = load_rule_documents(text)
    assert len(rules) == 1
    assert all(v.level == "warning" for v in violations)


def test_multi_document_rule_files():
    text = EMOJI_RULE_YAML + "---\nrule: second\ndescription: d\npipeline:\n  - operator: length\n"
    rules, violations = load_rule_documents(text)
    assert [r.name for r in rules] == ["enforce-emoji-limit", "second"]
    assert violations == []


def test_yaml_syntax_error_reported_with_line():
    rules, violations = load_rule_documents("rule: [unterminated\n")
    assert rules == []
    assert "YAML syntax error" in violations[0].message


def test_serialize_rule_roundtrips():
    rule = parse_rule(EMOJI_RULE_YAML)
    text = serialize_rule(rule)
    again = parse_rule(text)
    assert again == rule


def test_serialize_keeps_only_explicit_optional_params():
    rule = Rule("r", "d", (OperatorStep("extract", {"target": "heading"}),))
    text = serialize_rule(rule)
    assert "scopes" not in text  # default left implicit
    assert "target: heading" in text


_TARGETS = st.sampled_from(["heading", "link", "emoji", "inlineCode", "word"])
_SCOPES = st.lists(
    st.sampled_from(["document", "paragraph", "line", "collection"]),
    min_size=1,
    max_size=4,
    unique=True,
)
_CONDITION = st.fixed_dictionaries(
    {
        "scope": st.sampled_from(["document", "paragraph", "line", "collection"]),
        "comparator": st.sampled_from(
            ["lessthan", "lessthanorequal", "greaterthan", "greaterthanorequal", "equal"]
        ),
        "limit": st.integers(min_value=0, max_value=50),
    }
)


@st.composite
def generated_rules(draw):
    steps = [
        OperatorStep("extract", {"target": draw(_TARGETS), "scopes": draw(_SCOPES)}),
        OperatorStep("count", {}),
    ]
    if draw(st.booleans()):
        steps.append(
            OperatorStep(
                "threshold",
                {"conditions": draw(st.lists(_CONDITION, min_size=1, max_size=3))},
            )
        )
    name = draw(st.from_regex(r"[a-z][a-z0-9-]{0,20}", fullmatch=True))
    description = draw(st.text(min_size=1, max_size=40).filter(lambda s: s.strip()))
    severity = draw(st.sampled_from(["error", "warning", "info"]))
    return Rule(name, description, tuple(steps), severity)


@settings(max_examples=80, deadline=None)
@given(generated_rules())
def test_serialize_parse_roundtrip_property(rule):
    assert validate_rule(rule) == []
    assert parse_rule(serialize_rule(rule)) == rule


def test_serialize_survives_yaml_line_break_characters():
    # NEL/LS/PS read back as folded whitespace unless the emitter escapes them
    for ch in ("\x85", " ", " "):
        rule = Rule(
            name="break-check",
            description=f"before{ch}after",
            pipeline=(
                OperatorStep("extract", {"target": "heading", "scopes": ["document"]}),
                OperatorStep("count", {}),
            ),
            severity="error",
        )
        assert parse_rule(serialize_rule(rule)) == rule


def test_load_preset_text():
    preset, violations = load_preset_text(
        "name: p\ndescription: d\nrules:\n  - a\n  - b\n"
    )
    assert violations == []
    assert preset.name == "p"
    assert preset.rule_names == ("a", "b")

    bad, violations = load_preset_text("rules: notalist\n", source="x.yaml")
    assert bad is None
    assert violations
