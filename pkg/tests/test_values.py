"""Pipeline value containers, comparators, and diagnostics."""

from __future__ import annotations

import pytest

from pipelint.mdcore import SourceSpan
from pipelint.values import (
    COMPARATORS,
    Diagnostic,
    Match,
    MetricEntry,
    MetricSummary,
    PipelineValue,
    ScopedExtraction,
    Severity,
    ThresholdCondition,
    ValueKind,
    Verdict,
    describe_value,
)

SPAN = SourceSpan(1, 1, 1, 5)


def test_all_value_kinds_constructible():
    values = [
        PipelineValue.document("text"),
        PipelineValue.extraction(ScopedExtraction({"document": []})),
        PipelineValue.metrics(MetricSummary({"document": []})),
        PipelineValue.diagnostics([]),
        PipelineValue.verdict(Verdict(status="pass")),
        PipelineValue.opaque({"anything": 1}),
    ]
    kinds = {v.kind for v in values}
    assert kinds == set(ValueKind) - {ValueKind.AST}


@pytest.mark.parametrize(
    "comparator,value,limit,expected",
    [
        ("lessthan", 1, 2, True),
        ("lessthan", 2, 2, False),
        ("lessthanorequal", 2, 2, True),
        ("lessthanorequal", 3, 2, False),
        ("greaterthan", 3, 2, True),
        ("greaterthan", 2, 2, False),
        ("greaterthanorequal", 2, 2, True),
        ("greaterthanorequal", 1, 2, False),
        ("equal", 2, 2, True),
        ("equal", 1, 2, False),
    ],
)
def test_threshold_condition_holds(comparator, value, limit, expected):
    cond = ThresholdCondition("document", comparator, limit)
    assert cond.holds(value) is expected


def test_threshold_condition_rejects_unknown_comparator():
    with pytest.raises(ValueError):
        ThresholdCondition("document", "approximately", 1)


def test_comparator_tuple_is_the_full_set():
    assert set(COMPARATORS) == {
        "lessthan",
        "lessthanorequal",
        "greaterthan",
        "greaterthanorequal",
        "equal",
    }


def test_metric_entry_rejects_negative_and_nan():
    with pytest.raises(ValueError):
        MetricEntry(SPAN, -1)
    with pytest.raises(ValueError):
        MetricEntry(SPAN, float("nan"))


def test_diagnostic_needs_message_and_serializes():
    with pytest.raises(ValueError):
        Diagnostic("r", Severity.ERROR, "", SPAN)
    diag = Diagnostic("r", Severity.WARNING, "msg", SPAN, fix_hint="try x")
    data = diag.to_dict()
    assert data["severity"] == "warning"
    assert data["span"] == {"startLine": 1, "startColumn": 1, "endLine": 1, "endColumn": 5}
    assert data["fixHint"] == "try x"
    assert "fixHint" not in Diagnostic("r", Severity.ERROR, "m", SPAN).to_dict()


def test_verdict_validation():
    with pytest.raises(ValueError):
        Verdict(status="maybe")
    with pytest.raises(ValueError):
        Verdict(status="fail")  # fail needs an issue
    with pytest.raises(ValueError):
        Verdict(status="fail", issue="x", lines=[0])
    ok = Verdict(status="fail", issue="x", lines=[2, 5], suggestion="fix it")
    assert ok.lines == [2, 5]


def test_scoped_extraction_all_matches_prefers_document():
    a = Match("a", SPAN)
    b = Match("b", SourceSpan(2, 1, 2, 2))
    ext = ScopedExtraction({"document": [a, b], "line": [a]})
    assert ext.all_matches() == [a, b]
    ext2 = ScopedExtraction({"line": [a], "paragraph": [a, b]})
    assert ext2.all_matches() == [a, b]


def test_describe_value_plain_data():
    ext = PipelineValue.extraction(
        ScopedExtraction({"document": [Match("hi", SPAN, node_kind="text")]})
    )
    described = describe_value(ext)
    assert described["kind"] == "extraction"
    assert described["byScope"]["document"] == [{"text": "hi", "line": 1, "nodeKind": "text"}]

    metrics = PipelineValue.metrics(MetricSummary({"document": [MetricEntry(SPAN, 3.0)]}))
    assert describe_value(metrics)["byScope"]["document"] == [{"line": 1, "value": 3}]

    verdict = PipelineValue.verdict(Verdict(status="fail", issue="why", lines=[4]))
    described = describe_value(verdict)
    assert described["status"] == "fail"
    assert described["lines"] == [4]
