"""Values that flow between pipeline steps, and the diagnostic type."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .mdcore import AstNode, SourceSpan


class ValueKind(enum.Enum):
    DOCUMENT = "document"
    AST = "ast"
    EXTRACTION = "extraction"
    METRICS = "metrics"
    DIAGNOSTICS = "diagnostics"
    VERDICT = "verdict"
    OPAQUE = "opaque"


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class Match:
    text: str
    span: SourceSpan
    node_kind: Optional[str] = None


@dataclass
class ScopedExtraction:
    """Matches grouped per requested scope; every requested scope is a key."""

    by_scope: dict[str, list[Match]] = field(default_factory=dict)

    def all_matches(self) -> list[Match]:
        if "document" in self.by_scope:
            return list(self.by_scope["document"])
        seen: list[Match] = []
        for matches in self.by_scope.values():
            for m in matches:
                if m not in seen:
                    seen.append(m)
        return seen


@dataclass(frozen=True)
class MetricEntry:
    span: SourceSpan
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value < 0:
            raise ValueError(f"metric value must be finite and >= 0: {self.value}")


@dataclass
class MetricSummary:
    by_scope: dict[str, list[MetricEntry]] = field(default_factory=dict)


COMPARATORS = ("lessthan", "lessthanorequal", "greaterthan", "greaterthanorequal", "equal")


@dataclass(frozen=True)
class ThresholdCondition:
    scope: str
    comparator: str
    limit: float

    def __post_init__(self) -> None:
        if self.comparator not in COMPARATORS:
            raise ValueError(f"unknown comparator: {self.comparator!r}")

    def holds(self, value: float) -> bool:
        if self.comparator == "lessthan":
            return value < self.limit
        if self.comparator == "lessthanorequal":
            return value <= self.limit
        if self.comparator == "greaterthan":
            return value > self.limit
        if self.comparator == "greaterthanorequal":
            return value >= self.limit
        return value == self.limit


@dataclass
class Diagnostic:
    rule_name: str
    severity: Severity
    message: str
    span: SourceSpan
    fix_hint: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.message:
            raise ValueError("diagnostic message must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "ruleName": self.rule_name,
            "severity": self.severity.value,
            "message": self.message,
            "span": self.span.to_dict(),
        }
        if self.fix_hint is not None:
            data["fixHint"] = self.fix_hint
        return data


@dataclass
class Verdict:
    """Outcome of an LLM evaluation, parsed from the mandated format."""

    status: str  # "pass" | "fail"
    lines: list[int] = field(default_factory=list)
    issue: str = ""
    suggestion: str = ""

    def __post_init__(self) -> None:
        if self.status not in ("pass", "fail"):
            raise ValueError(f"verdict status must be pass or fail: {self.status!r}")
        if self.status == "fail" and not self.issue:
            raise ValueError("failing verdict needs a non-empty issue")
        if any(line < 1 for line in self.lines):
            raise ValueError("verdict lines are 1-based")


@dataclass
class PipelineValue:
    kind: ValueKind
    payload: Any

    @classmethod
    def document(cls, text: str) -> "PipelineValue":
        return cls(ValueKind.DOCUMENT, text)

    @classmethod
    def ast(cls, node: AstNode) -> "PipelineValue":
        return cls(ValueKind.AST, node)

    @classmethod
    def extraction(cls, value: ScopedExtraction) -> "PipelineValue":
        return cls(ValueKind.EXTRACTION, value)

    @classmethod
    def metrics(cls, value: MetricSummary) -> "PipelineValue":
        return cls(ValueKind.METRICS, value)

    @classmethod
    def diagnostics(cls, diags: list[Diagnostic]) -> "PipelineValue":
        return cls(ValueKind.DIAGNOSTICS, diags)

    @classmethod
    def verdict(cls, value: Verdict) -> "PipelineValue":
        return cls(ValueKind.VERDICT, value)

    @classmethod
    def opaque(cls, value: Any) -> "PipelineValue":
        return cls(ValueKind.OPAQUE, value)


def describe_value(value: PipelineValue) -> Any:
    """Plain-data rendering used for previews and LLM context blocks."""
    if value.kind is ValueKind.DOCUMENT:
        return {"kind": "document", "text": value.payload}
    if value.kind is ValueKind.AST:
        return {"kind": "ast", "nodes": _describe_node(value.payload)}
    if value.kind is ValueKind.EXTRACTION:
        return {
            "kind": "extraction",
            "byScope": {
                scope: [
                    {"text": m.text, "line": m.span.start_line}
                    | ({"nodeKind": m.node_kind} if m.node_kind else {})
                    for m in matches
                ]
                for scope, matches in value.payload.by_scope.items()
            },
        }
    if value.kind is ValueKind.METRICS:
        return {
            "kind": "metrics",
            "byScope": {
                scope: [
                    {"line": e.span.start_line, "value": _plain_number(e.value)}
                    for e in entries
                ]
                for scope, entries in value.payload.by_scope.items()
            },
        }
    if value.kind is ValueKind.DIAGNOSTICS:
        return {
            "kind": "diagnostics",
            "items": [
                {"line": d.span.start_line, "severity": d.severity.value, "message": d.message}
                for d in value.payload
            ],
        }
    if value.kind is ValueKind.VERDICT:
        verdict: Verdict = value.payload
        return {
            "kind": "verdict",
            "status": verdict.status,
            "lines": verdict.lines,
            "issue": verdict.issue,
            "suggestion": verdict.suggestion,
        }
    return {"kind": "opaque", "value": value.payload}


def _plain_number(value: float) -> Any:
    return int(value) if float(value).is_integer() else value


def _describe_node(node: AstNode) -> Any:
    out: dict[str, Any] = {"kind": node.kind, "line": node.span.start_line}
    if node.attrs:
        out["attrs"] = node.attrs
    if node.children:
        out["children"] = [_describe_node(c) for c in node.children]
    return out
