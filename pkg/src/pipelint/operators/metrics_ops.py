"""count and length: collapse extractions (or the raw document) to numbers."""

from __future__ import annotations

from typing import Any

from ..dsl import OperatorStep
from ..mdcore import LineIndex
from ..values import (
    Match,
    MetricEntry,
    MetricSummary,
    PipelineValue,
    ValueKind,
)
from .base import OperatorError, register


def _count_scope(ctx: Any, scope: str, matches: list[Match]) -> list[MetricEntry]:
    index = LineIndex(ctx.markdown)
    if scope == "document":
        # document scope always yields one total, even when nothing matched
        return [MetricEntry(index.document_span(), float(len(matches)))]
    if scope == "line":
        per_line: dict[int, int] = {}
        for m in matches:
            per_line[m.span.start_line] = per_line.get(m.span.start_line, 0) + 1
        return [
            MetricEntry(index.line_span(line), float(n))
            for line, n in sorted(per_line.items())
        ]
    entries = []
    for seg in ctx.segments(scope):
        n = sum(
            1
            for m in matches
            if seg.span.contains_point(m.span.start_line, m.span.start_column)
        )
        if n:
            entries.append(MetricEntry(seg.span, float(n)))
    return entries


@register("count")
def count_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    if value.kind is not ValueKind.EXTRACTION:
        raise OperatorError(f"count needs an extraction, got {value.kind.value}")
    by_scope = {
        scope: _count_scope(ctx, scope, matches)
        for scope, matches in value.payload.by_scope.items()
    }
    return PipelineValue.metrics(MetricSummary(by_scope))


@register("length")
def length_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    index = LineIndex(ctx.markdown)
    if value.kind is ValueKind.DOCUMENT:
        by_scope = {
            "document": [MetricEntry(index.document_span(), float(len(ctx.markdown)))],
            "line": [
                MetricEntry(index.line_span(i), float(len(line)))
                for i, line in enumerate(index.lines, start=1)
            ],
        }
        return PipelineValue.metrics(MetricSummary(by_scope))
    if value.kind is not ValueKind.EXTRACTION:
        raise OperatorError(f"length needs an extraction or the document, got {value.kind.value}")
    by_scope = {}
    for scope, matches in value.payload.by_scope.items():
        if scope == "document":
            by_scope[scope] = [
                MetricEntry(
                    index.document_span(), float(sum(len(m.text) for m in matches))
                )
            ]
        else:
            by_scope[scope] = [
                MetricEntry(m.span, float(len(m.text))) for m in matches
            ]
    return PipelineValue.metrics(MetricSummary(by_scope))
