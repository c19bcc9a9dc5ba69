"""threshold, regexMatch, and compare: operators whose findings decide rules."""

from __future__ import annotations

import difflib
import re
from typing import Any

from ..dsl import OperatorStep
from ..mdcore import LineIndex
from ..values import (
    Match,
    PipelineValue,
    ScopedExtraction,
    ThresholdCondition,
    ValueKind,
)
from .base import OperatorError, register
from .extraction import previous_items


def _fmt(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else str(value)


@register("threshold")
def threshold_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    if value.kind is not ValueKind.METRICS:
        raise OperatorError(f"threshold needs metrics, got {value.kind.value}")
    conditions = [
        ThresholdCondition(c["scope"], c["comparator"], float(c["limit"]))
        for c in step.get("conditions")
    ]
    diags = []
    for cond in conditions:
        entries = value.payload.by_scope.get(cond.scope)
        if entries is None:
            raise OperatorError(
                f"threshold condition targets scope {cond.scope!r} but the metrics "
                f"carry only {sorted(value.payload.by_scope)}"
            )
        for entry in entries:
            if not cond.holds(entry.value):
                diags.append(
                    ctx.diagnostic(
                        f"{cond.scope} value {_fmt(entry.value)} is not "
                        f"{cond.comparator} {_fmt(cond.limit)}",
                        entry.span,
                    )
                )
    ctx.record(diags)
    return PipelineValue.diagnostics(diags)


def _clip(text: str, width: int = 60) -> str:
    flat = " ".join(text.split())
    return flat if len(flat) <= width else flat[: width - 3] + "..."


@register("regexMatch")
def regex_match_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    raw_patterns = step.get("patterns")
    try:
        patterns = [re.compile(p) for p in raw_patterns]
    except re.error as exc:
        raise OperatorError(f"invalid pattern: {exc}") from exc
    mode = step.get("mode")
    scope = step.get("scope")

    if scope == "previous":
        items = previous_items(ctx, value)
    else:
        index = LineIndex(ctx.markdown)
        items = [
            Match(line, index.line_span(i))
            for i, line in enumerate(index.lines, start=1)
        ]

    flagged = []
    diags = []
    for item in items:
        hit = next((p for p in patterns if p.search(item.text)), None)
        if mode == "match" and hit is not None:
            flagged.append(item)
            diags.append(
                ctx.diagnostic(
                    f"'{_clip(item.text)}' matches pattern {hit.pattern!r}",
                    item.span,
                )
            )
        elif mode == "unmatch" and hit is None:
            flagged.append(item)
            diags.append(
                ctx.diagnostic(
                    f"'{_clip(item.text)}' matches none of the expected patterns",
                    item.span,
                )
            )
    ctx.record(diags)
    return PipelineValue.extraction(ScopedExtraction({"document": flagged}))


def _side_items(ctx: Any, ref: int) -> list[Match]:
    if ref == 0:
        value = PipelineValue.document(ctx.markdown)
    else:
        value = ctx.step_outputs[ref - 1]
    if value.kind is ValueKind.METRICS:
        return [
            Match(_fmt(e.value), e.span)
            for entries in value.payload.by_scope.values()
            for e in entries
        ]
    if value.kind in (ValueKind.DIAGNOSTICS, ValueKind.VERDICT, ValueKind.AST):
        raise OperatorError(f"compare cannot use a {value.kind.value} step output")
    return previous_items(ctx, value)


def _token_set_similarity(a: str, b: str) -> float:
    ta = set(a.casefold().split())
    tb = set(b.casefold().split())
    if not ta and not tb:
        return 1.0
    return len(ta & tb) / len(ta | tb)


@register("compare")
def compare_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    baseline = _side_items(ctx, int(step.get("baseline")))
    against = _side_items(ctx, int(step.get("against")))
    mode = step.get("comparison_mode")
    diags = []
    if mode == "structural":
        report = step.get("report")
        against_texts = {m.text for m in against}
        baseline_texts = {m.text for m in baseline}
        if report in ("missing", "both"):
            for m in baseline:
                if m.text not in against_texts:
                    diags.append(
                        ctx.diagnostic(
                            f"'{_clip(m.text)}' has no counterpart in the compared output",
                            m.span,
                        )
                    )
        if report in ("extra", "both"):
            for m in against:
                if m.text not in baseline_texts:
                    diags.append(
                        ctx.diagnostic(
                            f"'{_clip(m.text)}' is not present in the baseline output",
                            m.span,
                        )
                    )
    else:
        text_a = "\n".join(m.text for m in baseline)
        text_b = "\n".join(m.text for m in against)
        if step.get("similarity_method") == "sequence":
            score = difflib.SequenceMatcher(None, text_a, text_b).ratio()
        else:
            score = _token_set_similarity(text_a, text_b)
        limit = float(step.get("threshold"))
        if score < limit:
            diags.append(
                ctx.diagnostic(
                    f"similarity {score:.2f} is below the threshold {limit}",
                    LineIndex(ctx.markdown).document_span(),
                )
            )
    ctx.record(diags)
    return PipelineValue.diagnostics(diags)
