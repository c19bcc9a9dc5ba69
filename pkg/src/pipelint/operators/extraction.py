"""extract and search: turn documents into scoped match collections."""

from __future__ import annotations

import re
from typing import Any
from urllib.parse import unquote

from ..catalog import EXTRACT_NODE_TARGETS, EXTRACT_PATTERN_TARGETS
from ..dsl import OperatorStep
from ..emoji import find_emoji
from ..mdcore import AstNode, LineIndex, SourceSpan
from ..values import Match, PipelineValue, ScopedExtraction, ValueKind
from .base import OperatorError, register

_DATE_RE = re.compile(
    r"\b\d{4}-\d{2}-\d{2}\b"
    r"|\b\d{1,2}/\d{1,2}/\d{2,4}\b"
    r"|\b(?:Jan(?:uary)?|Feb(?:ruary)?|Mar(?:ch)?|Apr(?:il)?|May|Jun(?:e)?|Jul(?:y)?"
    r"|Aug(?:ust)?|Sep(?:tember)?|Oct(?:ober)?|Nov(?:ember)?|Dec(?:ember)?)\.?\s+\d{1,2},\s+\d{4}\b"
)
_WORD_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9'\-]*")
_SENTENCE_RE = re.compile(r"[^.!?]+[.!?]+")
_SLUG_STRIP_RE = re.compile(r"[^\w\- ]")


def _node_text(node: AstNode, index: LineIndex) -> str:
    if node.kind == "image":
        return str(node.attrs.get("alt", ""))
    if node.kind in ("text", "inlineCode", "html"):
        return str(node.attrs.get("value", ""))
    return index.slice(node.span)


def _plain_text(node: AstNode) -> str:
    parts = []
    for n in node.walk():
        if n.kind in ("text", "inlineCode"):
            parts.append(str(n.attrs.get("value", "")))
    return "".join(parts)


def slugify_heading(text: str) -> str:
    """GitHub-style anchor slug for a heading's rendered text."""
    return _SLUG_STRIP_RE.sub("", text.strip().lower()).replace(" ", "-")


def _code_line_ranges(ast: AstNode) -> list[tuple[int, int]]:
    return [
        (n.span.start_line, n.span.end_line) for n in ast.walk() if n.kind == "code"
    ]


def _outside_code(line: int, ranges: list[tuple[int, int]]) -> bool:
    return all(not (a <= line <= b) for a, b in ranges)


def _scan_sentences(ctx: Any, index: LineIndex) -> list[Match]:
    ranges = _code_line_ranges(ctx.ast)
    matches: list[Match] = []
    for lineno, line in enumerate(index.lines, start=1):
        if not _outside_code(lineno, ranges):
            continue
        for m in _SENTENCE_RE.finditer(line):
            text = m.group(0).strip()
            if not any(ch.isalpha() for ch in text):
                continue
            start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
            span = SourceSpan(lineno, start + 1, lineno, start + len(text) + 1)
            matches.append(Match(text, span))
    return matches


def _normalize_sentence(text: str) -> str:
    return " ".join(text.split()).casefold().rstrip(".!?")


def _regex_matches(pattern: str, markdown: str, index: LineIndex) -> list[Match]:
    try:
        compiled = re.compile(pattern, re.MULTILINE)
    except re.error as exc:
        raise OperatorError(f"invalid regex target: {exc}") from exc
    out = []
    for m in compiled.finditer(markdown):
        stop = max(m.end(), m.start() + 1) if m.end() == m.start() else m.end()
        out.append(Match(m.group(0), index.span_from_offsets(m.start(), min(stop, len(markdown)))))
    return out


def _pattern_matches(ctx: Any, target: str, index: LineIndex) -> list[Match]:
    markdown = ctx.markdown
    if target == "emoji":
        return [
            Match(markdown[a:b], index.span_from_offsets(a, b))
            for a, b in find_emoji(markdown)
        ]
    if target == "newline":
        return [
            Match("\n", index.span_from_offsets(i, i + 1))
            for i, ch in enumerate(markdown)
            if ch == "\n"
        ]
    if target == "date":
        return [
            Match(m.group(0), index.span_from_offsets(m.start(), m.end()))
            for m in _DATE_RE.finditer(markdown)
        ]
    if target == "word":
        return [
            Match(m.group(0), index.span_from_offsets(m.start(), m.end()))
            for m in _WORD_RE.finditer(markdown)
        ]
    if target == "sentence":
        return _scan_sentences(ctx, index)
    if target == "duplicate-sentence":
        seen: dict[str, int] = {}
        out = []
        for match in _scan_sentences(ctx, index):
            key = _normalize_sentence(match.text)
            if len(key.split()) < 3:
                continue
            seen[key] = seen.get(key, 0) + 1
            if seen[key] > 1:
                out.append(match)
        return out
    if target == "internal-link":
        out = []
        for node in ctx.ast.walk():
            if node.kind == "link":
                url = str(node.attrs.get("url", ""))
                if url.startswith("#") and len(url) > 1:
                    out.append(Match(unquote(url[1:]).lower(), node.span, node_kind="link"))
        return out
    if target == "heading-anchor":
        out = []
        used: dict[str, int] = {}
        for node in ctx.ast.walk():
            if node.kind == "heading":
                slug = slugify_heading(_plain_text(node))
                n = used.get(slug, 0)
                used[slug] = n + 1
                if n:
                    slug = f"{slug}-{n}"
                out.append(Match(slug, node.span, node_kind="heading"))
        return out
    raise OperatorError(
        f"unknown extract target {target!r}; legal targets: node kinds "
        f"{list(EXTRACT_NODE_TARGETS)}, patterns {list(EXTRACT_PATTERN_TARGETS)}, "
        "or 'regex:<pattern>'"
    )


def _collect_matches(ctx: Any, target: str) -> list[Match]:
    index = LineIndex(ctx.markdown)
    if target.startswith("regex:"):
        return _regex_matches(target[len("regex:") :], ctx.markdown, index)
    if target in EXTRACT_NODE_TARGETS:
        return [
            Match(_node_text(node, index), node.span, node_kind=node.kind)
            for node in ctx.ast.walk()
            if node.kind == target
        ]
    return _pattern_matches(ctx, target, index)


def group_by_scopes(ctx: Any, matches: list[Match], scopes: list[str]) -> ScopedExtraction:
    """Assign each match to the segments whose span contains its start."""
    ordered = sorted(matches, key=lambda m: m.span)
    by_scope: dict[str, list[Match]] = {}
    for scope in scopes:
        if scope in ("document", "line"):
            by_scope[scope] = list(ordered)
            continue
        segments = ctx.segments(scope)
        kept = []
        for match in ordered:
            if any(
                s.span.contains_point(match.span.start_line, match.span.start_column)
                for s in segments
            ):
                kept.append(match)
        by_scope[scope] = kept
    return ScopedExtraction(by_scope)


@register("extract")
def extract_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    target = str(step.get("target"))
    scopes = list(step.get("scopes") or ["document"])
    matches = _collect_matches(ctx, target)
    return PipelineValue.extraction(group_by_scopes(ctx, matches, scopes))


def previous_items(ctx: Any, value: PipelineValue) -> list[Match]:
    """Walk a prior step's values as (text, span) items."""
    index = LineIndex(ctx.markdown)

    def locate(text: str) -> SourceSpan:
        pos = ctx.markdown.find(text)
        if text and pos >= 0:
            return index.span_from_offsets(pos, pos + len(text))
        return index.line_span(1)

    if value.kind is ValueKind.EXTRACTION:
        return value.payload.all_matches()
    if value.kind is ValueKind.DOCUMENT:
        return [
            Match(seg.text, seg.span)
            for seg in ctx.segments("line")
        ]
    if value.kind is ValueKind.OPAQUE:
        payload = value.payload
        if isinstance(payload, str):
            return [Match(payload, locate(payload))]
        if isinstance(payload, list):
            return [Match(str(item), locate(str(item))) for item in payload]
        if payload is None:
            return []
        return [Match(str(payload), locate(str(payload)))]
    raise OperatorError(
        f"scope 'previous' cannot walk a {value.kind.value} value"
    )


@register("search")
def search_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    query = str(step.get("query"))
    terms = [t.strip().lower() for t in query.split(",") if t.strip()]
    if not terms:
        raise OperatorError("search needs at least one non-empty term")
    scope = step.get("scope") or "document"
    if scope == "previous":
        items = previous_items(ctx, value)
    else:
        items = [Match(seg.text, seg.span) for seg in ctx.segments("line")]
    hits = [m for m in items if any(t in m.text.lower() for t in terms)]
    return PipelineValue.extraction(ScopedExtraction({"document": hits}))
