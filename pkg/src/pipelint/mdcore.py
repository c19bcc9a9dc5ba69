"""Markdown core: positioned AST, scope segmentation, ignore directives.

Parsing is CommonMark plus tables and strikethrough. Every node carries a
1-based source span; inline positions are recovered by scanning the raw
source inside the enclosing block's line window, so spans stay meaningful
even for content the tokenizer normalizes (entities, escapes).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

from markdown_it import MarkdownIt
from markdown_it.tree import SyntaxTreeNode

NODE_KINDS = frozenset(
    {
        "document",
        "heading",
        "paragraph",
        "list",
        "listItem",
        "code",
        "inlineCode",
        "link",
        "image",
        "emphasis",
        "strong",
        "delete",
        "blockquote",
        "html",
        "text",
        "table",
        "thematicBreak",
    }
)

SCOPES = ("document", "paragraph", "line", "collection")

_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")


def normalize_name(name: str) -> str:
    """Normalize a rule name to kebab-case (camelCase accepted on input)."""
    name = _CAMEL_BOUNDARY.sub("-", name.strip())
    name = name.replace("_", "-").replace(" ", "-")
    return re.sub(r"-{2,}", "-", name).lower()


@dataclass(frozen=True, order=True)
class SourceSpan:
    """Half-open character region, 1-based lines and columns."""

    start_line: int
    start_column: int
    end_line: int
    end_column: int

    def __post_init__(self) -> None:
        if min(self.start_line, self.start_column, self.end_line, self.end_column) < 1:
            raise ValueError(f"span coordinates must be 1-based: {self.as_tuple()}")
        if (self.end_line, self.end_column) < (self.start_line, self.start_column):
            raise ValueError(f"span must not end before it starts: {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.start_line, self.start_column, self.end_line, self.end_column)

    def contains(self, other: "SourceSpan") -> bool:
        return (self.start_line, self.start_column) <= (
            other.start_line,
            other.start_column,
        ) and (other.end_line, other.end_column) <= (self.end_line, self.end_column)

    def contains_point(self, line: int, column: int) -> bool:
        return (self.start_line, self.start_column) <= (line, column) < (
            self.end_line,
            self.end_column,
        )

    def to_dict(self) -> dict[str, int]:
        return {
            "startLine": self.start_line,
            "startColumn": self.start_column,
            "endLine": self.end_line,
            "endColumn": self.end_column,
        }


@dataclass
class AstNode:
    kind: str
    span: SourceSpan
    children: list["AstNode"] = field(default_factory=list)
    attrs: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in NODE_KINDS:
            raise ValueError(f"unknown node kind: {self.kind!r}")

    def walk(self) -> Iterator["AstNode"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def find_all(self, kind: str) -> list["AstNode"]:
        return [n for n in self.walk() if n.kind == kind]


class LineIndex:
    """Maps between absolute character offsets and (line, column) pairs."""

    def __init__(self, text: str):
        self.text = text
        self.lines = text.split("\n")
        self.offsets = [0]
        for line in self.lines[:-1]:
            self.offsets.append(self.offsets[-1] + len(line) + 1)

    @property
    def line_count(self) -> int:
        return len(self.lines)

    def pos(self, offset: int) -> tuple[int, int]:
        offset = max(0, min(offset, len(self.text)))
        lo, hi = 0, len(self.offsets) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.offsets[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1, offset - self.offsets[lo] + 1

    def span_from_offsets(self, start: int, end: int) -> SourceSpan:
        sl, sc = self.pos(start)
        el, ec = self.pos(end)
        return SourceSpan(sl, sc, el, ec)

    def offset(self, line: int, column: int) -> int:
        return self.offsets[line - 1] + column - 1

    def slice(self, span: SourceSpan) -> str:
        return self.text[
            self.offset(span.start_line, span.start_column) : self.offset(
                span.end_line, span.end_column
            )
        ]

    def line_span(self, line: int) -> SourceSpan:
        text = self.lines[line - 1]
        if text.endswith("\r"):
            text = text[:-1]
        return SourceSpan(line, 1, line, len(text) + 1)

    def document_span(self) -> SourceSpan:
        if not self.text:
            return SourceSpan(1, 1, 1, 1)
        return SourceSpan(1, 1, self.line_count, len(self.lines[-1]) + 1)


_PARSER = MarkdownIt("commonmark", {"html": True}).enable(["table", "strikethrough"])

# tokenizer type -> AST kind; None means hoist the children into the parent
_KIND_MAP: dict[str, Optional[str]] = {
    "heading": "heading",
    "paragraph": "paragraph",
    "bullet_list": "list",
    "ordered_list": "list",
    "list_item": "listItem",
    "fence": "code",
    "code_block": "code",
    "blockquote": "blockquote",
    "table": "table",
    "hr": "thematicBreak",
    "html_block": "html",
    "inline": None,
    "thead": None,
    "tbody": None,
    "tr": None,
    "th": None,
    "td": None,
    "text": "text",
    "softbreak": "text",
    "hardbreak": "text",
    "code_inline": "inlineCode",
    "em": "emphasis",
    "strong": "strong",
    "s": "delete",
    "link": "link",
    "image": "image",
    "html_inline": "html",
}

_MARKUP_WIDTH = {"emphasis": 1, "strong": 2, "delete": 2}


class _InlineScanner:
    """Walks one block's source window assigning inline spans in order."""

    def __init__(self, index: LineIndex, start: int, end: int):
        self.index = index
        self.cursor = start
        self.start = start
        self.end = end

    def _find(self, literal: str) -> Optional[int]:
        if not literal:
            return None
        pos = self.index.text.find(literal, self.cursor, self.end)
        return pos if pos >= 0 else None

    def literal_span(self, literal: str) -> tuple[int, int]:
        pos = self._find(literal)
        if pos is None:
            # normalized content (entities, escapes): pin at the cursor
            pos = min(self.cursor, self.end)
        stop = min(pos + len(literal), self.end)
        self.cursor = max(self.cursor, stop)
        return pos, stop

    def code_span(self, literal: str) -> tuple[int, int]:
        pos = self._find(literal)
        if pos is None:
            return self.literal_span(literal)
        start, stop = pos, pos + len(literal)
        text = self.index.text
        while start - 1 >= self.start and text[start - 1] == "`":
            start -= 1
        while stop < self.end and text[stop] == "`":
            stop += 1
        self.cursor = stop
        return start, stop

    def delimited_span(self, opener: str, closer: str) -> Optional[tuple[int, int]]:
        pos = self._find(opener)
        if pos is None:
            return None
        close = self.index.text.find(closer, pos + len(opener), self.end)
        if close < 0:
            return None
        self.cursor = close + len(closer)
        return pos, close + len(closer)


def _convert_inline(
    node: SyntaxTreeNode, scanner: _InlineScanner, index: LineIndex
) -> list[AstNode]:
    kind = _KIND_MAP.get(node.type)
    if node.type in ("text", "softbreak", "hardbreak"):
        literal = "\n" if node.type in ("softbreak", "hardbreak") else node.content
        start, stop = scanner.literal_span(literal)
        return [AstNode("text", index.span_from_offsets(start, stop), attrs={"value": literal})]
    if node.type == "code_inline":
        start, stop = scanner.code_span(node.content)
        return [
            AstNode(
                "inlineCode", index.span_from_offsets(start, stop), attrs={"value": node.content}
            )
        ]
    if node.type == "html_inline":
        start, stop = scanner.literal_span(node.content)
        return [AstNode("html", index.span_from_offsets(start, stop), attrs={"value": node.content})]
    if node.type == "image":
        alt = node.content
        url = node.attrs.get("src", "") if node.attrs else ""
        bounds = scanner.delimited_span("![", ")")
        if bounds is None:
            start, stop = scanner.literal_span(alt or str(url))
            bounds = (start, stop)
        return [
            AstNode(
                "image",
                index.span_from_offsets(*bounds),
                attrs={"url": str(url), "alt": alt},
            )
        ]
    if node.type == "link":
        url = str(node.attrs.get("href", "")) if node.attrs else ""
        if node.markup == "autolink":
            bounds = scanner.delimited_span("<", ">")
            if bounds is not None:
                start, stop = bounds
                inner = index.span_from_offsets(start + 1, stop - 1)
                child = AstNode("text", inner, attrs={"value": index.slice(inner)})
                return [
                    AstNode("link", index.span_from_offsets(start, stop), [child], {"url": url})
                ]
        open_pos = scanner._find("[")
        if open_pos is not None:
            scanner.cursor = open_pos + 1
        children: list[AstNode] = []
        for child in node.children:
            children.extend(_convert_inline(child, scanner, index))
        close = scanner.index.text.find("](", scanner.cursor, scanner.end)
        end_pos = None
        if close >= 0:
            depth = 0
            for i in range(close + 2, scanner.end):
                ch = scanner.index.text[i]
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    if depth == 0:
                        end_pos = i + 1
                        break
                    depth -= 1
        if open_pos is not None and end_pos is not None:
            scanner.cursor = end_pos
            span = index.span_from_offsets(open_pos, end_pos)
        else:
            span = _envelope(children, index, scanner)
        return [AstNode("link", span, children, {"url": url})]
    if kind in ("emphasis", "strong", "delete"):
        children = []
        for child in node.children:
            children.extend(_convert_inline(child, scanner, index))
        span = _envelope(children, index, scanner)
        width = _MARKUP_WIDTH[kind]
        start = index.offset(span.start_line, span.start_column)
        stop = index.offset(span.end_line, span.end_column)
        marker = node.markup[:1] if node.markup else ""
        if marker:
            while (
                start - 1 >= scanner.start
                and stop < scanner.end
                and index.text[start - 1] == marker
                and index.text[stop] == marker
                and index.offset(span.start_line, span.start_column) - start < width
            ):
                start -= 1
                stop += 1
        scanner.cursor = max(scanner.cursor, stop)
        return [AstNode(kind, index.span_from_offsets(start, stop), children)]
    # unknown inline wrapper: hoist children
    children = []
    for child in node.children:
        children.extend(_convert_inline(child, scanner, index))
    return children


def _envelope(
    children: list[AstNode], index: LineIndex, scanner: _InlineScanner
) -> SourceSpan:
    if not children:
        line, col = index.pos(scanner.cursor)
        return SourceSpan(line, col, line, col)
    first, last = children[0].span, children[-1].span
    return SourceSpan(first.start_line, first.start_column, last.end_line, last.end_column)


def _block_span(node: SyntaxTreeNode, index: LineIndex) -> SourceSpan:
    start, stop = node.map  # type: ignore[misc]
    stop = max(min(stop, index.line_count), start + 1)
    end_text = index.lines[stop - 1]
    if end_text.endswith("\r"):
        end_text = end_text[:-1]
    return SourceSpan(start + 1, 1, stop, len(end_text) + 1)


def _convert_block(node: SyntaxTreeNode, index: LineIndex, region: SourceSpan) -> list[AstNode]:
    kind = _KIND_MAP.get(node.type)
    span = _block_span(node, index) if node.map else region

    if node.type in ("fence", "code_block"):
        lang = (node.info or "").strip().split()[0] if (node.info or "").strip() else ""
        return [AstNode("code", span, attrs={"lang": lang, "value": node.content})]
    if node.type == "html_block":
        return [AstNode("html", span, attrs={"value": node.content})]
    if node.type == "hr":
        return [AstNode("thematicBreak", span)]
    if node.type == "inline":
        scanner = _InlineScanner(
            index,
            index.offset(region.start_line, region.start_column),
            index.offset(region.end_line, region.end_column),
        )
        out: list[AstNode] = []
        for child in node.children:
            out.extend(_convert_inline(child, scanner, index))
        return out

    children: list[AstNode] = []
    for child in node.children:
        children.extend(_convert_block(child, index, span))

    if kind is None:
        return children

    attrs: dict[str, object] = {}
    if kind == "heading":
        attrs["depth"] = int(node.tag[1]) if node.tag and node.tag[1:].isdigit() else 1
    elif kind == "list":
        attrs["ordered"] = node.type == "ordered_list"
    return [AstNode(kind, span, children, attrs)]


def parse(markdown: str) -> AstNode:
    """Parse markdown into a positioned tree rooted at a ``document`` node."""
    index = LineIndex(markdown)
    doc_span = index.document_span()
    tokens = _PARSER.parse(markdown)
    tree = SyntaxTreeNode(tokens)
    children: list[AstNode] = []
    for child in tree.children:
        children.extend(_convert_block(child, index, doc_span))
    return AstNode("document", doc_span, children)


@dataclass(frozen=True)
class ScopeSegment:
    scope: str
    index: int
    span: SourceSpan
    text: str


def segment(markdown: str, scope: str, ast: AstNode | None = None) -> list[ScopeSegment]:
    """Split a document into the segments a scope quantifies over."""
    if scope not in SCOPES:
        raise ValueError(f"unknown scope: {scope!r}")
    index = LineIndex(markdown)
    if scope == "document":
        return [ScopeSegment("document", 0, index.document_span(), markdown)]
    if scope == "line":
        out = []
        for i, raw in enumerate(index.lines, start=1):
            text = raw[:-1] if raw.endswith("\r") else raw
            out.append(ScopeSegment("line", i - 1, index.line_span(i), text))
        return out
    tree = ast if ast is not None else parse(markdown)
    wanted = "paragraph" if scope == "paragraph" else "list"
    blocks = [child for child in tree.children if child.kind == wanted]
    return [
        ScopeSegment(scope, i, child.span, index.slice(child.span))
        for i, child in enumerate(blocks)
    ]


_DIRECTIVE = re.compile(r"<ignore-line-for:([A-Za-z0-9][A-Za-z0-9_-]*)/>")


@dataclass
class IgnoreMap:
    """Suppressions discovered in (or supplied alongside) a document."""

    global_rules: set[str] = field(default_factory=set)
    per_line: dict[int, set[str]] = field(default_factory=dict)
    directive_spans: list[SourceSpan] = field(default_factory=list)

    def suppresses(self, rule_name: str, line: int) -> bool:
        key = normalize_name(rule_name)
        if key in self.global_rules:
            return True
        return key in self.per_line.get(line, set())


def scan_ignore_directives(markdown: str) -> IgnoreMap:
    """Collect `<ignore-line-for:NAME/>` directives, one line of effect each.

    Detection is a raw line scan so surrounding content cannot change what
    counts as a directive; whitespace inside the tag disqualifies it.
    """
    ignores = IgnoreMap()
    for lineno, raw in enumerate(markdown.split("\n"), start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        for match in _DIRECTIVE.finditer(line):
            name = normalize_name(match.group(1))
            ignores.per_line.setdefault(lineno, set()).add(name)
            ignores.directive_spans.append(
                SourceSpan(lineno, match.start() + 1, lineno, match.end() + 1)
            )
    return ignores


def source_slice(markdown: str, span: SourceSpan) -> str:
    return LineIndex(markdown).slice(span)


def line_count(markdown: str) -> int:
    return markdown.count("\n") + 1
