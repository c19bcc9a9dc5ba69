"""The built-in operator catalog: schemas, defaults, and the exported doc.

Each schema describes one operator's YAML surface (allowed fields, types,
defaults, enums) plus what value kinds it consumes and produces. The engine
type-checks pipelines against this table; editors get it via exportCatalog.
The set ships thirteen operators and is designed to be extended.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import yaml

from .values import COMPARATORS, ValueKind

REQUIRED = object()  # sentinel: field has no default and must be supplied

SCOPE_VALUES = ("document", "paragraph", "line", "collection")

EXTRACT_NODE_TARGETS = (
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
)
EXTRACT_PATTERN_TARGETS = (
    "emoji",
    "newline",
    "date",
    "sentence",
    "word",
    "duplicate-sentence",
    "internal-link",
    "heading-anchor",
)


@dataclass(frozen=True)
class FieldSpec:
    name: str
    type: str  # string | integer | number | boolean | array
    description: str
    default: Any = REQUIRED
    enum: Optional[tuple] = None
    item_type: Optional[str] = None
    item_enum: Optional[tuple] = None

    @property
    def required(self) -> bool:
        return self.default is REQUIRED


@dataclass(frozen=True)
class OperatorSchema:
    id: str
    description: str
    fields: tuple[FieldSpec, ...]
    examples: tuple[str, ...]
    accepts: Optional[frozenset[ValueKind]]  # None = accepts any input kind
    output: ValueKind
    verdictal: bool = False  # emitted diagnostics decide pass/fail at pipeline end
    passthrough: bool = False  # forwards its input; skipped by type checks and judgment

    @property
    def allowed_fields(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.fields)

    def field_spec(self, name: str) -> Optional[FieldSpec]:
        for spec in self.fields:
            if spec.name == name:
                return spec
        return None

    def defaults(self) -> dict[str, Any]:
        return {f.name: f.default for f in self.fields if not f.required}


_ANY = None

CATALOG: tuple[OperatorSchema, ...] = (
    OperatorSchema(
        id="extract",
        description=(
            "Finds markdown nodes or text matches for a target and returns them "
            "grouped by the requested scopes."
        ),
        fields=(
            FieldSpec(
                "target",
                "string",
                "What to extract: a markdown node kind (heading, link, inlineCode, ...), "
                "a built-in pattern (emoji, newline, date, sentence, word, "
                "duplicate-sentence, internal-link, heading-anchor), or 'regex:<pattern>'.",
            ),
            FieldSpec(
                "scopes",
                "array",
                "Scopes to group matches by.",
                default=["document"],
                item_type="string",
                item_enum=SCOPE_VALUES,
            ),
        ),
        examples=(
            "operator: extract\ntarget: emoji\nscopes:\n  - document\n  - paragraph\n  - line\n",
            "operator: extract\ntarget: heading\n",
        ),
        accepts=_ANY,
        output=ValueKind.EXTRACTION,
    ),
    OperatorSchema(
        id="count",
        description="Aggregates counts from the previous step's extraction, per scope.",
        fields=(),
        examples=("operator: count\n",),
        accepts=frozenset({ValueKind.EXTRACTION}),
        output=ValueKind.METRICS,
    ),
    OperatorSchema(
        id="length",
        description=(
            "Measures character lengths: of each extracted match when following an "
            "extract step, or of the document and its lines when applied directly."
        ),
        fields=(),
        examples=("operator: length\n",),
        accepts=frozenset({ValueKind.EXTRACTION, ValueKind.DOCUMENT}),
        output=ValueKind.METRICS,
    ),
    OperatorSchema(
        id="threshold",
        description=(
            "Compares computed metrics from a previous step against per-scope limits "
            "and emits a diagnostic for every violating entry."
        ),
        fields=(
            FieldSpec(
                "conditions",
                "array",
                "Per-scope conditions, each with scope, comparator "
                "(lessthan, lessthanorequal, greaterthan, greaterthanorequal, equal) "
                "and a numeric limit.",
                item_type="condition",
            ),
        ),
        examples=(
            "operator: threshold\nconditions:\n"
            "  - scope: document\n    comparator: lessthan\n    limit: 20\n"
            "  - scope: paragraph\n    comparator: lessthan\n    limit: 4\n"
            "  - scope: line\n    comparator: lessthan\n    limit: 2\n",
        ),
        accepts=frozenset({ValueKind.METRICS}),
        output=ValueKind.DIAGNOSTICS,
        verdictal=True,
    ),
    OperatorSchema(
        id="regexMatch",
        description=(
            "Flags lines (or the previous step's values) that DO match any pattern "
            "(mode: match) or that match none (mode: unmatch)."
        ),
        fields=(
            FieldSpec("patterns", "array", "Regular expressions.", item_type="string"),
            FieldSpec(
                "mode",
                "string",
                "match flags items matching any pattern; unmatch flags items matching none.",
                default="match",
                enum=("match", "unmatch"),
            ),
            FieldSpec(
                "scope",
                "string",
                "document scans raw lines; previous walks the prior step's values.",
                default="document",
                enum=("document", "previous"),
            ),
        ),
        examples=(
            "operator: regexMatch\npatterns:\n  - 'TODO'\nmode: match\n",
            "operator: regexMatch\npatterns:\n  - '\\d+\\s?°?F'\nmode: unmatch\nscope: previous\n",
        ),
        accepts=frozenset(
            {ValueKind.DOCUMENT, ValueKind.EXTRACTION, ValueKind.OPAQUE}
        ),
        output=ValueKind.EXTRACTION,
        verdictal=True,
    ),
    OperatorSchema(
        id="search",
        description=(
            "Finds lines or values containing any of the comma-separated terms, "
            "case-insensitively."
        ),
        fields=(
            FieldSpec("query", "string", "Comma-separated search terms."),
            FieldSpec(
                "scope",
                "string",
                "document scans raw lines; previous walks the prior step's values.",
                default="document",
                enum=("document", "previous"),
            ),
        ),
        examples=("operator: search\nquery: table of contents, toc\n",),
        accepts=frozenset(
            {ValueKind.DOCUMENT, ValueKind.EXTRACTION, ValueKind.OPAQUE}
        ),
        output=ValueKind.EXTRACTION,
    ),
    OperatorSchema(
        id="compare",
        description=(
            "Compares outputs from two earlier steps: structural mode reports "
            "missing/extra items, similarity mode scores the pair in [0,1] and "
            "fails below the threshold."
        ),
        fields=(
            FieldSpec(
                "baseline",
                "integer",
                "Step reference for the baseline side (1-based; 0 is the original document).",
            ),
            FieldSpec(
                "against",
                "integer",
                "Step reference for the compared side (1-based; 0 is the original document).",
            ),
            FieldSpec(
                "comparison_mode",
                "string",
                "structural reports item differences; similarity scores the texts.",
                default="structural",
                enum=("structural", "similarity"),
            ),
            FieldSpec(
                "similarity_method",
                "string",
                "Scoring method for similarity mode.",
                default="token-set",
                enum=("token-set", "sequence"),
            ),
            FieldSpec(
                "threshold",
                "number",
                "Minimum passing similarity score, between 0 and 1.",
                default=0.8,
            ),
            FieldSpec(
                "report",
                "string",
                "Which structural differences to flag.",
                default="both",
                enum=("missing", "extra", "both"),
            ),
        ),
        examples=(
            "operator: compare\nbaseline: 1\nagainst: 2\ncomparison_mode: structural\n",
            "operator: compare\nbaseline: 0\nagainst: 1\ncomparison_mode: similarity\n"
            "similarity_method: token-set\nthreshold: 0.8\n",
        ),
        accepts=_ANY,
        output=ValueKind.DIAGNOSTICS,
        verdictal=True,
    ),
    OperatorSchema(
        id="isLinkAlive",
        description=(
            "Checks all external links found in the Markdown content to verify they "
            "are reachable and return an allowed HTTP status code."
        ),
        fields=(
            FieldSpec(
                "timeout",
                "integer",
                "Request timeout in milliseconds for each link check.",
                default=5000,
            ),
            FieldSpec(
                "allowed_status_codes",
                "array",
                "List of acceptable HTTP status codes for a link to be considered alive.",
                default=[200, 204, 301, 302, 307, 308],
                item_type="integer",
            ),
        ),
        examples=(
            "operator: isLinkAlive\ntimeout: 3000\nallowed_status_codes:\n"
            "  - 200\n  - 301\n  - 302\n",
        ),
        accepts=_ANY,
        output=ValueKind.DIAGNOSTICS,
        verdictal=True,
    ),
    OperatorSchema(
        id="execute",
        description=(
            "Runs inline commands found in the document (prefers a previous "
            "extract with target inlineCode) and flags nonzero exits."
        ),
        fields=(
            FieldSpec(
                "timeout",
                "integer",
                "Per-command timeout in milliseconds.",
                default=10000,
            ),
        ),
        examples=("operator: execute\ntimeout: 5000\n",),
        accepts=frozenset({ValueKind.DOCUMENT, ValueKind.EXTRACTION}),
        output=ValueKind.DIAGNOSTICS,
        verdictal=True,
    ),
    OperatorSchema(
        id="customCode",
        description=(
            "Executes user-provided JavaScript with the current pipeline value and "
            "document as inputs; its return value becomes the next pipeline value."
        ),
        fields=(FieldSpec("code", "string", "JavaScript source of the check."),),
        examples=(
            "operator: customCode\ncode: |\n  return input.markdown.length > 0;\n",
        ),
        accepts=_ANY,
        output=ValueKind.OPAQUE,
        verdictal=True,
    ),
    OperatorSchema(
        id="fetchFromGithub",
        description=(
            "Fetches repository files (paths or content) or metadata from the "
            "configured hosting API."
        ),
        fields=(
            FieldSpec("repo", "string", "Repository as owner/name."),
            FieldSpec("branch", "string", "Branch to read from.", default="main"),
            FieldSpec("fileName", "string", "File to fetch.", default="README.md"),
            FieldSpec(
                "fetchType",
                "string",
                "paths lists matching files; content returns file text; metadata "
                "returns repository metadata.",
                default="content",
                enum=("paths", "content", "metadata"),
            ),
            FieldSpec(
                "metaPath",
                "string",
                "Dotted path drilled into the metadata response.",
                default="",
            ),
            FieldSpec(
                "useCustomMetaPath",
                "boolean",
                "Whether to drill metadata using metaPath.",
                default=False,
            ),
        ),
        examples=(
            "operator: fetchFromGithub\nrepo: octocat/hello-world\nbranch: main\n"
            "fileName: README.md\nfetchType: content\n",
        ),
        accepts=_ANY,
        output=ValueKind.OPAQUE,
    ),
    OperatorSchema(
        id="evaluateUsingLLM",
        description=(
            "Asks the configured language model whether the document violates the "
            "rule; the mandated reply format yields a pass/fail verdict."
        ),
        fields=(
            FieldSpec(
                "model",
                "string",
                "Model id; empty uses the configured default.",
                default="",
            ),
            FieldSpec(
                "ruleDefinition",
                "string",
                "Rule text shown to the model; empty uses the enclosing rule's YAML.",
                default="",
            ),
        ),
        examples=("operator: evaluateUsingLLM\n",),
        accepts=_ANY,
        output=ValueKind.VERDICT,
        verdictal=True,
    ),
    OperatorSchema(
        id="fixUsingLLM",
        description=(
            "Marks the rule as fixable: records the fix instructions used when a "
            "fix is requested for one diagnostic. During linting it passes the "
            "previous value through unchanged."
        ),
        fields=(
            FieldSpec(
                "model",
                "string",
                "Model id; empty uses the configured default.",
                default="",
            ),
            FieldSpec(
                "prompt",
                "string",
                "Operator-specific instructions for the fixer.",
                default="",
            ),
        ),
        examples=("operator: fixUsingLLM\nprompt: Remove the extra emoji.\n",),
        accepts=_ANY,
        output=ValueKind.OPAQUE,
        passthrough=True,
    ),
)

CATALOG_BY_ID: dict[str, OperatorSchema] = {schema.id: schema for schema in CATALOG}


def get_schema(operator_id: str) -> Optional[OperatorSchema]:
    return CATALOG_BY_ID.get(operator_id)


def _field_json_schema(spec: FieldSpec) -> dict[str, Any]:
    out: dict[str, Any] = {"description": spec.description}
    if spec.type == "condition":
        spec_type = "object"
    else:
        spec_type = spec.type
    out["type"] = spec_type
    if spec.enum:
        out["enum"] = list(spec.enum)
    if not spec.required:
        out["default"] = spec.default
    if spec.type == "array":
        if spec.item_type == "condition":
            out["items"] = _condition_schema()
        elif spec.item_type:
            items: dict[str, Any] = {"type": spec.item_type}
            if spec.item_enum:
                items["enum"] = list(spec.item_enum)
            out["items"] = items
    return out


def _condition_schema() -> dict[str, Any]:
    return {
        "type": "object",
        "required": ["scope", "comparator", "limit"],
        "additionalProperties": False,
        "properties": {
            "scope": {"type": "string", "enum": list(SCOPE_VALUES)},
            "comparator": {"type": "string", "enum": list(COMPARATORS)},
            "limit": {"type": "number"},
        },
    }


def export_catalog(catalog: tuple[OperatorSchema, ...] = CATALOG) -> dict[str, Any]:
    """Build the machine-readable schema document editors use for hints."""
    definitions: dict[str, Any] = {}
    operators: list[dict[str, Any]] = []
    for schema in catalog:
        properties: dict[str, Any] = {
            "operator": {"const": schema.id, "description": schema.description}
        }
        required = ["operator"]
        for spec in schema.fields:
            properties[spec.name] = _field_json_schema(spec)
            if spec.required:
                required.append(spec.name)
        definitions[schema.id] = {
            "type": "object",
            "description": schema.description,
            "required": required,
            "additionalProperties": False,
            "properties": properties,
            "examples": list(schema.examples),
        }
        operators.append(
            {
                "id": schema.id,
                "description": schema.description,
                "allowedFields": list(schema.allowed_fields),
                "fields": [
                    {
                        "name": spec.name,
                        "type": spec.type,
                        "description": spec.description,
                        "required": spec.required,
                    }
                    | ({} if spec.required else {"default": spec.default})
                    | ({"enumValues": list(spec.enum)} if spec.enum else {})
                    for spec in schema.fields
                ],
                "examples": list(schema.examples),
            }
        )
    return {
        "formatVersion": 1,
        "$schema": "http://json-schema.org/draft-07/schema#",
        "title": "Lint rule document",
        "type": "object",
        "required": ["rule", "description", "pipeline"],
        "additionalProperties": True,
        "properties": {
            "rule": {"type": "string", "description": "Rule name (kebab-case or camelCase)."},
            "description": {"type": "string", "description": "What the rule enforces."},
            "severity": {
                "type": "string",
                "enum": ["error", "warning", "info"],
                "default": "error",
                "description": "Severity of the rule's diagnostics.",
            },
            "pipeline": {
                "type": "array",
                "minItems": 1,
                "items": {"oneOf": [{"$ref": f"#/definitions/{s.id}"} for s in catalog]},
                "description": "Ordered operator steps.",
            },
        },
        "definitions": definitions,
        "operators": operators,
    }


def catalog_prompt_text(catalog: tuple[OperatorSchema, ...] = CATALOG) -> str:
    """Serialize the catalog for inclusion in the rule-generation prompt."""
    blocks = []
    for schema in catalog:
        entry: dict[str, Any] = {
            "id": schema.id,
            "description": schema.description,
            "allowedFields": list(schema.allowed_fields),
            "fields": [
                {"name": spec.name, "type": spec.type}
                | ({} if spec.required else {"default": spec.default})
                | ({"enum": list(spec.enum)} if spec.enum else {})
                | {"description": spec.description}
                for spec in schema.fields
            ],
            "examples": list(schema.examples),
        }
        blocks.append(yaml.safe_dump(entry, sort_keys=False, allow_unicode=True))
    return "\n".join(blocks)
