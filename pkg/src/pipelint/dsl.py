"""Rule DSL: parse, validate, and serialize YAML lint rules.

A rule file is one YAML document with keys ``rule``, ``description`` and
``pipeline`` (plus an optional ``severity``); multi-document files separated
by ``---`` are accepted. Validation gathers every violation it can find,
each addressed by a YAML path, instead of stopping at the first problem.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Optional

import yaml

from .catalog import CATALOG_BY_ID, OperatorSchema, SCOPE_VALUES
from .mdcore import normalize_name
from .values import COMPARATORS

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")

SEVERITIES = ("error", "warning", "info")


@dataclass(frozen=True)
class Violation:
    path: str
    message: str
    level: str = "error"

    def __str__(self) -> str:
        where = self.path or "<root>"
        return f"{where}: {self.message}"


class RuleError(Exception):
    """Raised when rule text fails validation; carries every violation."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations) or "invalid rule")


@dataclass(frozen=True)
class OperatorStep:
    operator_id: str
    params: dict[str, Any] = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OperatorStep):
            return NotImplemented
        return self.operator_id == other.operator_id and self.params == other.params

    def __hash__(self) -> int:
        return hash(self.operator_id)

    def get(self, name: str, schema: Optional[OperatorSchema] = None) -> Any:
        """Explicit param value, falling back to the catalog default."""
        if name in self.params:
            return self.params[name]
        schema = schema or CATALOG_BY_ID.get(self.operator_id)
        if schema is not None:
            spec = schema.field_spec(name)
            if spec is not None and not spec.required:
                return spec.default
        return None


@dataclass(frozen=True)
class Rule:
    name: str
    description: str
    pipeline: tuple[OperatorStep, ...]
    severity: str = "error"

    def __post_init__(self) -> None:
        if not self.pipeline:
            raise ValueError("rule pipeline must have at least one step")

    @property
    def key(self) -> str:
        return normalize_name(self.name)


@dataclass(frozen=True)
class Preset:
    name: str
    rule_names: tuple[str, ...]
    description: str = ""


def _err(violations: list[Violation], path: str, message: str) -> None:
    violations.append(Violation(path, message))


def _warn(violations: list[Violation], path: str, message: str) -> None:
    violations.append(Violation(path, message, level="warning"))


def _type_ok(expected: str, value: Any) -> bool:
    if expected == "string":
        return isinstance(value, str)
    if expected == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if expected == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if expected == "boolean":
        return isinstance(value, bool)
    if expected == "array":
        return isinstance(value, list)
    return True


def _validate_condition(item: Any, path: str, violations: list[Violation]) -> None:
    if not isinstance(item, dict):
        _err(violations, path, "condition must be a mapping with scope, comparator, limit")
        return
    for key in ("scope", "comparator", "limit"):
        if key not in item:
            _err(violations, path, f"condition is missing required key '{key}'")
    scope = item.get("scope")
    if scope is not None and scope not in SCOPE_VALUES:
        _err(violations, f"{path}.scope", f"unknown scope {scope!r}; expected one of {list(SCOPE_VALUES)}")
    comparator = item.get("comparator")
    if comparator is not None and comparator not in COMPARATORS:
        _err(
            violations,
            f"{path}.comparator",
            f"unknown comparator {comparator!r}; expected one of {list(COMPARATORS)}",
        )
    limit = item.get("limit")
    if limit is not None and not _type_ok("number", limit):
        _err(violations, f"{path}.limit", "limit must be a number")
    for key in item:
        if key not in ("scope", "comparator", "limit"):
            _err(violations, f"{path}.{key}", f"unknown condition key {key!r}")


def _validate_field(
    schema: OperatorSchema,
    name: str,
    value: Any,
    path: str,
    violations: list[Violation],
) -> None:
    spec = schema.field_spec(name)
    assert spec is not None
    if not _type_ok(spec.type, value):
        _err(violations, path, f"'{name}' must be of type {spec.type}")
        return
    if spec.enum and value not in spec.enum:
        _err(violations, path, f"{value!r} is not one of {list(spec.enum)}")
        return
    if spec.type == "array":
        if spec.item_type == "condition":
            if not value:
                _err(violations, path, "conditions must not be empty")
            for i, item in enumerate(value):
                _validate_condition(item, f"{path}[{i}]", violations)
        else:
            for i, item in enumerate(value):
                if spec.item_type and not _type_ok(spec.item_type, item):
                    _err(violations, f"{path}[{i}]", f"items must be of type {spec.item_type}")
                elif spec.item_enum and item not in spec.item_enum:
                    _err(violations, f"{path}[{i}]", f"{item!r} is not one of {list(spec.item_enum)}")
    if schema.id == "regexMatch" and name == "patterns":
        for i, pattern in enumerate(value):
            if isinstance(pattern, str):
                try:
                    re.compile(pattern)
                except re.error as exc:
                    _err(violations, f"{path}[{i}]", f"invalid regex at pattern index {i}: {exc}")
        if not value:
            _err(violations, path, "patterns must not be empty")
    if schema.id == "search" and name == "query":
        terms = [t.strip() for t in str(value).split(",")]
        if not any(terms):
            _err(violations, path, "query needs at least one non-empty term")


def _validate_step(
    data: Any,
    index: int,
    path: str,
    violations: list[Violation],
    catalog_by_id: dict[str, OperatorSchema],
) -> Optional[OperatorStep]:
    if not isinstance(data, dict):
        _err(violations, path, "step must be a mapping with an 'operator' key")
        return None
    operator_id = data.get("operator")
    if not isinstance(operator_id, str) or not operator_id:
        _err(violations, path, "step is missing the 'operator' key")
        return None
    schema = catalog_by_id.get(operator_id)
    if schema is None:
        _err(
            violations,
            f"{path}.operator",
            f"unknown operator {operator_id!r}; known operators: {sorted(catalog_by_id)}",
        )
        return None
    params: dict[str, Any] = {}
    for key, value in data.items():
        if key == "operator":
            continue
        if key not in schema.allowed_fields:
            _err(
                violations,
                f"{path}.{key}",
                f"unknown field {key!r} for operator {operator_id}; "
                f"allowedFields: {list(schema.allowed_fields)}",
            )
            continue
        _validate_field(schema, key, value, f"{path}.{key}", violations)
        params[key] = value
    for spec in schema.fields:
        if spec.required and spec.name not in data:
            _err(violations, f"{path}.{spec.name}", f"'{spec.name}' is required for {operator_id}")
    if operator_id == "compare":
        for ref_name in ("baseline", "against"):
            ref = data.get(ref_name)
            if isinstance(ref, int) and not isinstance(ref, bool):
                if ref < 0 or ref > index:
                    _err(
                        violations,
                        f"{path}.{ref_name}",
                        f"step reference {ref} does not resolve to a completed prior step "
                        f"(step {index + 1} may reference 0..{index})",
                    )
    return OperatorStep(operator_id, params)


def validate_rule_data(
    data: Any,
    path_prefix: str = "",
    catalog_by_id: dict[str, OperatorSchema] = CATALOG_BY_ID,
) -> tuple[Optional[Rule], list[Violation]]:
    """Validate loaded YAML data; returns (rule-or-None, all violations)."""
    violations: list[Violation] = []
    p = path_prefix
    if not isinstance(data, dict):
        _err(violations, p, "rule document must be a YAML mapping")
        return None, violations
    for key in ("rule", "description", "pipeline"):
        if key not in data:
            _err(violations, f"{p}{key}" if p else key, f"missing required key '{key}'")
    name = data.get("rule")
    if name is not None:
        if not isinstance(name, str) or not name:
            _err(violations, f"{p}rule", "rule name must be a non-empty string")
        elif not _NAME_RE.match(name):
            _err(violations, f"{p}rule", f"rule name {name!r} must be kebab-case or camelCase")
    description = data.get("description")
    if description is not None and not isinstance(description, str):
        _err(violations, f"{p}description", "description must be a string")
    severity = data.get("severity", "error")
    if severity not in SEVERITIES:
        _err(violations, f"{p}severity", f"severity must be one of {list(SEVERITIES)}")
    pipeline_data = data.get("pipeline")
    steps: list[OperatorStep] = []
    if pipeline_data is not None:
        if not isinstance(pipeline_data, list) or not pipeline_data:
            _err(violations, f"{p}pipeline", "pipeline must be a non-empty list of steps")
        else:
            for i, step_data in enumerate(pipeline_data):
                step = _validate_step(
                    step_data, i, f"{p}pipeline[{i}]", violations, catalog_by_id
                )
                if step is not None:
                    steps.append(step)
    for key in data:
        if key not in ("rule", "description", "pipeline", "severity"):
            _warn(violations, f"{p}{key}" if p else key, f"unknown top-level key {key!r} ignored")
    if any(v.level == "error" for v in violations):
        return None, violations
    rule = Rule(
        name=str(name),
        description=str(description),
        pipeline=tuple(steps),
        severity=str(severity),
    )
    return rule, violations


def load_rule_documents(text: str) -> tuple[list[Rule], list[Violation]]:
    """Parse possibly multi-document rule YAML; never raises."""
    try:
        documents = [d for d in yaml.safe_load_all(text) if d is not None]
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark else ""
        return [], [Violation("", f"YAML syntax error{where}: {exc}")]
    if not documents:
        return [], [Violation("", "no rule documents found")]
    rules: list[Rule] = []
    violations: list[Violation] = []
    multi = len(documents) > 1
    for i, data in enumerate(documents):
        prefix = f"doc[{i}]." if multi else ""
        rule, vs = validate_rule_data(data, prefix)
        violations.extend(vs)
        if rule is not None:
            rules.append(rule)
    return rules, violations


def parse_rule(text: str) -> Rule:
    """Parse a single rule document; raises RuleError with all violations."""
    rules, violations = load_rule_documents(text)
    errors = [v for v in violations if v.level == "error"]
    if errors or not rules:
        raise RuleError(errors or [Violation("", "no rule documents found")])
    return rules[0]


def validate_rule(
    rule: Rule, catalog_by_id: dict[str, OperatorSchema] = CATALOG_BY_ID
) -> list[Violation]:
    """Re-validate a constructed Rule against a catalog; violations are data."""
    data: dict[str, Any] = {
        "rule": rule.name,
        "description": rule.description,
        "pipeline": [{"operator": s.operator_id, **s.params} for s in rule.pipeline],
    }
    if rule.severity != "error":
        data["severity"] = rule.severity
    _, violations = validate_rule_data(data, catalog_by_id=catalog_by_id)
    return [v for v in violations if v.level == "error"]


def serialize_rule(rule: Rule) -> str:
    """Render a rule back to YAML; optional params keep only explicit values."""
    data: dict[str, Any] = {"rule": rule.name, "description": rule.description}
    if rule.severity != "error":
        data["severity"] = rule.severity
    pipeline = []
    for step in rule.pipeline:
        schema = CATALOG_BY_ID.get(step.operator_id)
        entry: dict[str, Any] = {"operator": step.operator_id}
        ordered = list(schema.allowed_fields) if schema else sorted(step.params)
        for name in ordered:
            if name in step.params:
                entry[name] = step.params[name]
        for name in step.params:
            if name not in entry:
                entry[name] = step.params[name]
        pipeline.append(entry)
    data["pipeline"] = pipeline
    text = yaml.safe_dump(data, sort_keys=False, allow_unicode=True, default_flow_style=False)
    # YAML 1.1 folds NEL and similar breaks back to spaces on reload; keep
    # the pretty form only when it reloads to exactly the same data
    if yaml.safe_load(text) != data:
        text = yaml.safe_dump(data, sort_keys=False, allow_unicode=False, default_flow_style=False)
    return text


def load_preset_text(text: str, source: str = "") -> tuple[Optional[Preset], list[Violation]]:
    violations: list[Violation] = []
    prefix = f"{source}: " if source else ""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        return None, [Violation("", f"{prefix}YAML syntax error: {exc}")]
    if not isinstance(data, dict):
        return None, [Violation("", f"{prefix}preset must be a YAML mapping")]
    name = data.get("name")
    rules = data.get("rules")
    if not isinstance(name, str) or not name:
        _err(violations, "name", f"{prefix}preset needs a non-empty 'name'")
    if not isinstance(rules, list) or not all(isinstance(r, str) for r in (rules or [])):
        _err(violations, "rules", f"{prefix}preset needs a 'rules' list of rule names")
    if violations:
        return None, violations
    description = data.get("description", "")
    return Preset(name=name, rule_names=tuple(rules), description=str(description)), []
