"""Pipeline execution: type checking, coercion, judgment, and ignores."""

from __future__ import annotations

import dataclasses
import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

import yaml

from . import llm
from .catalog import CATALOG_BY_ID
from .dsl import Rule, validate_rule
from .mdcore import (
    AstNode,
    IgnoreMap,
    LineIndex,
    ScopeSegment,
    SourceSpan,
    line_count,
    normalize_name,
    parse,
    scan_ignore_directives,
    segment,
)
from .operators import REGISTRY, OfflineSkip, OperatorError, PolicyError
from .values import (
    Diagnostic,
    Match,
    MetricEntry,
    MetricSummary,
    PipelineValue,
    ScopedExtraction,
    Severity,
    ValueKind,
    Verdict,
    describe_value,
)

PREVIEW_LIMIT = 4096
_INCOMPLETE_NOTE = "pipeline ended without a judgment; previewing its last value"


class Outcome(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCOMPLETE = "incomplete"
    HALTED = "halted"
    ERRORED = "errored"
    SKIPPED = "skipped"


@dataclass
class RuleResult:
    rule_name: str
    outcome: Outcome
    diagnostics: list[Diagnostic] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    preview: Optional[str] = None
    error: Optional[str] = None
    fixable: bool = False
    fix_directive: Optional[dict[str, str]] = None
    elapsed_s: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        # elapsed stays out: serialized reports must be identical run to run
        data: dict[str, Any] = {
            "ruleName": self.rule_name,
            "outcome": self.outcome.value,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "fixable": self.fixable,
        }
        if self.notes:
            data["notes"] = list(self.notes)
        if self.preview is not None:
            data["preview"] = self.preview
        if self.error is not None:
            data["error"] = self.error
        return data


def _default_provider() -> llm.Provider:
    return llm.Provider(llm.load_default_config())


@dataclass
class Environment:
    """Run-wide policies and external services shared by every rule."""

    provider: llm.Provider = field(default_factory=_default_provider)
    allow_network: bool = False
    allow_exec: bool = False
    allow_scripts: bool = False
    working_dir: str = "."
    github_base_url: str = "https://api.github.com"
    rule_budget_s: float = 30.0
    max_parallel: int = 4


class RuleTimeout(Exception):
    pass


class CoercionError(Exception):
    def __init__(self, source: ValueKind, target: ValueKind):
        super().__init__(f"no coercion from {source.value} to {target.value}")
        self.source = source
        self.target = target


class ExecutionContext:
    """Mutable state private to one rule execution."""

    def __init__(
        self,
        markdown: str,
        rule: Rule,
        env: Environment,
        deadline: Optional[float] = None,
    ):
        self.markdown = markdown
        self.rule = rule
        self.env = env
        self.deadline = deadline
        self.step_outputs: list[PipelineValue] = []
        self.step_emissions: list[list[Diagnostic]] = []
        self.diagnostics: list[Diagnostic] = []
        self.notes: list[str] = []
        self.fix_directive: Optional[dict[str, str]] = None
        self._ast: Optional[AstNode] = None
        self._segments: dict[str, list[ScopeSegment]] = {}
        self._current: list[Diagnostic] = []

    @property
    def ast(self) -> AstNode:
        if self._ast is None:
            self._ast = parse(self.markdown)
        return self._ast

    def segments(self, scope: str) -> list[ScopeSegment]:
        if scope not in self._segments:
            self._segments[scope] = segment(self.markdown, scope, ast=self.ast)
        return self._segments[scope]

    def diagnostic(
        self, message: str, span: SourceSpan, fix_hint: Optional[str] = None
    ) -> Diagnostic:
        return Diagnostic(
            self.rule.name, Severity(self.rule.severity), message, span, fix_hint
        )

    def record(self, diags: list[Diagnostic]) -> None:
        self._current.extend(diags)
        self.diagnostics.extend(diags)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def check_deadline(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise RuleTimeout(
                f"rule exceeded its {self.env.rule_budget_s:g} s budget"
            )


def type_check(rule: Rule, catalog_by_id=None) -> Optional[str]:
    """Halt reason when some step cannot consume its predecessor's output."""
    catalog = catalog_by_id or CATALOG_BY_ID
    current = ValueKind.DOCUMENT
    for i, step in enumerate(rule.pipeline):
        schema = catalog.get(step.operator_id)
        if schema is None:
            return f"step {i + 1} uses unknown operator {step.operator_id!r}"
        if schema.passthrough:
            continue
        if schema.accepts is not None and current not in schema.accepts:
            wanted = ", ".join(sorted(kind.value for kind in schema.accepts))
            return (
                f"step {i + 1} ({schema.id}) needs {wanted} input "
                f"but receives {current.value}"
            )
        current = schema.output
    return None


def coerce(value: PipelineValue, expected: ValueKind, markdown: str = "") -> PipelineValue:
    """Apply the fixed coercion matrix; identity when kinds already match."""
    if value.kind is expected:
        return value
    if value.kind is ValueKind.DOCUMENT and expected is ValueKind.AST:
        return PipelineValue.ast(parse(value.payload))
    if value.kind is ValueKind.DOCUMENT and expected is ValueKind.EXTRACTION:
        text = value.payload
        span = LineIndex(text).document_span()
        return PipelineValue.extraction(
            ScopedExtraction({"document": [Match(text, span)]})
        )
    if value.kind is ValueKind.EXTRACTION and expected is ValueKind.METRICS:
        span = LineIndex(markdown).document_span() if markdown else SourceSpan(1, 1, 1, 1)
        collapsed = {
            scope: [MetricEntry(span, float(len(matches)))]
            for scope, matches in value.payload.by_scope.items()
        }
        return PipelineValue.metrics(MetricSummary(collapsed))
    raise CoercionError(value.kind, expected)


_COERCION_ORDER = (
    ValueKind.AST,
    ValueKind.EXTRACTION,
    ValueKind.METRICS,
    ValueKind.DOCUMENT,
    ValueKind.DIAGNOSTICS,
    ValueKind.VERDICT,
    ValueKind.OPAQUE,
)


def _coerce_into(
    value: PipelineValue, accepts: frozenset[ValueKind], markdown: str
) -> PipelineValue:
    last: Optional[CoercionError] = None
    for target in _COERCION_ORDER:
        if target in accepts:
            try:
                return coerce(value, target, markdown)
            except CoercionError as exc:
                last = exc
    raise last or CoercionError(value.kind, next(iter(accepts)))


def localize(markdown: str, text: Optional[str]) -> SourceSpan:
    """Span of the first line containing the offending text, else line 1."""
    index = LineIndex(markdown)
    if text:
        for i, line in enumerate(index.lines, start=1):
            if text in line:
                return index.line_span(i)
    return index.line_span(1)


def _preview(value: PipelineValue) -> str:
    rendered = yaml.safe_dump(
        describe_value(value), sort_keys=False, allow_unicode=True
    )
    if len(rendered) > PREVIEW_LIMIT:
        return rendered[:PREVIEW_LIMIT] + "\n...(truncated)"
    return rendered


def _judge(ctx: ExecutionContext) -> RuleResult:
    rule = ctx.rule
    fixable = ctx.fix_directive is not None
    last_idx: Optional[int] = None
    for i in range(len(rule.pipeline) - 1, -1, -1):
        if not CATALOG_BY_ID[rule.pipeline[i].operator_id].passthrough:
            last_idx = i
            break
    if last_idx is None:
        return RuleResult(
            rule.name,
            Outcome.INCOMPLETE,
            notes=ctx.notes + [_INCOMPLETE_NOTE],
            preview=_preview(ctx.step_outputs[-1]) if ctx.step_outputs else "",
            fixable=fixable,
            fix_directive=ctx.fix_directive,
        )

    final = ctx.step_outputs[last_idx]
    common = dict(notes=ctx.notes, fixable=fixable, fix_directive=ctx.fix_directive)
    if final.kind is ValueKind.VERDICT:
        verdict: Verdict = final.payload
        if verdict.status == "pass":
            return RuleResult(rule.name, Outcome.PASS, **common)
        total = line_count(ctx.markdown)
        index = LineIndex(ctx.markdown)
        lines = list(dict.fromkeys(min(max(n, 1), total) for n in verdict.lines)) or [1]
        hint = verdict.suggestion or None
        diags = [
            ctx.diagnostic(verdict.issue, index.line_span(n), fix_hint=hint)
            for n in lines
        ]
        return RuleResult(rule.name, Outcome.FAIL, diagnostics=diags, **common)
    if final.kind is ValueKind.DIAGNOSTICS:
        diags = list(final.payload)
        outcome = Outcome.FAIL if diags else Outcome.PASS
        return RuleResult(rule.name, outcome, diagnostics=diags, **common)
    if CATALOG_BY_ID[rule.pipeline[last_idx].operator_id].verdictal:
        diags = list(ctx.step_emissions[last_idx])
        outcome = Outcome.FAIL if diags else Outcome.PASS
        return RuleResult(rule.name, outcome, diagnostics=diags, **common)
    return RuleResult(
        rule.name,
        Outcome.INCOMPLETE,
        notes=ctx.notes + [_INCOMPLETE_NOTE],
        preview=_preview(final),
        fixable=fixable,
        fix_directive=ctx.fix_directive,
    )


def run_rule(markdown: str, rule: Rule, env: Optional[Environment] = None) -> RuleResult:
    env = env or Environment()
    started = time.monotonic()

    def done(result: RuleResult) -> RuleResult:
        result.elapsed_s = time.monotonic() - started
        return result

    problems = validate_rule(rule)
    if problems:
        detail = "; ".join(v.message for v in problems)
        return done(
            RuleResult(rule.name, Outcome.ERRORED, error=f"invalid rule: {detail}")
        )
    halt = type_check(rule)
    if halt is not None:
        return done(RuleResult(rule.name, Outcome.HALTED, error=halt))

    ctx = ExecutionContext(markdown, rule, env, deadline=started + env.rule_budget_s)
    value = PipelineValue.document(markdown)
    for i, step in enumerate(rule.pipeline):
        schema = CATALOG_BY_ID[step.operator_id]
        fn = REGISTRY.get(step.operator_id)
        if fn is None:
            return done(
                RuleResult(
                    rule.name,
                    Outcome.ERRORED,
                    notes=ctx.notes,
                    error=f"operator {step.operator_id!r} has no implementation",
                )
            )
        ctx._current = []
        try:
            ctx.check_deadline()
            if (
                not schema.passthrough
                and schema.accepts is not None
                and value.kind not in schema.accepts
            ):
                value = _coerce_into(value, schema.accepts, markdown)
            value = fn(ctx, step, value)
        except OfflineSkip as exc:
            ctx.note(str(exc))
            return done(
                RuleResult(
                    rule.name,
                    Outcome.SKIPPED,
                    notes=ctx.notes,
                    fixable=ctx.fix_directive is not None,
                    fix_directive=ctx.fix_directive,
                )
            )
        except (PolicyError, OperatorError, CoercionError, RuleTimeout) as exc:
            return done(
                RuleResult(
                    rule.name,
                    Outcome.ERRORED,
                    notes=ctx.notes,
                    error=f"step {i + 1} ({step.operator_id}): {exc}",
                )
            )
        except Exception as exc:  # operator bug: encode it, never crash the run
            return done(
                RuleResult(
                    rule.name,
                    Outcome.ERRORED,
                    notes=ctx.notes,
                    error=f"internal error in {step.operator_id}: {exc!r}",
                )
            )
        ctx.step_outputs.append(value)
        ctx.step_emissions.append(ctx._current)

    return done(_judge(ctx))


def _suppressed(diag: Diagnostic, rule_key: str, ignores: IgnoreMap) -> bool:
    if ignores.suppresses(rule_key, diag.span.start_line):
        return True
    # findings inside a directive tag are about linter syntax, not content
    return any(d.contains(diag.span) for d in ignores.directive_spans)


def apply_ignores(
    results: list[RuleResult],
    ignores: IgnoreMap,
    global_ignores: Iterable[str] = (),
) -> list[RuleResult]:
    """Drop suppressed diagnostics; never adds any, never turns pass to fail."""
    global_keys = {normalize_name(n) for n in global_ignores}
    global_keys |= {normalize_name(n) for n in ignores.global_rules}
    out = []
    for result in results:
        key = normalize_name(result.rule_name)
        if key in global_keys:
            out.append(
                dataclasses.replace(
                    result,
                    outcome=Outcome.SKIPPED,
                    diagnostics=[],
                    notes=result.notes + ["rule ignored globally"],
                )
            )
            continue
        if not result.diagnostics:
            out.append(result)
            continue
        kept = [d for d in result.diagnostics if not _suppressed(d, key, ignores)]
        if len(kept) == len(result.diagnostics):
            out.append(result)
        elif kept:
            out.append(dataclasses.replace(result, diagnostics=kept))
        else:
            outcome = (
                Outcome.PASS if result.outcome is Outcome.FAIL else result.outcome
            )
            out.append(
                dataclasses.replace(
                    result,
                    outcome=outcome,
                    diagnostics=[],
                    notes=result.notes
                    + ["all diagnostics suppressed by ignore directives"],
                )
            )
    return out


def run_rules(
    markdown: str,
    rules: Iterable[Rule],
    env: Optional[Environment] = None,
    global_ignores: Iterable[str] = (),
) -> list[RuleResult]:
    """Run rules (name-sorted for determinism) and apply ignore directives."""
    env = env or Environment()
    ignores = scan_ignore_directives(markdown)
    ordered = sorted(rules, key=lambda rule: rule.name)
    if len(ordered) <= 1 or env.max_parallel <= 1:
        results = [run_rule(markdown, rule, env) for rule in ordered]
    else:
        with ThreadPoolExecutor(max_workers=env.max_parallel) as pool:
            results = list(pool.map(lambda rule: run_rule(markdown, rule, env), ordered))
    return apply_ignores(results, ignores, global_ignores)


def fix_one(
    markdown: str,
    rule: Rule,
    diagnostic_index: int,
    env: Optional[Environment] = None,
) -> tuple[str, Diagnostic]:
    """Ask the fixer for a rewrite addressing exactly one diagnostic."""
    env = env or Environment()
    result = apply_ignores(
        [run_rule(markdown, rule, env)], scan_ignore_directives(markdown)
    )[0]
    if result.fix_directive is None:
        raise ValueError(f"rule {rule.name!r} has no fixUsingLLM step")
    if result.outcome in (Outcome.HALTED, Outcome.ERRORED):
        raise ValueError(f"rule {rule.name!r} did not produce diagnostics: {result.error}")
    if not 0 <= diagnostic_index < len(result.diagnostics):
        raise ValueError(
            f"diagnostic index {diagnostic_index} out of range; "
            f"rule {rule.name!r} produced {len(result.diagnostics)} diagnostic(s)"
        )
    diag = result.diagnostics[diagnostic_index]
    fixed = llm.fix_document(
        rule,
        [diag],
        markdown,
        result.fix_directive.get("prompt", ""),
        env.provider,
        model=result.fix_directive.get("model") or None,
    )
    return fixed, diag
