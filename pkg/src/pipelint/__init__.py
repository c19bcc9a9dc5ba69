"""Markdown linting with declarative operator-pipeline rules."""

from .catalog import CATALOG, CATALOG_BY_ID, export_catalog
from .corpus import RuleCorpus, list_rules, load_corpus
from .dsl import Preset, Rule, RuleError, parse_rule, serialize_rule, validate_rule
from .engine import (
    Environment,
    Outcome,
    RuleResult,
    apply_ignores,
    coerce,
    fix_one,
    localize,
    run_rule,
    run_rules,
    type_check,
)
from .mdcore import (
    AstNode,
    IgnoreMap,
    ScopeSegment,
    SourceSpan,
    parse,
    scan_ignore_directives,
    segment,
)
from .report import Report, exit_code, render_text, write_report_dir
from .values import Diagnostic, PipelineValue, Severity, ValueKind, Verdict
from .version import VERSION

__version__ = VERSION

__all__ = [
    "CATALOG",
    "CATALOG_BY_ID",
    "export_catalog",
    "RuleCorpus",
    "list_rules",
    "load_corpus",
    "Preset",
    "Rule",
    "RuleError",
    "parse_rule",
    "serialize_rule",
    "validate_rule",
    "Environment",
    "Outcome",
    "RuleResult",
    "apply_ignores",
    "coerce",
    "fix_one",
    "localize",
    "run_rule",
    "run_rules",
    "type_check",
    "AstNode",
    "IgnoreMap",
    "ScopeSegment",
    "SourceSpan",
    "parse",
    "scan_ignore_directives",
    "segment",
    "Report",
    "exit_code",
    "render_text",
    "write_report_dir",
    "Diagnostic",
    "PipelineValue",
    "Severity",
    "ValueKind",
    "Verdict",
    "VERSION",
]
