"""Report assembly, serialization, and the on-disk report directory."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .engine import Outcome, RuleResult
from .values import Severity
from .version import VERSION

FORMAT_VERSION = 1

# fixed palette: one slot per outcome, last slot = rule not run on that file
_OUTCOME_ORDER = ("pass", "fail", "incomplete", "halted", "errored", "skipped")
_OUTCOME_COLORS = {
    "pass": "#2e7d32",
    "fail": "#c62828",
    "incomplete": "#f9a825",
    "halted": "#6a1b9a",
    "errored": "#37474f",
    "skipped": "#9e9e9e",
    "absent": "#eceff1",
}


@dataclass
class Report:
    document_path: str
    results: list[RuleResult] = field(default_factory=list)
    config_errors: list[str] = field(default_factory=list)
    corpus_version: str = VERSION

    def summary(self) -> dict[str, int]:
        errors = 0
        warnings = 0
        for result in self.results:
            for diag in result.diagnostics:
                if diag.severity is Severity.ERROR:
                    errors += 1
                else:
                    warnings += 1
        return {
            "errors": errors,
            "warnings": warnings,
            "skipped": sum(r.outcome is Outcome.SKIPPED for r in self.results),
            "incomplete": sum(r.outcome is Outcome.INCOMPLETE for r in self.results),
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "formatVersion": FORMAT_VERSION,
            "documentPath": self.document_path,
            "corpusVersion": self.corpus_version,
            "summary": self.summary(),
            "ruleResults": [
                r.to_dict() for r in sorted(self.results, key=lambda r: r.rule_name)
            ],
            "configErrors": list(self.config_errors),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def exit_code(reports: Iterable[Report]) -> int:
    """0 = clean, 1 = error-severity findings, 2 = config/internal trouble."""
    reports = list(reports)
    for report in reports:
        if report.config_errors:
            return 2
        if any(
            r.outcome in (Outcome.HALTED, Outcome.ERRORED) for r in report.results
        ):
            return 2
    if any(report.summary()["errors"] for report in reports):
        return 1
    return 0


def render_text(report: Report) -> str:
    lines = []
    path = report.document_path
    for message in report.config_errors:
        lines.append(f"{path}: configuration error: {message}")
    for result in sorted(report.results, key=lambda r: r.rule_name):
        for diag in result.diagnostics:
            lines.append(
                f"{path}:{diag.span.start_line}:{diag.span.start_column} "
                f"{diag.severity.value} {result.rule_name} {diag.message}"
            )
        if result.outcome in (Outcome.HALTED, Outcome.ERRORED):
            lines.append(
                f"{path}: rule {result.rule_name} {result.outcome.value}: {result.error}"
            )
        elif result.outcome is Outcome.SKIPPED:
            note = f" ({result.notes[0]})" if result.notes else ""
            lines.append(f"{path}: rule {result.rule_name} skipped{note}")
        elif result.outcome is Outcome.INCOMPLETE:
            lines.append(
                f"{path}: rule {result.rule_name} incomplete: no judgment step"
            )
    if not lines:
        lines.append(f"{path}: ok ({len(report.results)} rules passed)")
    return "\n".join(lines) + "\n"


def write_report_dir(reports: list[Report], directory: Path | str) -> list[Path]:
    """Write diagnostics.csv, report.json, and the outcome-matrix figure."""
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = out_dir / "diagnostics.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["documentPath", "ruleName", "outcome", "severity", "line", "column", "message"]
        )
        for report in reports:
            for result in sorted(report.results, key=lambda r: r.rule_name):
                if not result.diagnostics:
                    writer.writerow(
                        [report.document_path, result.rule_name, result.outcome.value,
                         "", "", "", result.error or ""]
                    )
                    continue
                for diag in result.diagnostics:
                    writer.writerow(
                        [
                            report.document_path,
                            result.rule_name,
                            result.outcome.value,
                            diag.severity.value,
                            diag.span.start_line,
                            diag.span.start_column,
                            diag.message,
                        ]
                    )
    written.append(csv_path)

    json_path = out_dir / "report.json"
    json_path.write_text(
        json.dumps([r.to_dict() for r in reports], indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    written.append(json_path)

    written.append(_render_outcome_figure(reports, out_dir / "outcomes.png"))
    return written


def _render_outcome_figure(reports: list[Report], path: Path) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import ListedColormap
    from matplotlib.patches import Patch

    rule_names = sorted({r.rule_name for rep in reports for r in rep.results})
    documents = [rep.document_path for rep in reports]
    if not rule_names or not documents:
        fig, ax = plt.subplots(figsize=(6, 2))
        ax.text(0.5, 0.5, "no results", ha="center", va="center")
        ax.set_axis_off()
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        return path

    labels = list(_OUTCOME_ORDER) + ["absent"]
    slot = {name: i for i, name in enumerate(labels)}
    grid = [[slot["absent"]] * len(documents) for _ in rule_names]
    row = {name: i for i, name in enumerate(rule_names)}
    for j, rep in enumerate(reports):
        for result in rep.results:
            grid[row[result.rule_name]][j] = slot[result.outcome.value]

    fig_w = max(6.0, 1.2 * len(documents) + 4)
    fig_h = max(3.0, 0.32 * len(rule_names) + 1.5)
    fig, ax = plt.subplots(figsize=(fig_w, fig_h))
    cmap = ListedColormap([_OUTCOME_COLORS[name] for name in labels])
    ax.imshow(grid, cmap=cmap, vmin=0, vmax=len(labels) - 1, aspect="auto")
    ax.set_xticks(range(len(documents)))
    ax.set_xticklabels([Path(d).name for d in documents], rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(len(rule_names)))
    ax.set_yticklabels(rule_names, fontsize=8)
    ax.set_title("rule outcomes by document")
    present = {labels[cell] for line in grid for cell in line}
    ax.legend(
        handles=[
            Patch(color=_OUTCOME_COLORS[name], label=name)
            for name in labels
            if name in present
        ],
        loc="upper left",
        bbox_to_anchor=(1.02, 1.0),
        fontsize=8,
        frameon=False,
    )
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path
