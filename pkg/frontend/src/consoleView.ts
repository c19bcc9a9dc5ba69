/** Renders a lint report into the console pane and per-rule badges.
 * Pure text in, pure text out: everything shown comes from the report. */

import type { LintReportWire, RuleOutcome, RuleResultWire } from "./types.js";

export function renderConsole(report: LintReportWire): string {
  const lines: string[] = [];
  for (const message of report.configErrors) {
    lines.push(`configuration error: ${message}`);
  }
  for (const result of report.ruleResults) {
    lines.push(...renderResult(result));
  }
  lines.push(renderSummary(report));
  return lines.join("\n");
}

function renderResult(result: RuleResultWire): string[] {
  const lines: string[] = [];
  for (const diag of result.diagnostics) {
    lines.push(
      `${diag.span.startLine}:${diag.span.startColumn} ${diag.severity} ` +
        `${diag.ruleName} ${diag.message}`,
    );
  }
  const notes = result.notes?.length ? ` (${result.notes.join("; ")})` : "";
  switch (result.outcome) {
    case "skipped":
      lines.push(`${result.ruleName}: skipped${notes}`);
      break;
    case "halted":
      lines.push(`${result.ruleName}: halted (${result.error ?? "unknown"})`);
      break;
    case "errored":
      lines.push(`${result.ruleName}: errored (${result.error ?? "unknown"})`);
      break;
    case "incomplete":
      lines.push(`${result.ruleName}: incomplete${notes}`);
      break;
    default:
      break;
  }
  return lines;
}

function renderSummary(report: LintReportWire): string {
  const passed = report.ruleResults.filter((r) => r.outcome === "pass").length;
  const total = report.ruleResults.length;
  const { errors, warnings } = report.summary;
  return `${errors} error(s), ${warnings} warning(s), ${passed}/${total} rules passed`;
}

/** Badge per rule, in report order. */
export function badges(report: LintReportWire): { ruleName: string; outcome: RuleOutcome }[] {
  return report.ruleResults.map((result) => ({
    ruleName: result.ruleName,
    outcome: result.outcome,
  }));
}
