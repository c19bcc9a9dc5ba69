/** Maps report diagnostics onto editor underlines: exactly one underline per
 * diagnostic, anchored to the span's first line, carrying the hover text. */

import type { DiagnosticWire, LintReportWire, Severity } from "./types.js";

export interface Underline {
  line: number;
  startColumn: number;
  endColumn: number;
  severity: Severity;
  ruleName: string;
  /** Shown on hover. */
  message: string;
}

/** Every diagnostic in rule order; the report's order is already name-sorted. */
export function collectDiagnostics(report: LintReportWire): DiagnosticWire[] {
  return report.ruleResults.flatMap((result) => result.diagnostics);
}

export function underlinesFor(report: LintReportWire): Underline[] {
  return collectDiagnostics(report).map((diag) => ({
    line: diag.span.startLine,
    startColumn: diag.span.startColumn,
    // multi-line spans underline their first line only
    endColumn:
      diag.span.endLine === diag.span.startLine
        ? diag.span.endColumn
        : Number.MAX_SAFE_INTEGER,
    severity: diag.severity,
    ruleName: diag.ruleName,
    message: diag.message,
  }));
}

/** Underlines grouped per line, for the overlay renderer. */
export function underlinesByLine(report: LintReportWire): Map<number, Underline[]> {
  const byLine = new Map<number, Underline[]>();
  for (const underline of underlinesFor(report)) {
    const bucket = byLine.get(underline.line);
    if (bucket) {
      bucket.push(underline);
    } else {
      byLine.set(underline.line, [underline]);
    }
  }
  return byLine;
}
