import { describe, expect, it } from "vitest";

import { badges, renderConsole } from "../src/consoleView.js";
import type { LintReportWire } from "../src/types.js";
import { loadJson } from "./helpers.js";

const report = loadJson<LintReportWire>("lint-software-library.json");

describe("renderConsole", () => {
  it("matches the recorded API response", () => {
    expect(renderConsole(report)).toMatchSnapshot();
  });

  it("ends with a summary derived from the report", () => {
    const rendered = renderConsole(report);
    const last = rendered.split("\n").at(-1);
    const passed = report.ruleResults.filter((r) => r.outcome === "pass").length;
    expect(last).toBe(
      `${report.summary.errors} error(s), ${report.summary.warnings} warning(s), ` +
        `${passed}/${report.ruleResults.length} rules passed`,
    );
  });

  it("prints one line per diagnostic with its span anchor", () => {
    const rendered = renderConsole(report);
    for (const result of report.ruleResults) {
      for (const diag of result.diagnostics) {
        expect(rendered).toContain(
          `${diag.span.startLine}:${diag.span.startColumn} ${diag.severity} ${diag.ruleName}`,
        );
      }
    }
  });

  it("surfaces configuration errors before everything else", () => {
    const withError: LintReportWire = {
      ...report,
      configErrors: ["unknown rule 'no-such-rule'"],
    };
    const lines = renderConsole(withError).split("\n");
    expect(lines[0]).toBe("configuration error: unknown rule 'no-such-rule'");
  });
});

describe("badges", () => {
  it("matches the recorded API response", () => {
    expect(badges(report)).toMatchSnapshot();
  });

  it("emits one badge per rule result", () => {
    const chips = badges(report);
    expect(chips.length).toBe(report.ruleResults.length);
    expect(chips.map((c) => c.ruleName)).toEqual(
      report.ruleResults.map((r) => r.ruleName),
    );
  });
});
