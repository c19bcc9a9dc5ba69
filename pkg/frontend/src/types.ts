/** Wire types for the linter's JSON API. Field names mirror the server exactly. */

export type Severity = "error" | "warning" | "info";

export type RuleOutcome =
  | "pass"
  | "fail"
  | "incomplete"
  | "halted"
  | "errored"
  | "skipped";

export interface SpanWire {
  startLine: number;
  startColumn: number;
  endLine: number;
  endColumn: number;
}

export interface DiagnosticWire {
  ruleName: string;
  severity: Severity;
  message: string;
  span: SpanWire;
  fixHint?: string;
}

export interface RuleResultWire {
  ruleName: string;
  outcome: RuleOutcome;
  diagnostics: DiagnosticWire[];
  fixable: boolean;
  notes?: string[];
  preview?: string;
  error?: string;
}

export interface LintSummaryWire {
  errors: number;
  warnings: number;
  skipped: number;
  incomplete: number;
}

export interface LintReportWire {
  formatVersion: number;
  documentPath: string;
  corpusVersion: string;
  summary: LintSummaryWire;
  ruleResults: RuleResultWire[];
  configErrors: string[];
}

export interface LintRequest {
  markdown: string;
  preset?: string;
  rules?: string[];
  globalIgnores?: string[];
  documentPath?: string;
}

export interface FixResponseWire {
  fixedMarkdown: string;
  diagnostic: DiagnosticWire;
  ruleName: string;
  diagnosticId: string;
}

export interface GenerateResponseWire {
  yaml: string;
}

export interface ValidationViolationWire {
  path: string;
  message: string;
  level?: string;
}

export interface ValidateResponseWire {
  ok: boolean;
  violations: ValidationViolationWire[];
  rules?: string[];
  normalized?: string[];
}

export interface RuleInfoWire {
  name: string;
  description: string;
  severity: Severity;
  fixable: boolean;
  yaml: string;
}

export interface PresetWire {
  name: string;
  description: string;
  rules: string[];
}

export interface OperatorFieldWire {
  name: string;
  type: string;
  description: string;
  required: boolean;
  default?: unknown;
  enumValues?: string[];
}

export interface OperatorWire {
  id: string;
  description: string;
  allowedFields: string[];
  fields: OperatorFieldWire[];
  examples: string[];
}

/** GET /api/operators is a JSON schema document; only these keys are consumed. */
export interface OperatorCatalogWire {
  formatVersion: number;
  operators: OperatorWire[];
}

export interface ApiErrorBody {
  error: {
    code: string;
    message: string;
    rawResponse?: string;
    violations?: ValidationViolationWire[];
  };
}
