/** Thin typed client for the linter API. All rendering data comes from here;
 * the playground itself never computes verdicts, spans, or fixes. */

import type {
  ApiErrorBody,
  FixResponseWire,
  GenerateResponseWire,
  LintReportWire,
  LintRequest,
  OperatorCatalogWire,
  PresetWire,
  RuleInfoWire,
  ValidateResponseWire,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly rawResponse?: string;
  readonly violations?: { path: string; message: string }[];

  constructor(status: number, body: ApiErrorBody["error"]) {
    super(body.message);
    this.name = "ApiError";
    this.status = status;
    this.code = body.code;
    this.rawResponse = body.rawResponse;
    this.violations = body.violations;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class PlaygroundApi {
  private lintController: AbortController | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  /** Runs a lint request; a newer call cancels the one still in flight. */
  async lint(request: LintRequest): Promise<LintReportWire> {
    this.lintController?.abort();
    const controller = new AbortController();
    this.lintController = controller;
    try {
      return await this.post<LintReportWire>("/api/lint", request, controller.signal);
    } finally {
      if (this.lintController === controller) this.lintController = null;
    }
  }

  generateRule(idea: string, model?: string): Promise<GenerateResponseWire> {
    return this.post("/api/rules/generate", model ? { idea, model } : { idea });
  }

  validateRule(yaml: string): Promise<ValidateResponseWire> {
    return this.post("/api/rules/validate", { yaml });
  }

  fix(
    markdown: string,
    ruleName: string,
    diagnosticId: string,
  ): Promise<FixResponseWire> {
    return this.post("/api/fix", { markdown, ruleName, diagnosticId });
  }

  async rules(): Promise<RuleInfoWire[]> {
    const data = await this.get<{ rules: RuleInfoWire[] }>("/api/rules");
    return data.rules;
  }

  async presets(): Promise<PresetWire[]> {
    const data = await this.get<{ presets: PresetWire[] }>("/api/presets");
    return data.presets;
  }

  operators(): Promise<OperatorCatalogWire> {
    return this.get("/api/operators");
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    return this.decode<T>(response);
  }

  private async post<T>(
    path: string,
    body: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    return this.decode<T>(response);
  }

  private async decode<T>(response: Response): Promise<T> {
    if (response.ok) {
      return (await response.json()) as T;
    }
    let body: ApiErrorBody | null = null;
    try {
      body = (await response.json()) as ApiErrorBody;
    } catch {
      body = null;
    }
    if (body && typeof body.error?.message === "string") {
      throw new ApiError(response.status, body.error);
    }
    throw new ApiError(response.status, {
      code: "http_error",
      message: `request failed with status ${response.status}`,
    });
  }
}
