/** Browser wiring: binds the pure modules to the page. No business logic
 * lives here; every verdict, span, and fix shown comes from the API. */

import { ApiError, PlaygroundApi } from "./api.js";
import { badges, renderConsole } from "./consoleView.js";
import { buildHoverIndex, hoverText, type HoverIndex } from "./hover.js";
import { insertLocalIgnore } from "./ignore.js";
import {
  acceptFix,
  applyReport,
  groupRulesByPreset,
  hasSelection,
  ignoreGlobally,
  initialState,
  isReportStale,
  openFixPreview,
  rejectFix,
  selectPreset,
  setMarkdown,
  setRuleYaml,
  toggleRule,
  type EditorState,
} from "./state.js";
import type { DiagnosticWire, PresetWire, RuleInfoWire } from "./types.js";
import { underlinesByLine, type Underline } from "./underline.js";

const STORAGE_KEY = "pipelint-playground-state";

const SAMPLE_DOCUMENT = `# my project

A small example document. Edit me and press Run.

🎉 🎉 🎉

see the docs for more
`;

interface Elements {
  editor: HTMLTextAreaElement;
  overlay: HTMLElement;
  consolePane: HTMLElement;
  badgesPane: HTMLElement;
  staleBanner: HTMLElement;
  errorBanner: HTMLElement;
  presetSelect: HTMLSelectElement;
  ruleList: HTMLElement;
  runButton: HTMLButtonElement;
  ruleYaml: HTMLTextAreaElement;
  ruleHover: HTMLElement;
  validateButton: HTMLButtonElement;
  validationPane: HTMLElement;
  ideaInput: HTMLInputElement;
  generateButton: HTMLButtonElement;
  fixDialog: HTMLElement;
  fixOriginal: HTMLElement;
  fixProposed: HTMLElement;
  fixAccept: HTMLButtonElement;
  fixReject: HTMLButtonElement;
  baseUrlInput: HTMLInputElement;
}

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function loadPersisted(): { markdown?: string; yaml?: string } {
  try {
    const raw = window.localStorage.getItem(STORAGE_KEY);
    return raw ? (JSON.parse(raw) as { markdown?: string; yaml?: string }) : {};
  } catch {
    return {};
  }
}

function persist(state: EditorState): void {
  try {
    window.localStorage.setItem(
      STORAGE_KEY,
      JSON.stringify({ markdown: state.markdownText, yaml: state.activeRuleYaml }),
    );
  } catch {
    // private mode or full storage: persistence is best effort
  }
}

export function startPlayground(): void {
  const elements: Elements = {
    editor: el("editor"),
    overlay: el("overlay"),
    consolePane: el("console"),
    badgesPane: el("badges"),
    staleBanner: el("stale-banner"),
    errorBanner: el("error-banner"),
    presetSelect: el("preset-select"),
    ruleList: el("rule-list"),
    runButton: el("run-button"),
    ruleYaml: el("rule-yaml"),
    ruleHover: el("rule-hover"),
    validateButton: el("validate-button"),
    validationPane: el("validation"),
    ideaInput: el("idea-input"),
    generateButton: el("generate-button"),
    fixDialog: el("fix-dialog"),
    fixOriginal: el("fix-original"),
    fixProposed: el("fix-proposed"),
    fixAccept: el("fix-accept"),
    fixReject: el("fix-reject"),
    baseUrlInput: el("base-url"),
  };

  const persisted = loadPersisted();
  let state = initialState(persisted.markdown ?? SAMPLE_DOCUMENT, persisted.yaml ?? "");
  let api = new PlaygroundApi(elements.baseUrlInput.value);
  let hoverIndex: HoverIndex = { entries: new Map() };
  let knownPresets: PresetWire[] = [];
  let knownRules: RuleInfoWire[] = [];

  elements.baseUrlInput.addEventListener("change", () => {
    api = new PlaygroundApi(elements.baseUrlInput.value);
    void loadCatalogs();
  });

  function update(next: EditorState): void {
    state = next;
    persist(state);
    render();
  }

  function showError(message: string): void {
    elements.errorBanner.textContent = message;
    elements.errorBanner.hidden = false;
  }

  function clearError(): void {
    elements.errorBanner.hidden = true;
  }

  function render(): void {
    if (elements.editor.value !== state.markdownText) {
      elements.editor.value = state.markdownText;
    }
    if (elements.ruleYaml.value !== state.activeRuleYaml) {
      elements.ruleYaml.value = state.activeRuleYaml;
    }
    elements.staleBanner.hidden = !isReportStale(state);
    renderOverlay();
    renderReport();
    renderFixDialog();
    elements.runButton.disabled = !hasSelection(state);
  }

  function renderOverlay(): void {
    elements.overlay.textContent = "";
    const report = state.lastReport;
    const lines = state.markdownText.split("\n");
    const marked: Map<number, Underline[]> =
      report && !isReportStale(state) ? underlinesByLine(report) : new Map();
    lines.forEach((text, i) => {
      const row = document.createElement("div");
      row.className = "overlay-line";
      const marks = marked.get(i + 1) ?? [];
      const first = marks[0];
      if (first) {
        const worst = marks.some((m) => m.severity === "error") ? "error" : first.severity;
        row.classList.add(`underline-${worst}`);
        row.title = marks.map((m) => `${m.ruleName}: ${m.message}`).join("\n");
      }
      row.textContent = text.length > 0 ? text : " ";
      elements.overlay.appendChild(row);
    });
  }

  function renderReport(): void {
    const report = state.lastReport;
    if (!report) {
      elements.consolePane.textContent = "(no run yet)";
      elements.badgesPane.textContent = "";
      return;
    }
    elements.consolePane.textContent = renderConsole(report);
    elements.badgesPane.textContent = "";
    for (const badge of badges(report)) {
      const chip = document.createElement("span");
      chip.className = `badge badge-${badge.outcome}`;
      chip.textContent = `${badge.ruleName}: ${badge.outcome}`;
      elements.badgesPane.appendChild(chip);
      const result = report.ruleResults.find((r) => r.ruleName === badge.ruleName);
      const firstDiag = result?.diagnostics[0];
      if (firstDiag) {
        chip.appendChild(ignoreControls(firstDiag));
        if (result?.fixable) {
          chip.appendChild(fixButton(firstDiag, badge.ruleName));
        }
      }
    }
  }

  function ignoreControls(diag: DiagnosticWire): HTMLElement {
    const wrap = document.createElement("span");
    const local = document.createElement("button");
    local.textContent = "ignore line";
    local.addEventListener("click", () => {
      const patched = insertLocalIgnore(
        state.markdownText,
        diag.span.startLine,
        diag.ruleName,
      );
      update(setMarkdown(state, patched));
    });
    const global = document.createElement("button");
    global.textContent = "ignore rule";
    global.addEventListener("click", () => {
      update(ignoreGlobally(state, diag.ruleName, knownPresets));
      renderRuleList();
    });
    wrap.append(local, global);
    return wrap;
  }

  function fixButton(diag: DiagnosticWire, ruleName: string): HTMLElement {
    const button = document.createElement("button");
    button.textContent = "preview fix";
    button.addEventListener("click", () => {
      void previewFix(ruleName);
    });
    return button;
  }

  async function previewFix(ruleName: string): Promise<void> {
    clearError();
    try {
      const fix = await api.fix(state.markdownText, ruleName, `${ruleName}:0`);
      update(openFixPreview(state, fix));
    } catch (error) {
      showError(describe(error));
    }
  }

  function renderFixDialog(): void {
    const pending = state.pendingFix;
    elements.fixDialog.hidden = !pending;
    if (pending) {
      elements.fixOriginal.textContent = pending.original;
      elements.fixProposed.textContent = pending.proposed;
    }
  }

  function renderRuleList(): void {
    elements.ruleList.textContent = "";
    for (const group of groupRulesByPreset(knownPresets, knownRules)) {
      const heading = document.createElement("h3");
      heading.textContent = group.preset ?? "other rules";
      elements.ruleList.appendChild(heading);
      for (const rule of group.rules) {
        const label = document.createElement("label");
        const box = document.createElement("input");
        box.type = "checkbox";
        box.checked = state.selectedRuleNames.has(rule.name);
        box.addEventListener("change", () => {
          update(toggleRule(state, rule.name));
        });
        label.append(box, ` ${rule.name}`);
        label.title = rule.description;
        elements.ruleList.appendChild(label);
      }
    }
  }

  async function run(): Promise<void> {
    clearError();
    const markdown = state.markdownText;
    try {
      const report = await api.lint({
        markdown,
        ...(state.selectedPreset
          ? { preset: state.selectedPreset }
          : { rules: [...state.selectedRuleNames] }),
      });
      update(applyReport(state, report, markdown));
    } catch (error) {
      if (error instanceof DOMException && error.name === "AbortError") {
        return; // superseded by a newer run
      }
      // the previous report stays on screen; the banner is non-blocking
      showError(describe(error));
    }
  }

  async function loadCatalogs(): Promise<void> {
    try {
      const [presets, rules, catalog] = await Promise.all([
        api.presets(),
        api.rules(),
        api.operators(),
      ]);
      knownPresets = presets;
      knownRules = rules;
      hoverIndex = buildHoverIndex(catalog);
      elements.presetSelect.textContent = "";
      const none = document.createElement("option");
      none.value = "";
      none.textContent = "(pick rules below)";
      elements.presetSelect.appendChild(none);
      for (const preset of presets) {
        const option = document.createElement("option");
        option.value = preset.name;
        option.textContent = preset.name;
        elements.presetSelect.appendChild(option);
      }
      renderRuleList();
      clearError();
    } catch (error) {
      showError(describe(error));
    }
  }

  elements.editor.addEventListener("input", () => {
    update(setMarkdown(state, elements.editor.value));
  });
  elements.ruleYaml.addEventListener("input", () => {
    update(setRuleYaml(state, elements.ruleYaml.value));
  });
  elements.ruleYaml.addEventListener("mouseup", () => {
    const token = tokenAtCursor(elements.ruleYaml);
    const hint = token ? hoverText(hoverIndex, token.operator, token.field) : undefined;
    elements.ruleHover.textContent = hint ?? "";
  });
  elements.presetSelect.addEventListener("change", () => {
    update(selectPreset(state, elements.presetSelect.value || undefined));
  });
  elements.runButton.addEventListener("click", () => {
    void run();
  });
  elements.validateButton.addEventListener("click", () => {
    void (async () => {
      clearError();
      try {
        const result = await api.validateRule(state.activeRuleYaml);
        elements.validationPane.textContent = result.ok
          ? `ok: ${(result.rules ?? []).join(", ")}`
          : result.violations.map((v) => `${v.path}: ${v.message}`).join("\n");
      } catch (error) {
        showError(describe(error));
      }
    })();
  });
  elements.generateButton.addEventListener("click", () => {
    void (async () => {
      clearError();
      elements.validationPane.textContent = "";
      try {
        const generated = await api.generateRule(elements.ideaInput.value);
        update(setRuleYaml(state, generated.yaml));
      } catch (error) {
        if (error instanceof ApiError && error.code === "generation_failed") {
          const details = (error.violations ?? [])
            .map((v) => `${v.path}: ${v.message}`)
            .join("\n");
          elements.validationPane.textContent =
            `generation failed\n${details}\n\nraw response:\n${error.rawResponse ?? ""}`;
          return;
        }
        showError(describe(error));
      }
    })();
  });
  elements.fixAccept.addEventListener("click", () => {
    update(acceptFix(state));
  });
  elements.fixReject.addEventListener("click", () => {
    update(rejectFix(state));
  });

  render();
  void loadCatalogs();
}

/** Finds "operator: id" context and the field name under the cursor. */
function tokenAtCursor(
  area: HTMLTextAreaElement,
): { operator: string; field?: string } | undefined {
  const before = area.value.slice(0, area.selectionStart);
  const operatorMatch = [...before.matchAll(/operator:\s*([A-Za-z]+)/g)].pop();
  if (!operatorMatch) return undefined;
  const lineStart = before.lastIndexOf("\n") + 1;
  const line = area.value.slice(lineStart, area.selectionStart);
  const fieldMatch = /^\s*(?:-\s*)?([A-Za-z_]+):/.exec(line);
  const field = fieldMatch?.[1];
  return field && field !== "operator"
    ? { operator: operatorMatch[1] ?? "", field }
    : { operator: operatorMatch[1] ?? "" };
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    return `${error.code}: ${error.message}`;
  }
  if (error instanceof Error) {
    return `API unreachable: ${error.message}`;
  }
  return String(error);
}

if (typeof document !== "undefined" && document.getElementById("editor")) {
  startPlayground();
}
