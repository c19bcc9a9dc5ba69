/** Editor state and its transitions. Pure functions over a snapshot object;
 * the DOM layer only dispatches these and re-renders. */

import type { FixResponseWire, LintReportWire, PresetWire, RuleInfoWire } from "./types.js";

export interface PendingFix {
  diagnosticId: string;
  ruleName: string;
  original: string;
  proposed: string;
}

export interface EditorState {
  markdownText: string;
  activeRuleYaml: string;
  selectedPreset?: string;
  selectedRuleNames: Set<string>;
  lastReport?: LintReportWire;
  /** The exact text lastReport was produced from; staleness derives from it. */
  lastReportMarkdown?: string;
  /** Present only while a fix preview is open. */
  pendingFix?: PendingFix;
}

export function initialState(markdownText = "", activeRuleYaml = ""): EditorState {
  return { markdownText, activeRuleYaml, selectedRuleNames: new Set() };
}

/** Editing closes any open fix preview: the preview was for the old text. */
export function setMarkdown(state: EditorState, text: string): EditorState {
  return { ...state, markdownText: text, pendingFix: undefined };
}

export function setRuleYaml(state: EditorState, yaml: string): EditorState {
  return { ...state, activeRuleYaml: yaml };
}

export function isReportStale(state: EditorState): boolean {
  return state.lastReport !== undefined && state.lastReportMarkdown !== state.markdownText;
}

export function applyReport(
  state: EditorState,
  report: LintReportWire,
  forMarkdown: string,
): EditorState {
  return { ...state, lastReport: report, lastReportMarkdown: forMarkdown };
}

export function selectPreset(state: EditorState, name?: string): EditorState {
  return { ...state, selectedPreset: name };
}

export function toggleRule(state: EditorState, ruleName: string): EditorState {
  const selected = new Set(state.selectedRuleNames);
  if (selected.has(ruleName)) {
    selected.delete(ruleName);
  } else {
    selected.add(ruleName);
  }
  return { ...state, selectedRuleNames: selected };
}

export function hasSelection(state: EditorState): boolean {
  return state.selectedPreset !== undefined || state.selectedRuleNames.size > 0;
}

/** "Ignore globally": drop the rule from the current selection. A selected
 * preset is materialized into its member rules minus the ignored one. */
export function ignoreGlobally(
  state: EditorState,
  ruleName: string,
  presets: PresetWire[],
): EditorState {
  if (state.selectedPreset !== undefined) {
    const preset = presets.find((p) => p.name === state.selectedPreset);
    const members = preset ? preset.rules : [];
    return {
      ...state,
      selectedPreset: undefined,
      selectedRuleNames: new Set(members.filter((name) => name !== ruleName)),
    };
  }
  const selected = new Set(state.selectedRuleNames);
  selected.delete(ruleName);
  return { ...state, selectedRuleNames: selected };
}

export function openFixPreview(state: EditorState, fix: FixResponseWire): EditorState {
  return {
    ...state,
    pendingFix: {
      diagnosticId: fix.diagnosticId,
      ruleName: fix.ruleName,
      original: state.markdownText,
      proposed: fix.fixedMarkdown,
    },
  };
}

/** Accept swaps in the API's fixed document; the UI computes no patch itself. */
export function acceptFix(state: EditorState): EditorState {
  if (!state.pendingFix) return state;
  return { ...state, markdownText: state.pendingFix.proposed, pendingFix: undefined };
}

export function rejectFix(state: EditorState): EditorState {
  if (!state.pendingFix) return state;
  return { ...state, markdownText: state.pendingFix.original, pendingFix: undefined };
}

export interface RuleGroup {
  /** Preset name, or null for rules no preset claims. */
  preset: string | null;
  rules: RuleInfoWire[];
}

/** Groups the rule list by preset to keep a long catalog navigable. */
export function groupRulesByPreset(
  presets: PresetWire[],
  rules: RuleInfoWire[],
): RuleGroup[] {
  const byName = new Map(rules.map((rule) => [rule.name, rule]));
  const claimed = new Set<string>();
  const groups: RuleGroup[] = [];
  for (const preset of presets) {
    const members = preset.rules
      .map((name) => byName.get(name))
      .filter((rule): rule is RuleInfoWire => rule !== undefined);
    for (const rule of members) claimed.add(rule.name);
    groups.push({ preset: preset.name, rules: members });
  }
  const unclaimed = rules.filter((rule) => !claimed.has(rule.name));
  if (unclaimed.length > 0) {
    groups.push({ preset: null, rules: unclaimed });
  }
  return groups;
}
