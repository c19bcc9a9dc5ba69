/** Hover hints for the rule editor, derived entirely from GET /api/operators. */

import type { OperatorCatalogWire, OperatorFieldWire } from "./types.js";

export interface HoverIndex {
  /** keys: "operatorId" and "operatorId.fieldName" */
  entries: Map<string, string>;
}

function fieldHint(field: OperatorFieldWire): string {
  let hint = `${field.name} (${field.type}): ${field.description}`;
  if (field.enumValues?.length) {
    hint += ` One of: ${field.enumValues.join(", ")}.`;
  }
  if (!field.required && field.default !== undefined) {
    hint += ` Default: ${JSON.stringify(field.default)}.`;
  }
  return hint;
}

export function buildHoverIndex(catalog: OperatorCatalogWire): HoverIndex {
  const entries = new Map<string, string>();
  for (const op of catalog.operators) {
    entries.set(op.id, op.description);
    for (const field of op.fields) {
      entries.set(`${op.id}.${field.name}`, fieldHint(field));
    }
  }
  return { entries };
}

export function hoverText(
  index: HoverIndex,
  operatorId: string,
  fieldName?: string,
): string | undefined {
  return index.entries.get(fieldName ? `${operatorId}.${fieldName}` : operatorId);
}
