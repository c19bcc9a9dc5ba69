/** Inline ignore directives. The token syntax must match the engine exactly. */

export function localIgnoreDirective(ruleName: string): string {
  return `<ignore-line-for:${ruleName}/>`;
}

/** Appends the directive to the given 1-based line. Idempotent per rule. */
export function insertLocalIgnore(
  markdown: string,
  line: number,
  ruleName: string,
): string {
  const directive = localIgnoreDirective(ruleName);
  const lines = markdown.split("\n");
  const index = line - 1;
  const target = lines[index];
  if (target === undefined || target.includes(directive)) {
    return markdown;
  }
  lines[index] = target.length > 0 ? `${target} ${directive}` : directive;
  return lines.join("\n");
}
