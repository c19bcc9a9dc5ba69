"""Loading the shipped (or a user-supplied) rule corpus and its presets."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .dsl import Preset, Rule, load_preset_text, load_rule_documents


@dataclass
class RuleCorpus:
    rules: dict[str, Rule] = field(default_factory=dict)
    presets: dict[str, Preset] = field(default_factory=dict)

    def resolve(self, preset: Preset) -> tuple[list[Rule], list[str]]:
        """Rules a preset names, plus the names that do not resolve."""
        found = []
        missing = []
        for name in preset.rule_names:
            rule = self.rules.get(name)
            if rule is None:
                missing.append(name)
            else:
                found.append(rule)
        return found, missing


def default_corpus_dir() -> Path:
    return Path(__file__).resolve().parent / "corpus_data"


def load_corpus(directory: Optional[Path | str] = None) -> tuple[RuleCorpus, list[str]]:
    """Parse every rule and preset file; errors never hide the loadable rest."""
    root = Path(directory) if directory is not None else default_corpus_dir()
    if not root.is_dir():
        raise OSError(f"corpus directory not found: {root}")
    corpus = RuleCorpus()
    errors: list[str] = []

    for path in sorted((root / "rules").glob("*.yaml")):
        try:
            text = path.read_text("utf-8")
        except OSError as exc:
            errors.append(f"{path.name}: {exc}")
            continue
        rules, violations = load_rule_documents(text)
        errors.extend(
            f"{path.name}: {v.path + ': ' if v.path else ''}{v.message}"
            for v in violations
            if v.level == "error"
        )
        for rule in rules:
            if rule.name in corpus.rules:
                errors.append(f"{path.name}: duplicate rule name {rule.name!r}")
            else:
                corpus.rules[rule.name] = rule

    for path in sorted((root / "presets").glob("*.yaml")):
        try:
            text = path.read_text("utf-8")
        except OSError as exc:
            errors.append(f"{path.name}: {exc}")
            continue
        preset, violations = load_preset_text(text, source=path.name)
        errors.extend(f"{v.path}: {v.message}" if v.path else v.message for v in violations)
        if preset is None:
            continue
        if preset.name in corpus.presets:
            errors.append(f"{path.name}: duplicate preset name {preset.name!r}")
            continue
        corpus.presets[preset.name] = preset
        _, missing = corpus.resolve(preset)
        errors.extend(
            f"{path.name}: preset names unknown rule {name!r}" for name in missing
        )

    return corpus, errors


def list_rules(corpus: RuleCorpus, query: Optional[str] = None) -> list[tuple[str, str]]:
    """Sorted (name, description) pairs, optionally substring-filtered."""
    needle = (query or "").strip().lower()
    out = []
    for name in sorted(corpus.rules):
        rule = corpus.rules[name]
        if needle and needle not in name.lower() and needle not in rule.description.lower():
            continue
        out.append((name, rule.description))
    return out
