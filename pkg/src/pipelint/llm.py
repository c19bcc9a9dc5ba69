"""LLM provider access and the three prompt flows.

Flows: rule generation, document evaluation, document fixing. The provider
runs in one of three modes: ``live`` (HTTP chat-completion endpoint),
``stub`` (canned responses, no sockets), or ``replay`` (recorded exchanges
keyed by prompt hash, no sockets). Prompt templates are frozen strings;
tests pin them against golden files.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import yaml

from .catalog import CATALOG, OperatorSchema, catalog_prompt_text
from .dsl import Rule, Violation, load_rule_documents, serialize_rule
from .values import Diagnostic, PipelineValue, Verdict, describe_value

FIX_MARKER = "---FIXED MARKDOWN BELOW---"

GENERATE_SYSTEM_PROMPT = (
    "You are a README linter rule designer. Return YAML ONLY with keys: rule, "
    "description, pipeline. Use ONLY operator ids listed in the OPERATORS "
    "CATALOG. Use only the fields listed for each operator under Allowed "
    "fields. Do not add fields that are not listed. Use enum values exactly "
    "as listed when present. Include a field only if it appears in Allowed "
    "fields for that operator. YAML only. No prose. No code fences. Prefer "
    "built-in operators; Do not use customCode."
)

GENERATE_USER_PROMPT = "Idea: {idea}\nReturn the final YAML now."

EVALUATE_SYSTEM_PROMPT = """You are a Markdown rule checker. Your job is to determine if the given Markdown violates the provided rule.
Rule Definition (YAML):
{ruleYaml}

Intermediate Outputs:
{operatorOutputs}

Previous Diagnostics:
{diagnosticText}

Markdown Document:
{ctx.markdown}

Instructions:
1. First, determine if the Markdown violates the rule.
2. If it **does not**, reply exactly as follows:

**PASS**
3. If it **does**, reply exactly in this format:

**FAIL**
Line(s): [list affected line numbers]
Issue: [brief summary of the issue]
Suggestion: [suggest a fix using natural language]

Respond only in the above format — no code blocks, no additional comments."""

EVALUATE_USER_PROMPT = "Evaluate the Markdown document against the rule now."

FIX_SYSTEM_PROMPT = """You are a Markdown linter. Your job is to fix ONLY the issues that violate the specific rule defined below.
Rule Definition (YAML):
{ruleYaml}

Operator-Specific User Prompt:
{prompt}

Diagnostics from Previous Steps:
{diagnosticText}

Markdown Document:
{ctx.markdown}

Very Important Instructions:
- ONLY fix issues that are directly and clearly covered by the rule above.
- DO NOT make any changes based on grammar, tone, inclusivity, or clarity unless the rule explicitly calls for it.
- DO NOT invent improvements or infer intent not stated in the rule.
- If the Markdown content does NOT violate the rule, return the original input exactly as is — unchanged.
- Behave like a deterministic function: same input → same output.
- If there is even slight ambiguity in whether something violates the rule, you must not change it.
- DO NOT change headings, formatting, phrasing, or terms unless they clearly break the rule.
- Preserve exact trailing newlines if present in the original Markdown.

Output Format:
- ONLY include the corrected (or unmodified) Markdown below the marker.
- NEVER include explanations, comments, or wrap it in a code block.

{marker}"""

FIX_USER_PROMPT = "Return the fixed Markdown now."

_DEFAULT_GENERATED_RULE = """rule: require-two-headings
description: Each markdown document must contain at least 2 headings.
pipeline:
  - operator: extract
    target: heading
  - operator: count
  - operator: threshold
    conditions:
      - scope: document
        comparator: greaterthanorequal
        limit: 2
"""

_TRUNCATE_BYTES = 8192


class ProviderError(Exception):
    def __init__(self, message: str, retriable: bool = False):
        super().__init__(message)
        self.retriable = retriable


class ReplayMissError(ProviderError):
    def __init__(self, prompt_hash: str):
        super().__init__(f"no recorded exchange for prompt hash {prompt_hash}")
        self.prompt_hash = prompt_hash


class VerdictParseError(Exception):
    """The evaluation response matched neither the PASS nor FAIL format."""


class FixFormatError(Exception):
    """The fix response did not contain the required marker."""


class GenerationError(Exception):
    """The generated rule text failed schema validation."""

    def __init__(self, raw_response: str, violations: list[Violation]):
        self.raw_response = raw_response
        self.violations = violations
        detail = "; ".join(str(v) for v in violations) or "unparseable response"
        super().__init__(f"generated rule is invalid: {detail}")


@dataclass
class ProviderConfig:
    endpoint_url: str = ""
    model_id: str = ""
    temperature: float = 0.0
    timeout_ms: int = 30000
    api_key_env: str = "PIPELINT_API_KEY"
    mode: str = "stub"  # live | stub | replay
    supports_temperature: bool = True
    replay_dir: Optional[str] = None
    record: bool = False


@dataclass
class PromptExchange:
    system_prompt: str
    user_prompt: str
    response_text: str
    model_id: str
    timestamp: float


def prompt_hash(system_prompt: str, user_prompt: str) -> str:
    digest = hashlib.sha256()
    digest.update(system_prompt.encode("utf-8"))
    digest.update(b"\0")
    digest.update(user_prompt.encode("utf-8"))
    return digest.hexdigest()


class StubScript:
    """Canned responses for stub mode.

    Resolution order: registered matchers, then the FIFO queue, then a
    flow-aware default (generation yields a minimal valid rule, evaluation
    passes, fixing echoes the document unchanged).
    """

    def __init__(self) -> None:
        self.matchers: list[tuple[Callable[[str, str], bool], str]] = []
        self.queue: list[str] = []

    def add(self, response: str, when: Optional[Callable[[str, str], bool]] = None) -> None:
        if when is None:
            self.queue.append(response)
        else:
            self.matchers.append((when, response))

    def respond(self, system_prompt: str, user_prompt: str) -> str:
        for predicate, response in self.matchers:
            if predicate(system_prompt, user_prompt):
                return response
        if self.queue:
            return self.queue.pop(0)
        if system_prompt.startswith("You are a README linter rule designer."):
            return _DEFAULT_GENERATED_RULE
        if system_prompt.startswith("You are a Markdown linter."):
            return FIX_MARKER + "\n" + _document_slot(system_prompt)
        return "**PASS**"


def _document_slot(rendered_fix_prompt: str) -> str:
    # recover the {ctx.markdown} slot from the rendered fix template
    start = rendered_fix_prompt.find("Markdown Document:\n")
    stop = rendered_fix_prompt.find("\n\nVery Important Instructions:")
    if start < 0 or stop < 0:
        return ""
    return rendered_fix_prompt[start + len("Markdown Document:\n") : stop]


def _http_transport(
    config: ProviderConfig, system_prompt: str, user_prompt: str, model_id: str
) -> str:
    import requests

    api_key = os.environ.get(config.api_key_env, "")
    payload: dict[str, Any] = {
        "model": model_id,
        "messages": [
            {"role": "system", "content": system_prompt},
            {"role": "user", "content": user_prompt},
        ],
    }
    if config.supports_temperature:
        payload["temperature"] = config.temperature
    try:
        response = requests.post(
            config.endpoint_url,
            json=payload,
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=config.timeout_ms / 1000,
        )
    except requests.RequestException as exc:
        raise ProviderError(f"provider request failed: {exc}", retriable=True) from exc
    if response.status_code == 429 or response.status_code >= 500:
        raise ProviderError(
            f"provider returned {response.status_code}", retriable=True
        )
    if response.status_code != 200:
        raise ProviderError(f"provider returned {response.status_code}")
    try:
        return response.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError) as exc:
        raise ProviderError(f"malformed provider response: {exc}") from exc


class Provider:
    """Completion access honoring the configured mode.

    Stub and replay modes never touch the transport, so an injected counting
    transport can prove hermeticity.
    """

    def __init__(
        self,
        config: ProviderConfig,
        transport: Optional[Callable[[ProviderConfig, str, str, str], str]] = None,
    ):
        self.config = config
        self.transport = transport or _http_transport
        self.stub = StubScript()

    def complete(
        self, system_prompt: str, user_prompt: str, model: Optional[str] = None
    ) -> str:
        model_id = model or self.config.model_id
        if self.config.mode == "stub":
            return self.stub.respond(system_prompt, user_prompt)
        if self.config.mode == "replay":
            return self._replay(system_prompt, user_prompt)
        if not os.environ.get(self.config.api_key_env, ""):
            raise ProviderError(
                f"live mode needs an API key in ${self.config.api_key_env}"
            )
        response = self.transport(self.config, system_prompt, user_prompt, model_id)
        if self.config.record and self.config.replay_dir:
            self._record(system_prompt, user_prompt, response, model_id)
        return response

    def _replay_path(self, key: str) -> Path:
        assert self.config.replay_dir is not None
        return Path(self.config.replay_dir) / f"{key}.json"

    def _replay(self, system_prompt: str, user_prompt: str) -> str:
        key = prompt_hash(system_prompt, user_prompt)
        if not self.config.replay_dir:
            raise ReplayMissError(key)
        path = self._replay_path(key)
        if not path.is_file():
            raise ReplayMissError(key)
        data = json.loads(path.read_text(encoding="utf-8"))
        return data["response"]

    def _record(
        self, system_prompt: str, user_prompt: str, response: str, model_id: str
    ) -> None:
        exchange = PromptExchange(system_prompt, user_prompt, response, model_id, time.time())
        key = prompt_hash(system_prompt, user_prompt)
        path = self._replay_path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(
                {
                    "system": exchange.system_prompt,
                    "user": exchange.user_prompt,
                    "response": exchange.response_text,
                    "model": exchange.model_id,
                },
                ensure_ascii=False,
                indent=2,
            ),
            encoding="utf-8",
        )


def _truncate(text: str, limit: int = _TRUNCATE_BYTES) -> str:
    return text if len(text) <= limit else text[:limit]


def _strip_one_fence(text: str) -> str:
    stripped = text.strip()
    fenced = re.fullmatch(r"```[^\n]*\n(.*)\n```", stripped, flags=re.DOTALL)
    return fenced.group(1) if fenced else text


def render_generate_prompts(
    idea: str, catalog: tuple[OperatorSchema, ...] = CATALOG
) -> tuple[str, str]:
    system = GENERATE_SYSTEM_PROMPT + "\n\nOPERATORS CATALOG:\n\n" + catalog_prompt_text(catalog)
    user = GENERATE_USER_PROMPT.replace("{idea}", idea)
    return system, user


def generate_rule(
    idea: str,
    provider: Provider,
    catalog: tuple[OperatorSchema, ...] = CATALOG,
    model: Optional[str] = None,
) -> str:
    """Ask the model for a rule and validate it before returning the YAML."""
    system, user = render_generate_prompts(idea, catalog)
    response = provider.complete(system, user, model=model)
    cleaned = _strip_one_fence(response)
    rules, violations = load_rule_documents(cleaned)
    errors = [v for v in violations if v.level == "error"]
    if errors or not rules:
        raise GenerationError(response, errors)
    return cleaned


def _diagnostic_text(diagnostics: list[Diagnostic]) -> str:
    if not diagnostics:
        return "(none)"
    return "\n".join(f"line {d.span.start_line}: {d.message}" for d in diagnostics)


def _operator_outputs_text(step_outputs: list[PipelineValue]) -> str:
    if not step_outputs:
        return "(none)"
    blocks = []
    for i, value in enumerate(step_outputs, start=1):
        dumped = yaml.safe_dump(describe_value(value), sort_keys=False, allow_unicode=True)
        blocks.append(f"step {i}:\n{_truncate(dumped)}")
    return "\n".join(blocks)


def render_evaluate_prompts(
    rule_yaml: str,
    step_outputs: list[PipelineValue],
    prior_diagnostics: list[Diagnostic],
    markdown: str,
) -> tuple[str, str]:
    system = (
        EVALUATE_SYSTEM_PROMPT.replace("{ruleYaml}", rule_yaml)
        .replace("{operatorOutputs}", _operator_outputs_text(step_outputs))
        .replace("{diagnosticText}", _diagnostic_text(prior_diagnostics))
        .replace("{ctx.markdown}", markdown)
    )
    return system, EVALUATE_USER_PROMPT


def parse_verdict(text: str) -> Verdict:
    """Map a response to pass/fail; anything else is a parse error."""
    stripped = text.strip()
    if stripped == "**PASS**":
        return Verdict(status="pass")
    if stripped.startswith("**FAIL**"):
        body = stripped[len("**FAIL**") :]
        lines: list[int] = []
        line_match = re.search(r"^Line\(s\):(.*)$", body, flags=re.MULTILINE)
        if line_match:
            for token in re.findall(r"(\d+)(?:\s*-\s*(\d+))?", line_match.group(1)):
                start = int(token[0])
                stop = int(token[1]) if token[1] else start
                lines.extend(n for n in range(start, stop + 1) if n >= 1)
        issue_match = re.search(r"^Issue:(.*)$", body, flags=re.MULTILINE)
        issue = issue_match.group(1).strip() if issue_match else ""
        if not issue:
            raise VerdictParseError("FAIL response is missing a non-empty Issue line")
        suggestion_match = re.search(
            r"^Suggestion:(.*)\Z", body, flags=re.MULTILINE | re.DOTALL
        )
        suggestion = suggestion_match.group(1).strip() if suggestion_match else ""
        return Verdict(status="fail", lines=lines, issue=issue, suggestion=suggestion)
    raise VerdictParseError("response matched neither the PASS nor FAIL format")


def evaluate_document(
    rule: Rule,
    step_outputs: list[PipelineValue],
    prior_diagnostics: list[Diagnostic],
    markdown: str,
    provider: Provider,
    model: Optional[str] = None,
    rule_definition: str = "",
) -> Verdict:
    rule_yaml = rule_definition or serialize_rule(rule)
    system, user = render_evaluate_prompts(
        rule_yaml, step_outputs, prior_diagnostics, markdown
    )
    response = provider.complete(system, user, model=model)
    return parse_verdict(response)


def render_fix_prompts(
    rule_yaml: str,
    operator_prompt: str,
    diagnostics: list[Diagnostic],
    markdown: str,
) -> tuple[str, str]:
    system = (
        FIX_SYSTEM_PROMPT.replace("{ruleYaml}", rule_yaml)
        .replace("{prompt}", operator_prompt or "(none)")
        .replace("{diagnosticText}", _diagnostic_text(diagnostics))
        .replace("{ctx.markdown}", markdown)
        .replace("{marker}", FIX_MARKER)
    )
    return system, FIX_USER_PROMPT


def extract_fixed_markdown(response: str) -> str:
    """Everything after the first marker line, byte-for-byte."""
    index = response.find(FIX_MARKER)
    if index < 0:
        raise FixFormatError(f"fix response is missing the {FIX_MARKER!r} marker")
    after = response[index + len(FIX_MARKER) :]
    if after.startswith("\r\n"):
        return after[2:]
    if after.startswith("\n"):
        return after[1:]
    return after


def fix_document(
    rule: Rule,
    diagnostics: list[Diagnostic],
    markdown: str,
    operator_prompt: str,
    provider: Provider,
    model: Optional[str] = None,
) -> str:
    system, user = render_fix_prompts(
        serialize_rule(rule), operator_prompt, diagnostics, markdown
    )
    response = provider.complete(system, user, model=model)
    return extract_fixed_markdown(response)


def load_default_config() -> ProviderConfig:
    """Provider defaults shipped as package data; env vars override."""
    from importlib import resources

    data: dict[str, Any] = {}
    try:
        text = resources.files("pipelint").joinpath("llm_defaults.yaml").read_text("utf-8")
        loaded = yaml.safe_load(text)
        if isinstance(loaded, dict):
            data = loaded
    except (FileNotFoundError, OSError):
        pass
    config = ProviderConfig(
        endpoint_url=str(data.get("endpoint_url", "")),
        model_id=str(data.get("model_id", "")),
        temperature=float(data.get("temperature", 0.0)),
        timeout_ms=int(data.get("timeout_ms", 30000)),
        api_key_env=str(data.get("api_key_env", "PIPELINT_API_KEY")),
        mode=str(data.get("mode", "stub")),
    )
    config.mode = os.environ.get("PIPELINT_LLM_MODE", config.mode)
    config.endpoint_url = os.environ.get("PIPELINT_LLM_ENDPOINT", config.endpoint_url)
    config.model_id = os.environ.get("PIPELINT_LLM_MODEL", config.model_id)
    replay_dir = os.environ.get("PIPELINT_LLM_REPLAY_DIR")
    if replay_dir:
        config.replay_dir = replay_dir
    return config
