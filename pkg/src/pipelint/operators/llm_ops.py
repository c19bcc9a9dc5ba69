"""Operators backed by the language-model provider."""

from __future__ import annotations

from typing import Any

from .. import llm
from ..dsl import OperatorStep
from ..values import PipelineValue
from .base import OperatorError, register


@register("evaluateUsingLLM")
def evaluate_using_llm_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    model = str(step.get("model")) or None
    rule_definition = str(step.get("ruleDefinition"))
    try:
        verdict = llm.evaluate_document(
            rule=ctx.rule,
            step_outputs=ctx.step_outputs,
            prior_diagnostics=ctx.diagnostics,
            markdown=ctx.markdown,
            provider=ctx.env.provider,
            model=model,
            rule_definition=rule_definition,
        )
    except llm.VerdictParseError as exc:
        raise OperatorError(f"model reply did not follow the verdict format: {exc}") from exc
    except llm.ProviderError as exc:
        raise OperatorError(str(exc), retriable=exc.retriable) from exc
    return PipelineValue.verdict(verdict)


@register("fixUsingLLM")
def fix_using_llm_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    # marks the rule fixable; the fix itself runs on demand, per diagnostic
    ctx.fix_directive = {
        "model": str(step.get("model")),
        "prompt": str(step.get("prompt")),
    }
    return value
