"""Operator implementation protocol, errors, and the registry."""

from __future__ import annotations

from typing import Any, Callable

from ..dsl import OperatorStep
from ..values import PipelineValue

# fn(ctx, step, value) -> PipelineValue; ctx is the engine's ExecutionContext
OperatorFn = Callable[[Any, OperatorStep, PipelineValue], PipelineValue]

REGISTRY: dict[str, OperatorFn] = {}


class OperatorError(Exception):
    """Configuration or runtime failure inside one operator."""

    def __init__(self, message: str, retriable: bool = False):
        super().__init__(message)
        self.retriable = retriable


class PolicyError(OperatorError):
    """The operator needs a capability the environment policy disables."""


class OfflineSkip(Exception):
    """Network operator invoked with networking off: skip the rule, warn."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def register(operator_id: str) -> Callable[[OperatorFn], OperatorFn]:
    def wrap(fn: OperatorFn) -> OperatorFn:
        REGISTRY[operator_id] = fn
        return fn

    return wrap
