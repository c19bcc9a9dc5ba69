"""Operator implementations; importing this package fills the registry."""

from . import enforce, extraction, llm_ops, metrics_ops, network, scripting  # noqa: F401
from .base import REGISTRY, OfflineSkip, OperatorError, PolicyError, register

__all__ = [
    "REGISTRY",
    "OfflineSkip",
    "OperatorError",
    "PolicyError",
    "register",
]
