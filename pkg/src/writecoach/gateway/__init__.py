"""Uniform interface over sentence-analysis backends.

A backend takes one sentence and a requested hint level and returns a
``Verdict``. Hosted chat APIs, local model servers, and a deterministic
rule-based oracle all sit behind the same ``analyze`` call, so everything
above this package is backend-agnostic.
"""

from writecoach.gateway.config import ModelConfig
from writecoach.gateway.errors import (
    BackendTimeout,
    BackendUnavailable,
    DuplicateBackendId,
    GatewayError,
    MalformedReply,
    UnknownBackend,
)
from writecoach.gateway.messages import AnalysisRequest, AnalysisResponse, LatencySample
from writecoach.gateway.oracle import OracleRule, RuleTable, default_rule_table, oracle_check
from writecoach.gateway.parsing import parse_model_reply
from writecoach.gateway.prompts import PromptPayload, build_prompt
from writecoach.gateway.registry import (
    BackendDescriptor,
    BackendHandle,
    BackendRegistry,
    TransportKind,
    analyze,
)
from writecoach.gateway.verdict import ErrorCategory, Verdict

__all__ = [
    "AnalysisRequest",
    "AnalysisResponse",
    "BackendDescriptor",
    "BackendHandle",
    "BackendRegistry",
    "BackendTimeout",
    "BackendUnavailable",
    "DuplicateBackendId",
    "ErrorCategory",
    "GatewayError",
    "LatencySample",
    "MalformedReply",
    "ModelConfig",
    "OracleRule",
    "PromptPayload",
    "RuleTable",
    "TransportKind",
    "UnknownBackend",
    "Verdict",
    "analyze",
    "build_prompt",
    "default_rule_table",
    "oracle_check",
    "parse_model_reply",
]
