"""Backend registry and the one entry point for running an analysis."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

from writecoach.gateway.errors import DuplicateBackendId, MalformedReply, UnknownBackend
from writecoach.gateway.messages import AnalysisRequest, AnalysisResponse, LatencySample
from writecoach.gateway.oracle import RuleTable
from writecoach.gateway.parsing import parse_model_reply
from writecoach.gateway.prompts import build_prompt
from writecoach.gateway.transports import (
    HostedChatTransport,
    LocalServerTransport,
    OracleTransport,
    Transport,
)


class TransportKind(str, Enum):
    HOSTED_CHAT = "hosted-chat"
    LOCAL_SERVER = "local-server"
    ORACLE = "oracle"


@dataclass(frozen=True)
class BackendDescriptor:
    backend_id: str
    kind: TransportKind
    base_url: str | None = None
    # Environment variable holding the API key, if the backend needs one.
    api_key_env: str | None = None
    rule_table_path: str | None = None
    default_model: str = "default"

    def to_dict(self) -> dict[str, Any]:
        return {
            "backend_id": self.backend_id,
            "kind": self.kind.value,
            "base_url": self.base_url,
            "default_model": self.default_model,
        }


@dataclass
class BackendHandle:
    descriptor: BackendDescriptor
    transport: Transport


def _build_transport(descriptor: BackendDescriptor) -> Transport:
    if descriptor.kind is TransportKind.ORACLE:
        table = RuleTable.load(descriptor.rule_table_path) if descriptor.rule_table_path else None
        return OracleTransport(table)
    if descriptor.base_url is None:
        raise ValueError(f"backend {descriptor.backend_id!r} needs a base_url")
    if descriptor.kind is TransportKind.HOSTED_CHAT:
        api_key = os.environ.get(descriptor.api_key_env) if descriptor.api_key_env else None
        return HostedChatTransport(descriptor.base_url, api_key=api_key)
    return LocalServerTransport(descriptor.base_url)


@dataclass
class BackendRegistry:
    """Registered backends, looked up by id. Registration order is preserved."""

    _handles: dict[str, BackendHandle] = field(default_factory=dict)

    def register(self, descriptor: BackendDescriptor, transport: Transport | None = None) -> str:
        if descriptor.backend_id in self._handles:
            raise DuplicateBackendId(descriptor.backend_id)
        handle = BackendHandle(descriptor, transport or _build_transport(descriptor))
        self._handles[descriptor.backend_id] = handle
        return descriptor.backend_id

    def resolve(self, backend_id: str) -> BackendHandle:
        try:
            return self._handles[backend_id]
        except KeyError:
            raise UnknownBackend(backend_id) from None

    def list_backends(self) -> list[BackendDescriptor]:
        return [handle.descriptor for handle in self._handles.values()]

    def __contains__(self, backend_id: str) -> bool:
        return backend_id in self._handles


def analyze(
    handle: BackendHandle,
    request: AnalysisRequest,
    *,
    clock: Callable[[], float] = time.perf_counter,
    wall_clock: Callable[[], float] = time.time,
) -> AnalysisResponse:
    """Run one analysis through a backend.

    ``duration_ms`` measures the transport call(s) only, not prompt building
    or parsing. A reply that fails to parse is retried once; the second
    failure escapes as ``MalformedReply``. Transport failures are not retried.
    """
    payload = build_prompt(request)
    started_at = wall_clock()
    elapsed = 0.0
    raw = ""
    for attempt in (1, 2):
        t0 = clock()
        raw = handle.transport.complete(request, payload)
        elapsed += clock() - t0
        try:
            verdict = parse_model_reply(raw, request.level, sentence=request.sentence)
        except MalformedReply:
            if attempt == 2:
                raise
            continue
        return AnalysisResponse(
            correlation_id=request.correlation_id,
            verdict=verdict,
            latency=LatencySample(duration_ms=elapsed * 1000.0, started_at=started_at),
            raw_reply=raw,
        )
    raise AssertionError("unreachable")
