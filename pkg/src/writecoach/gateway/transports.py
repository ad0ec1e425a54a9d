"""Backend transports: how a prompt physically reaches a model.

Every transport exposes ``complete(request, payload) -> str`` returning the
raw reply text, which then goes through the one shared parser. The oracle
transport answers locally by serializing its verdict into the same reply
grammar the model backends are instructed to use, so both routes exercise
identical parsing.
"""

from __future__ import annotations

import json
from typing import Protocol

import httpx

from writecoach.gateway.errors import BackendTimeout, BackendUnavailable, MalformedReply
from writecoach.gateway.messages import AnalysisRequest
from writecoach.gateway.oracle import RuleTable, default_rule_table, oracle_check
from writecoach.gateway.prompts import PromptPayload


class Transport(Protocol):
    def complete(self, request: AnalysisRequest, payload: PromptPayload) -> str: ...


class OracleTransport:
    """Local deterministic backend speaking the reply grammar."""

    def __init__(self, table: RuleTable | None = None):
        self.table = table or default_rule_table()

    def complete(self, request: AnalysisRequest, payload: PromptPayload) -> str:
        verdict = oracle_check(
            request.sentence,
            request.level,
            table=self.table,
            tracked_category=request.tracked_category,
        )
        reply: dict[str, object] = {"has_error": verdict.has_error}
        if verdict.has_error:
            assert verdict.category is not None
            reply["category"] = verdict.category.value
            reply["hint"] = verdict.hint
            if verdict.span is not None:
                reply["span_start"], reply["span_end"] = verdict.span
            if verdict.correction is not None:
                reply["correction"] = verdict.correction
            if verdict.explanation is not None:
                reply["explanation"] = verdict.explanation
        return json.dumps(reply)


def _post(client: httpx.Client, url: str, body: dict, headers: dict, timeout_s: float) -> httpx.Response:
    try:
        response = client.post(url, json=body, headers=headers, timeout=timeout_s)
    except httpx.TimeoutException as exc:
        raise BackendTimeout(f"no reply from {url} within {timeout_s:.1f}s") from exc
    except httpx.HTTPError as exc:
        raise BackendUnavailable(f"request to {url} failed: {exc}") from exc
    if response.status_code >= 400:
        raise BackendUnavailable(f"{url} answered {response.status_code}")
    return response


class HostedChatTransport:
    """Chat-completions style hosted API."""

    def __init__(self, base_url: str, api_key: str | None = None, client: httpx.Client | None = None):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.client = client or httpx.Client()

    def complete(self, request: AnalysisRequest, payload: PromptPayload) -> str:
        config = request.config
        body = {
            "model": config.model_name,
            "messages": payload.messages(),
            "temperature": config.temperature,
            "max_tokens": config.max_tokens,
        }
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        response = _post(
            self.client,
            f"{self.base_url}/chat/completions",
            body,
            headers,
            config.timeout_ms / 1000.0,
        )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedReply(f"unexpected completion envelope: {exc}") from exc


class LocalServerTransport:
    """Self-hosted model server with an Ollama-style chat endpoint."""

    def __init__(self, base_url: str, client: httpx.Client | None = None):
        self.base_url = base_url.rstrip("/")
        self.client = client or httpx.Client()

    def complete(self, request: AnalysisRequest, payload: PromptPayload) -> str:
        config = request.config
        body = {
            "model": config.model_name,
            "messages": payload.messages(),
            "stream": False,
            "options": {
                "temperature": config.temperature,
                "num_predict": config.max_tokens,
            },
        }
        response = _post(
            self.client, f"{self.base_url}/api/chat", body, {}, config.timeout_ms / 1000.0
        )
        try:
            return response.json()["message"]["content"]
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedReply(f"unexpected chat envelope: {exc}") from exc
