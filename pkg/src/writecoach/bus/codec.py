"""Wire format for bus payloads: a versioned JSON envelope."""

from __future__ import annotations

import json
from typing import Any

SCHEMA = "writecoach/1"
_MAJOR = SCHEMA.rsplit("/", 1)[1]


class CodecError(ValueError):
    pass


def encode_message(kind: str, body: dict[str, Any]) -> str:
    """Serialize a message body under its kind tag."""
    return json.dumps(
        {"schema": SCHEMA, "kind": kind, "body": body}, sort_keys=True, separators=(",", ":")
    )


def decode_message(text: str) -> tuple[str, dict[str, Any]]:
    """Decode a payload, checking the schema major version."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodecError(f"payload is not JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise CodecError("payload is not an object")
    schema = data.get("schema")
    if not isinstance(schema, str) or "/" not in schema:
        raise CodecError(f"missing or malformed schema tag: {schema!r}")
    major = schema.rsplit("/", 1)[1]
    if major != _MAJOR:
        raise CodecError(f"unsupported schema version {schema!r}")
    kind = data.get("kind")
    body = data.get("body")
    if not isinstance(kind, str) or not kind or not isinstance(body, dict):
        raise CodecError("payload needs a non-empty kind and an object body")
    return kind, body
