"""Signed role tokens.

A token is a base64url JSON claim set plus an HMAC-SHA256 signature over it.
No external identity provider: the dev token endpoint mints these directly,
and anything that verifies against the shared secret is trusted.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import time
from dataclasses import dataclass
from enum import Enum
from typing import Callable


class Role(str, Enum):
    STUDENT = "student"
    TEACHER = "teacher"
    RESEARCHER = "researcher"


class AuthError(Exception):
    pass


@dataclass(frozen=True)
class RoleToken:
    user_id: str
    role: Role
    expires_at: float


def _b64encode(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _b64decode(text: str) -> bytes:
    padding = "=" * (-len(text) % 4)
    return base64.urlsafe_b64decode(text + padding)


def _sign(secret: str, claims: bytes) -> str:
    return _b64encode(hmac.new(secret.encode("utf-8"), claims, hashlib.sha256).digest())


def issue_token(
    secret: str,
    user_id: str,
    role: Role | str,
    ttl_s: float = 8 * 3600,
    clock: Callable[[], float] = time.time,
) -> str:
    role = Role(role)
    claims = json.dumps(
        {"user_id": user_id, "role": role.value, "expires_at": clock() + ttl_s},
        sort_keys=True,
    ).encode("utf-8")
    return f"{_b64encode(claims)}.{_sign(secret, claims)}"


def verify_token(secret: str, token: str, clock: Callable[[], float] = time.time) -> RoleToken:
    """Check signature and expiry; returns the claims on success."""
    try:
        claims_text, signature = token.split(".", 1)
        claims = _b64decode(claims_text)
    except (ValueError, TypeError) as exc:
        raise AuthError("token is not in claims.signature form") from exc
    if not hmac.compare_digest(signature, _sign(secret, claims)):
        raise AuthError("token signature does not verify")
    try:
        data = json.loads(claims)
        parsed = RoleToken(
            user_id=data["user_id"],
            role=Role(data["role"]),
            expires_at=float(data["expires_at"]),
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise AuthError("token claims are malformed") from exc
    if parsed.expires_at <= clock():
        raise AuthError("token has expired")
    return parsed
