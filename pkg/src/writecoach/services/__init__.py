"""Service layer: session coordination, workers, push delivery, HTTP surface."""

from writecoach.services.auth import AuthError, Role, RoleToken, issue_token, verify_token
from writecoach.services.push import PushEvent, PushHub, PushKind, Subscription
from writecoach.services.coordinator import LockRegistry, SessionService
from writecoach.services.workers import (
    ExportWorker,
    ModelWorker,
    PushWorker,
    ResponseWorker,
    WorkerKilled,
)
from writecoach.services.runtime import ServiceRuntime, build_runtime
from writecoach.services.http import create_app

__all__ = [
    "AuthError",
    "ExportWorker",
    "LockRegistry",
    "ModelWorker",
    "PushEvent",
    "PushHub",
    "PushKind",
    "PushWorker",
    "ResponseWorker",
    "Role",
    "RoleToken",
    "ServiceRuntime",
    "SessionService",
    "Subscription",
    "WorkerKilled",
    "build_runtime",
    "create_app",
    "issue_token",
    "verify_token",
]
