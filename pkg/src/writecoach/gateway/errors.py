"""Gateway error taxonomy.

Transport failures (timeout, unavailable) are never retried here; a reply
that arrives but cannot be parsed into a valid verdict is retried exactly
once before ``MalformedReply`` escapes.
"""


class GatewayError(Exception):
    """Base class for analysis backend failures."""


class BackendTimeout(GatewayError):
    pass


class BackendUnavailable(GatewayError):
    pass


class MalformedReply(GatewayError):
    pass


class UnknownBackend(GatewayError):
    pass


class DuplicateBackendId(GatewayError):
    pass
