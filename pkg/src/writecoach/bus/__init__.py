"""In-process message log with consumer groups and at-least-once delivery."""

from writecoach.bus.log import (
    CORE_TOPICS,
    PUSH_TOPIC,
    REPORTS_TOPIC,
    REQUEST_TOPIC,
    RESPONSE_TOPIC,
    BusEnvelope,
    InProcessBus,
    UnknownTopic,
)
from writecoach.bus.codec import CodecError, decode_message, encode_message

__all__ = [
    "CORE_TOPICS",
    "PUSH_TOPIC",
    "REPORTS_TOPIC",
    "REQUEST_TOPIC",
    "RESPONSE_TOPIC",
    "BusEnvelope",
    "CodecError",
    "InProcessBus",
    "UnknownTopic",
    "decode_message",
    "encode_message",
]
