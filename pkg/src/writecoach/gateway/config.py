"""Per-session model parameters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class InvalidModelConfig(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    """Which backend checks a session's sentences, and how."""

    backend_id: str
    model_name: str
    temperature: float = 0.0
    max_tokens: int = 256
    timeout_ms: int = 30_000

    def __post_init__(self) -> None:
        if not self.backend_id:
            raise InvalidModelConfig("backend_id is required")
        if not self.model_name:
            raise InvalidModelConfig("model_name is required")
        if self.temperature < 0:
            raise InvalidModelConfig(f"temperature {self.temperature} is negative")
        if self.max_tokens <= 0:
            raise InvalidModelConfig(f"max_tokens {self.max_tokens} must be positive")
        if self.timeout_ms <= 0:
            raise InvalidModelConfig(f"timeout_ms {self.timeout_ms} must be positive")

    def to_dict(self) -> dict[str, Any]:
        return {
            "backend_id": self.backend_id,
            "model_name": self.model_name,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "timeout_ms": self.timeout_ms,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModelConfig":
        return cls(
            backend_id=data["backend_id"],
            model_name=data["model_name"],
            temperature=float(data.get("temperature", 0.0)),
            max_tokens=int(data.get("max_tokens", 256)),
            timeout_ms=int(data.get("timeout_ms", 30_000)),
        )
