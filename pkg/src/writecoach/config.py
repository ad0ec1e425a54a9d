"""Application configuration loaded from YAML.

Required sections: http, store, backends. The bus section is optional (the
in-process bus needs no settings today but the section is accepted for
forward compatibility). Missing required material raises ``ConfigError``
naming what is missing; the serve command maps that to exit code 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from writecoach.gateway.registry import BackendDescriptor, TransportKind


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class HttpConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    auth_secret: str = ""
    dev_token_endpoint: bool = True
    token_ttl_s: float = 8 * 3600


@dataclass(frozen=True)
class StoreConfig:
    engine: str = "memory"
    root: str | None = None


@dataclass(frozen=True)
class AppConfig:
    http: HttpConfig
    store: StoreConfig
    backends: tuple[BackendDescriptor, ...] = field(default_factory=tuple)


def _require(data: dict, section: str) -> dict:
    if section not in data:
        raise ConfigError(f"config is missing the {section!r} section")
    value = data[section]
    if not isinstance(value, dict):
        raise ConfigError(f"config section {section!r} must be a mapping")
    return value


def _parse_backend(index: int, data: object) -> BackendDescriptor:
    if not isinstance(data, dict):
        raise ConfigError(f"backends[{index}] must be a mapping")
    for key in ("id", "kind"):
        if key not in data:
            raise ConfigError(f"backends[{index}] is missing {key!r}")
    try:
        kind = TransportKind(data["kind"])
    except ValueError:
        valid = ", ".join(k.value for k in TransportKind)
        raise ConfigError(
            f"backends[{index}] kind {data['kind']!r} is not one of: {valid}"
        ) from None
    if kind is not TransportKind.ORACLE and not data.get("base_url"):
        raise ConfigError(f"backends[{index}] ({kind.value}) needs a base_url")
    return BackendDescriptor(
        backend_id=str(data["id"]),
        kind=kind,
        base_url=data.get("base_url"),
        api_key_env=data.get("api_key_env"),
        rule_table_path=data.get("rule_table"),
        default_model=str(data.get("default_model", "default")),
    )


def load_config(path: str | Path) -> AppConfig:
    """Parse and validate a YAML config file."""
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")

    http_data = _require(data, "http")
    if not http_data.get("auth_secret"):
        raise ConfigError("http.auth_secret is required")
    http = HttpConfig(
        host=str(http_data.get("host", "127.0.0.1")),
        port=int(http_data.get("port", 8000)),
        auth_secret=str(http_data["auth_secret"]),
        dev_token_endpoint=bool(http_data.get("dev_token_endpoint", True)),
        token_ttl_s=float(http_data.get("token_ttl_s", 8 * 3600)),
    )

    store_data = _require(data, "store")
    engine = str(store_data.get("engine", "memory"))
    if engine not in ("memory", "file"):
        raise ConfigError(f"store.engine {engine!r} must be memory or file")
    root = store_data.get("root")
    if engine == "file" and not root:
        raise ConfigError("store.engine=file needs store.root")
    store = StoreConfig(engine=engine, root=str(root) if root else None)

    if "backends" not in data:
        raise ConfigError("config is missing the 'backends' section")
    backends_data = data["backends"]
    if not isinstance(backends_data, list) or not backends_data:
        raise ConfigError("backends must be a non-empty list")
    backends = tuple(_parse_backend(i, b) for i, b in enumerate(backends_data))
    ids = [b.backend_id for b in backends]
    if len(set(ids)) != len(ids):
        raise ConfigError("backend ids must be unique")

    return AppConfig(http=http, store=store, backends=backends)
