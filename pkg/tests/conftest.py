import itertools

import pytest

from writecoach.config import AppConfig, HttpConfig, StoreConfig
from writecoach.gateway.config import ModelConfig
from writecoach.gateway.registry import BackendDescriptor, BackendRegistry, TransportKind
from writecoach.services.runtime import ServiceRuntime, build_runtime

FIXED_TIME = 1_700_000_000.0


@pytest.fixture
def fixed_clock():
    return lambda: FIXED_TIME


@pytest.fixture
def seq_ids():
    counter = itertools.count(1)
    return lambda: f"id{next(counter):04d}"


@pytest.fixture
def oracle_config():
    return ModelConfig(backend_id="oracle", model_name="rules-v1", timeout_ms=5000)


@pytest.fixture
def oracle_registry():
    registry = BackendRegistry()
    registry.register(
        BackendDescriptor(
            backend_id="oracle", kind=TransportKind.ORACLE, default_model="rules-v1"
        )
    )
    return registry


def make_runtime(clock, id_factory) -> ServiceRuntime:
    config = AppConfig(
        http=HttpConfig(auth_secret="test-secret"),
        store=StoreConfig(engine="memory"),
        backends=(
            BackendDescriptor(
                backend_id="oracle", kind=TransportKind.ORACLE, default_model="rules-v1"
            ),
        ),
    )
    runtime = build_runtime(config, clock=clock, id_factory=id_factory)
    for worker in runtime.workers:
        if hasattr(worker, "analysis_clock"):
            worker.analysis_clock = lambda: 0.0
    return runtime


@pytest.fixture
def runtime(fixed_clock, seq_ids) -> ServiceRuntime:
    return make_runtime(fixed_clock, seq_ids)
