"""Wiring: build the store, bus, registry, workers, and service from config."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Callable

from writecoach.bus import InProcessBus
from writecoach.config import AppConfig
from writecoach.gateway.registry import BackendRegistry
from writecoach.persistence.store import FileStore, MemoryStore, Store
from writecoach.services.coordinator import LockRegistry, SessionService
from writecoach.services.push import PushHub
from writecoach.services.workers import (
    ExportWorker,
    ModelWorker,
    PushWorker,
    ResponseWorker,
)


@dataclass
class ServiceRuntime:
    config: AppConfig
    store: Store
    bus: InProcessBus
    registry: BackendRegistry
    hub: PushHub
    locks: LockRegistry
    service: SessionService
    workers: list = field(default_factory=list)
    _threads: list[threading.Thread] = field(default_factory=list)
    _stop: threading.Event = field(default_factory=threading.Event)

    def start_workers(self) -> None:
        if self._threads:
            return
        self._stop.clear()
        for worker in self.workers:
            thread = threading.Thread(
                target=self._run_worker, args=(worker,), daemon=True,
                name=f"{type(worker).__name__}-{worker.group}",
            )
            thread.start()
            self._threads.append(thread)

    def _run_worker(self, worker) -> None:
        while not self._stop.is_set():
            worker.step(block_ms=200)

    def stop_workers(self) -> None:
        self._stop.set()
        for thread in self._threads:
            thread.join(timeout=2.0)
        self._threads.clear()

    def drain(self, budget_s: float = 10.0) -> None:
        """Step every worker synchronously until nothing moves. Test use only."""
        deadline = time.monotonic() + budget_s
        while time.monotonic() < deadline:
            moved = sum(worker.step() for worker in self.workers)
            if moved == 0:
                return
        raise TimeoutError("bus did not quiesce within budget")


def build_runtime(
    config: AppConfig,
    clock: Callable[[], float] = time.time,
    id_factory: Callable[[], str] | None = None,
) -> ServiceRuntime:
    store: Store = (
        FileStore(config.store.root) if config.store.engine == "file" else MemoryStore()
    )
    bus = InProcessBus(clock=clock)
    registry = BackendRegistry()
    for descriptor in config.backends:
        registry.register(descriptor)
    hub = PushHub()
    locks = LockRegistry()
    service_kwargs = {} if id_factory is None else {"id_factory": id_factory}
    service = SessionService(store, bus, registry, locks, clock=clock, **service_kwargs)
    kinds = {descriptor.kind for descriptor in config.backends}
    workers = [ModelWorker(bus, registry, kinds={kind}) for kind in sorted(kinds, key=lambda k: k.value)]
    workers.append(ResponseWorker(bus, store, locks, clock=clock))
    workers.append(ExportWorker(bus, store))
    workers.append(PushWorker(bus, hub))
    return ServiceRuntime(
        config=config,
        store=store,
        bus=bus,
        registry=registry,
        hub=hub,
        locks=locks,
        service=service,
        workers=workers,
    )
