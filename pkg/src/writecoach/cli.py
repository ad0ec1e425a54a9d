"""Command line entry points.

Exit codes: 0 success, 1 configuration problems, 2 input problems (unreadable
or invalid corpus, unknown backend ids).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from writecoach.analytics.benchmark import run_benchmark, write_benchmark_csvs
from writecoach.analytics.corpus import bundled_corpus_path, validate_corpus
from writecoach.config import ConfigError, load_config
from writecoach.gateway.registry import (
    BackendDescriptor,
    BackendRegistry,
    TransportKind,
)

ORACLE_BACKEND_ID = "oracle"


@click.group()
def main() -> None:
    """Sentence-level writing assessment service and benchmark tools."""


@main.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(path_type=Path),
    help="YAML config file.",
)
def serve(config_path: Path) -> None:
    """Run the HTTP service and its workers."""
    import uvicorn

    from writecoach.services.http import create_app
    from writecoach.services.runtime import build_runtime

    try:
        config = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    runtime = build_runtime(config)
    runtime.start_workers()
    try:
        uvicorn.run(create_app(runtime), host=config.http.host, port=config.http.port)
    finally:
        runtime.stop_workers()


def _build_bench_registry(config_path: Path | None) -> BackendRegistry:
    registry = BackendRegistry()
    if config_path is not None:
        config = load_config(config_path)
        for descriptor in config.backends:
            registry.register(descriptor)
    if ORACLE_BACKEND_ID not in registry:
        registry.register(
            BackendDescriptor(
                backend_id=ORACLE_BACKEND_ID,
                kind=TransportKind.ORACLE,
                default_model="rules-v1",
            )
        )
    return registry


@main.command()
@click.option(
    "--corpus",
    "corpus_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Labelled corpus CSV; defaults to the bundled sample.",
)
@click.option(
    "--backend",
    "backend_ids",
    multiple=True,
    required=True,
    help="Backend id to benchmark; repeatable.",
)
@click.option("--reps", default=1, show_default=True, help="Repetitions per backend.")
@click.option(
    "--out",
    "out_dir",
    required=True,
    type=click.Path(path_type=Path),
    help="Directory for the CSV report files.",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Optional service config supplying backend definitions.",
)
def bench(
    corpus_path: Path | None,
    backend_ids: tuple[str, ...],
    reps: int,
    out_dir: Path,
    config_path: Path | None,
) -> None:
    """Benchmark backends against a labelled corpus and write CSV reports."""
    try:
        registry = _build_bench_registry(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)

    corpus_file = corpus_path or bundled_corpus_path()
    sentences, issues = validate_corpus(corpus_file)
    if issues:
        for issue in issues:
            click.echo(f"{corpus_file}: {issue}", err=True)
        sys.exit(2)

    backends = []
    for backend_id in backend_ids:
        if backend_id not in registry:
            click.echo(f"unknown backend id: {backend_id}", err=True)
            sys.exit(2)
        handle = registry.resolve(backend_id)
        backends.append((handle, handle.descriptor.default_model))

    # With only deterministic local backends the run is reproducible down to
    # the byte; wall-clock timing would break that for no benefit.
    deterministic = all(
        handle.descriptor.kind is TransportKind.ORACLE for handle, _ in backends
    )
    clock = (lambda: 0.0) if deterministic else None

    kwargs = {"clock": clock} if clock is not None else {}
    report = run_benchmark(sentences, backends, repetitions=reps, **kwargs)
    written = write_benchmark_csvs(report, out_dir)

    click.echo(f"corpus: {corpus_file} ({report.corpus_size} sentences, reps={reps})")
    for backend in report.backends:
        line = (
            f"{backend.backend_id}/{backend.model_name}: "
            f"tp={backend.counts.tp} fp={backend.counts.fp} "
            f"tn={backend.counts.tn} fn={backend.counts.fn} "
            f"precision={backend.metrics.precision:.3f} "
            f"recall={backend.metrics.recall:.3f} f1={backend.metrics.f1:.3f}"
        )
        if backend.latency is not None:
            line += (
                f" latency mean={backend.latency.mean_ms:.1f}ms"
                f" p50={backend.latency.p50_ms:.1f}ms"
            )
        if backend.failures:
            line += f" failures={backend.failures}"
        click.echo(line)
    for path in written:
        click.echo(f"wrote {path}")


@main.command("corpus-check")
@click.argument("corpus_path", type=click.Path(path_type=Path))
def corpus_check(corpus_path: Path) -> None:
    """Validate a corpus file and summarize its labels."""
    sentences, issues = validate_corpus(corpus_path)
    if issues:
        for issue in issues:
            click.echo(f"{corpus_path}: {issue}", err=True)
        sys.exit(2)
    with_errors = sum(1 for s in sentences if s.gold_has_error)
    click.echo(
        f"{corpus_path}: {len(sentences)} sentences, "
        f"{with_errors} labelled with errors, {len(sentences) - with_errors} clean"
    )


if __name__ == "__main__":
    main()
