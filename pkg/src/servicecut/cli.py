"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click

from . import feature_graph as fg
from .cost_model import SizeModel
from .metrics import report_to_json_str
from .oracle import brute_force_best
from .pipeline import (
    DEFAULT_MODES,
    MODES,
    PipelineInputs,
    build_mode_graph,
    run_pipeline,
    sweep,
    write_sweep_outputs,
)
from .records import LogParseError
from .spectral import NumericError
from .synth import SynthSpec, synth_generate

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_SIZE_MODEL_FIELDS = {f.name for f in dataclasses.fields(SizeModel)}


def _parse_size_model(pairs: tuple[str, ...]) -> SizeModel:
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.UsageError(f"--size-model expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        if key not in _SIZE_MODEL_FIELDS:
            raise click.UsageError(
                f"unknown size-model field {key!r}; choose from {sorted(_SIZE_MODEL_FIELDS)}"
            )
        overrides[key] = int(value)
    return SizeModel(**overrides)


def _common_options(fn):
    fn = click.option("--calls", "calls_path", required=True,
                      type=click.Path(dir_okay=False), help="Call log CSV.")(fn)
    fn = click.option("--perf", "perf_path", default=None,
                      type=click.Path(dir_okay=False), help="Perf log CSV.")(fn)
    fn = click.option("--type-catalog", "catalog_path", default=None,
                      type=click.Path(dir_okay=False),
                      help="Type catalog file; omit for primitives only.")(fn)
    fn = click.option("--size-model", "size_model", multiple=True, metavar="KEY=VALUE",
                      help="Override cost-model fields, e.g. --size-model ref_slot=8.")(fn)
    fn = click.option("--raw-attrs", is_flag=True,
                      help="Use raw cpu/retained values instead of [0,1] normalization.")(fn)
    return fn


@click.group()
def cli():
    """Extract microservice candidates from call and performance logs."""


@cli.command("ingest-check")
@_common_options
def ingest_check(calls_path, perf_path, catalog_path, size_model, raw_attrs):
    """Parse inputs and report counts; fail loudly on malformed data."""
    inputs = PipelineInputs.load(calls_path, perf_path, catalog_path)
    self_calls = sum(1 for r in inputs.calls if r.is_self_call)
    classes = {r.caller_class for r in inputs.calls} | {r.callee_class for r in inputs.calls}
    click.echo(f"call records: {len(inputs.calls)} ({self_calls} self-call)")
    click.echo(f"perf records: {len(inputs.perf)}")
    click.echo(f"classes:      {len(classes)}")
    click.echo(f"types:        {len(inputs.catalog.layouts)}")


@cli.command("build-graph")
@_common_options
@click.option("--mode", type=click.Choice(MODES), default="fusion", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def build_graph(calls_path, perf_path, catalog_path, size_model, raw_attrs, mode, out_dir):
    """Build the class-level feature graph and export it."""
    inputs = PipelineInputs.load(calls_path, perf_path, catalog_path)
    model = _parse_size_model(size_model)
    _, weighted = build_mode_graph(
        inputs.calls, inputs.perf, inputs.catalog, mode, model, not raw_attrs
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fg.write_edge_list(weighted, out / "graph_edges.csv")
    fg.write_graph_json(weighted, out / "graph.json")
    core = weighted.without_vertices(weighted.isolated_vertices())
    if core.vertices:
        fg.write_affinity_csv(fg.to_affinity(core), out / "affinity.csv")
    click.echo(f"wrote graph exports to {out}")


def _run_and_write(inputs, mode, k, seed, model, normalize, out_dir, fmt):
    partition, report = run_pipeline(inputs, mode, k, seed, model, normalize)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "partition.json").write_text(
        json.dumps(partition.to_json(seed=seed), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    if fmt == "csv":
        (out / "report.csv").write_text(
            report.csv_header() + "\n" + report.to_csv_row() + "\n", encoding="utf-8"
        )
    else:
        (out / "report.json").write_text(report_to_json_str(report), encoding="utf-8")
    return partition, report


@cli.command("cluster")
@_common_options
@click.option("--mode", type=click.Choice(MODES), default="fusion", show_default=True)
@click.option("--k", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def cluster(calls_path, perf_path, catalog_path, size_model, raw_attrs, mode, k, seed, out_dir):
    """Extract k microservice candidates and write the partition."""
    inputs = PipelineInputs.load(calls_path, perf_path, catalog_path)
    partition, _ = _run_and_write(
        inputs, mode, k, seed, _parse_size_model(size_model), not raw_attrs, out_dir, "json"
    )
    for i, members in enumerate(partition.candidates()):
        click.echo(f"candidate {i}: {', '.join(members)}")
    if partition.unassigned:
        click.echo(f"unassigned: {', '.join(sorted(partition.unassigned))}")


@cli.command("evaluate")
@_common_options
@click.option("--mode", type=click.Choice(MODES), default="fusion", show_default=True)
@click.option("--k", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
def evaluate(calls_path, perf_path, catalog_path, size_model, raw_attrs,
             mode, k, seed, out_dir, fmt):
    """Cluster and score: writes partition plus a quality report."""
    inputs = PipelineInputs.load(calls_path, perf_path, catalog_path)
    _, report = _run_and_write(
        inputs, mode, k, seed, _parse_size_model(size_model), not raw_attrs, out_dir, fmt
    )
    click.echo(f"MQ={report.mq:.4f} MQw={report.mqw:.4f} cut={report.cut:.2f}")


@cli.command("sweep")
@_common_options
@click.option("--modes", default=",".join(DEFAULT_MODES), show_default=True,
              help="Comma-separated subset of static,fusion,dynamic.")
@click.option("--k-min", type=int, default=2, show_default=True)
@click.option("--k-max", type=int, default=10, show_default=True)
@click.option("--epochs", type=int, default=100, show_default=True)
@click.option("--seed", "base_seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def sweep_cmd(calls_path, perf_path, catalog_path, size_model, raw_attrs,
              modes, k_min, k_max, epochs, base_seed, out_dir):
    """Run the k-sweep / epoch / median protocol and write sweep tables."""
    mode_list = tuple(m.strip() for m in modes.split(",") if m.strip())
    for m in mode_list:
        if m not in MODES:
            raise click.UsageError(f"unknown mode {m!r}")
    inputs = PipelineInputs.load(calls_path, perf_path, catalog_path)
    result = sweep(inputs, mode_list, k_min, k_max, epochs, base_seed,
                   _parse_size_model(size_model), not raw_attrs)
    write_sweep_outputs(result, out_dir)
    for mode, k in sorted(result.best_k.items()):
        click.echo(f"{mode}: best k = {k} (median MQw {result.medians[(mode, k)]:.4f})")


@cli.command("synth")
@click.option("--n-classes", type=int, required=True)
@click.option("--n-blocks", type=int, required=True)
@click.option("--intra", "intra_call_prob", type=float, default=0.3, show_default=True)
@click.option("--inter", "inter_call_prob", type=float, default=0.02, show_default=True)
@click.option("--block-correlated-perf", is_flag=True,
              help="Make perf attributes correlate with the planted blocks.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def synth(n_classes, n_blocks, intra_call_prob, inter_call_prob,
          block_correlated_perf, seed, out_dir):
    """Generate a synthetic legacy system with a planted block structure."""
    spec = SynthSpec(
        n_classes=n_classes,
        n_blocks=n_blocks,
        intra_call_prob=intra_call_prob,
        inter_call_prob=inter_call_prob,
        block_correlated_perf=block_correlated_perf,
        seed=seed,
    )
    calls_path, perf_path, truth_path = synth_generate(spec, out_dir)
    click.echo(f"wrote {calls_path}, {perf_path}, {truth_path}")


@cli.command("oracle")
@_common_options
@click.option("--mode", type=click.Choice(MODES), default="static", show_default=True)
@click.option("--k", type=int, required=True)
@click.option("--objective", type=click.Choice(["mqw", "cut"]), default="mqw",
              show_default=True)
def oracle_cmd(calls_path, perf_path, catalog_path, size_model, raw_attrs,
               mode, k, objective):
    """Exhaustive best partition of a small system (<= 10 classes)."""
    inputs = PipelineInputs.load(calls_path, perf_path, catalog_path)
    _, weighted = build_mode_graph(
        inputs.calls, inputs.perf, inputs.catalog, mode,
        _parse_size_model(size_model), not raw_attrs,
    )
    partition, value = brute_force_best(weighted, k, objective)
    click.echo(json.dumps({"objective": objective, "value": value,
                           **partition.to_json()}, sort_keys=True))


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, prog_name="servicecut", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except (LogParseError, OSError) as exc:
        click.echo(f"data error: {exc}", err=True)
        return EXIT_DATA
    except ValueError as exc:
        click.echo(f"data error: {exc}", err=True)
        return EXIT_DATA
    except NumericError as exc:
        click.echo(f"numeric failure: {exc}", err=True)
        return EXIT_NUMERIC
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
