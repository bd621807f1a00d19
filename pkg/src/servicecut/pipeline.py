"""End-to-end orchestration: single pipeline runs, the k-sweep / epoch /
median protocol, mode handling (static, fusion, dynamic), and derived epoch
seeding so epochs can run in any order with unchanged results."""

from __future__ import annotations

import hashlib
import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cost_model import SizeModel
from .feature_graph import (
    FeatureGraph,
    attach_perf,
    build_method_graph,
    fuse,
    lift_to_classes,
    to_affinity,
    unit_structure,
)
from .metrics import QualityReport, mqw, score
from .records import (
    CallRecord,
    PerfRecord,
    TypeCatalog,
    parse_call_log,
    parse_perf_log,
    parse_type_catalog,
)
from .spectral import (
    Partition,
    build_laplacian,
    canonicalize,
    embedding_from_spectrum,
    extract_candidates,
    full_spectrum,
    kmeans,
)

MODES = ("static", "fusion", "dynamic")
DEFAULT_MODES = ("static", "fusion")  # dynamic-only is behind a flag


def epoch_seed(base_seed: int, mode: str, k: int, epoch: int) -> int:
    """Derived (not sequential) seeding: stable under reordering and
    parallelism of (mode, k, epoch) triples."""
    digest = hashlib.blake2b(f"{mode}:{k}:{epoch}".encode(), digest_size=8).digest()
    return (base_seed ^ int.from_bytes(digest, "big")) & 0x7FFF_FFFF_FFFF_FFFF


def build_mode_graph(
    calls: list[CallRecord],
    perf: list[PerfRecord],
    catalog: TypeCatalog,
    mode: str,
    model: SizeModel | None = None,
    normalize: bool = True,
) -> tuple[FeatureGraph, FeatureGraph]:
    """Returns (structure, weighted): the plain class-level graph used for
    edge counting, and the mode's weighted graph used for clustering and
    the weighted metric."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    structure = lift_to_classes(build_method_graph(calls, catalog, model))
    if mode == "static":
        return structure, structure
    base = unit_structure(structure) if mode == "dynamic" else structure
    return structure, fuse(attach_perf(base, perf, normalize))


@dataclass
class PipelineInputs:
    calls: list[CallRecord]
    perf: list[PerfRecord]
    catalog: TypeCatalog

    @classmethod
    def load(cls, calls_path, perf_path=None, catalog_path=None) -> "PipelineInputs":
        return cls(
            calls=parse_call_log(calls_path),
            perf=parse_perf_log(perf_path) if perf_path else [],
            catalog=parse_type_catalog(catalog_path),
        )


def run_pipeline(
    inputs: PipelineInputs,
    mode: str,
    k: int,
    seed: int,
    model: SizeModel | None = None,
    normalize: bool = True,
) -> tuple[Partition, QualityReport]:
    structure, weighted = build_mode_graph(
        inputs.calls, inputs.perf, inputs.catalog, mode, model, normalize
    )
    isolated = weighted.isolated_vertices()
    core = weighted.without_vertices(isolated)
    if k > len(core.vertices):
        raise ValueError(
            f"k={k} exceeds the {len(core.vertices)} non-isolated class vertices"
        )
    W = to_affinity(core)
    partition = extract_candidates(W, k, seed)
    partition.unassigned = set(isolated)
    report = score(partition, structure, weighted, W, mode)
    return partition, report


@dataclass
class SweepResult:
    modes: tuple[str, ...]
    k_range: tuple[int, int]
    epochs: int
    base_seed: int
    epoch_values: dict[tuple[str, int], list[float]] = field(default_factory=dict)

    @property
    def medians(self) -> dict[tuple[str, int], float]:
        return {key: statistics.median(v) for key, v in self.epoch_values.items()}

    @property
    def best_k(self) -> dict[str, int]:
        medians = self.medians
        out = {}
        for mode in self.modes:
            ks = range(self.k_range[0], self.k_range[1] + 1)
            out[mode] = max(ks, key=lambda k: (medians[(mode, k)], -k))
        return out

    def to_json(self) -> dict:
        return {
            "modes": list(self.modes),
            "k_min": self.k_range[0],
            "k_max": self.k_range[1],
            "epochs": self.epochs,
            "base_seed": self.base_seed,
            "epoch_values": {
                f"{mode},{k}": values
                for (mode, k), values in sorted(self.epoch_values.items())
            },
            "medians": {f"{mode},{k}": m for (mode, k), m in sorted(self.medians.items())},
            "best_k": self.best_k,
        }

    def to_csv(self) -> str:
        lines = ["mode,k,median_mqw"]
        for (mode, k), m in sorted(self.medians.items()):
            lines.append(f"{mode},{k},{m!r}")
        return "\n".join(lines) + "\n"


def sweep_graph(
    structure: FeatureGraph,
    weighted: FeatureGraph,
    mode: str,
    k_min: int,
    k_max: int,
    epochs: int,
    base_seed: int,
) -> dict[tuple[str, int], list[float]]:
    """Sweep one mode's graph over k. The eigendecomposition happens once;
    each (k, epoch) only re-runs seeded k-means and the metric."""
    isolated = weighted.isolated_vertices()
    core = weighted.without_vertices(isolated)
    n = len(core.vertices)
    if k_max > n:
        raise ValueError(f"k_max={k_max} exceeds the {n} non-isolated class vertices")
    W = to_affinity(core)
    eigenvalues, vectors = full_spectrum(build_laplacian(W))
    out: dict[tuple[str, int], list[float]] = {}
    for k in range(k_min, k_max + 1):
        emb = embedding_from_spectrum(eigenvalues, vectors, k)
        values = []
        for epoch in range(epochs):
            raw = kmeans(emb.U, k, epoch_seed(base_seed, mode, k, epoch))
            partition = canonicalize(dict(zip(W.vertex_ids, (int(c) for c in raw))), k)
            values.append(mqw(partition, core)[2])
        out[(mode, k)] = values
    return out


def sweep(
    inputs: PipelineInputs,
    modes: tuple[str, ...] = DEFAULT_MODES,
    k_min: int = 2,
    k_max: int = 10,
    epochs: int = 100,
    base_seed: int = 0,
    model: SizeModel | None = None,
    normalize: bool = True,
) -> SweepResult:
    result = SweepResult(tuple(modes), (k_min, k_max), epochs, base_seed)
    for mode in modes:
        structure, weighted = build_mode_graph(
            inputs.calls, inputs.perf, inputs.catalog, mode, model, normalize
        )
        result.epoch_values.update(
            sweep_graph(structure, weighted, mode, k_min, k_max, epochs, base_seed)
        )
    return result


def write_sweep_outputs(result: SweepResult, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text(result.to_csv(), encoding="utf-8")
    (out / "sweep.json").write_text(
        json.dumps(result.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def partition_accuracy(pred: dict[str, int], truth: dict[str, int]) -> float:
    """Fraction of vertices correctly assigned under the best matching of
    predicted clusters to ground-truth blocks."""
    keys = sorted(set(pred) & set(truth))
    if not keys:
        return 0.0
    p_ids = sorted({pred[v] for v in keys})
    t_ids = sorted({truth[v] for v in keys})
    confusion = np.zeros((len(p_ids), len(t_ids)))
    p_idx = {c: i for i, c in enumerate(p_ids)}
    t_idx = {c: i for i, c in enumerate(t_ids)}
    for v in keys:
        confusion[p_idx[pred[v]], t_idx[truth[v]]] += 1
    rows, cols = linear_sum_assignment(-confusion)
    return float(confusion[rows, cols].sum()) / len(keys)
