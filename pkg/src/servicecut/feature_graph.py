"""Weighted program feature graphs: method-level construction, class-level
lifting, performance-attribute attachment, fusion, and the symmetric affinity
matrix fed to the clusterer."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .cost_model import SizeModel, edge_cost
from .records import CallRecord, PerfRecord, TypeCatalog

log = logging.getLogger(__name__)

METHOD = "method"
CLASS = "class"


@dataclass
class FeatureGraph:
    """Directed weighted graph over methods or classes.

    Vertices are kept sorted so downstream matrices are reproducible. Absent
    edge pairs mean weight zero; self-loops are never stored.
    """

    vertices: list[str]
    edges: dict[tuple[str, str], float]
    granularity: str
    vertex_attrs: dict[str, tuple[float, float]] | None = None
    self_calls_dropped: int = 0

    def __post_init__(self):
        self.vertices = sorted(self.vertices)
        for (i, j), w in self.edges.items():
            if i == j:
                raise ValueError(f"self-loop on {i!r}")
            if w <= 0:
                raise ValueError(f"non-positive weight on ({i!r}, {j!r})")

    def weight(self, i: str, j: str) -> float:
        return self.edges.get((i, j), 0.0)

    def total_weight(self) -> float:
        return sum(self.edges.values())

    def out_class(self, vertex: str) -> str:
        return vertex.split("::", 1)[0]

    def isolated_vertices(self) -> set[str]:
        touched = {v for e in self.edges for v in e}
        return set(self.vertices) - touched

    def without_vertices(self, drop: set[str]) -> "FeatureGraph":
        keep = [v for v in self.vertices if v not in drop]
        edges = {e: w for e, w in self.edges.items() if e[0] not in drop and e[1] not in drop}
        attrs = None
        if self.vertex_attrs is not None:
            attrs = {v: a for v, a in self.vertex_attrs.items() if v not in drop}
        return FeatureGraph(keep, edges, self.granularity, attrs, self.self_calls_dropped)


@dataclass
class AffinityMatrix:
    """Dense symmetric non-negative matrix with zero diagonal, rows aligned
    to ``vertex_ids``."""

    entries: np.ndarray
    vertex_ids: list[str]

    def __post_init__(self):
        W = np.asarray(self.entries, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("affinity matrix must be square")
        if W.shape[0] != len(self.vertex_ids):
            raise ValueError("vertex_ids length must match matrix dimension")
        if not np.allclose(W, W.T):
            raise ValueError("affinity matrix must be symmetric")
        if np.any(W < 0):
            raise ValueError("affinity matrix must be non-negative")
        if np.any(np.diag(W) != 0):
            raise ValueError("affinity matrix must have zero diagonal")
        self.entries = W

    @property
    def n(self) -> int:
        return len(self.vertex_ids)


def build_method_graph(records: list[CallRecord], catalog: TypeCatalog,
                       model: SizeModel | None = None) -> FeatureGraph:
    """Build the method-level digraph. Repeated (caller, callee) pairs
    accumulate by weight summation; self-calls are dropped with a warning."""
    model = model or SizeModel()
    vertices: set[str] = set()
    edges: dict[tuple[str, str], float] = {}
    dropped = 0
    for r in records:
        vertices.add(r.caller)
        vertices.add(r.callee)
        if r.is_self_call:
            dropped += 1
            continue
        key = (r.caller, r.callee)
        edges[key] = edges.get(key, 0.0) + edge_cost(r.callee_params, catalog, model)
    if dropped:
        log.warning("dropped %d self-call record(s)", dropped)
    return FeatureGraph(sorted(vertices), edges, METHOD, self_calls_dropped=dropped)


def lift_to_classes(g: FeatureGraph) -> FeatureGraph:
    """Aggregate method-level weights to class level, discarding intra-class
    edges. Classes with only intra-class calls become isolated vertices."""
    if g.granularity != METHOD:
        raise ValueError("lift_to_classes expects a method-level graph")
    classes = {g.out_class(v) for v in g.vertices}
    edges: dict[tuple[str, str], float] = {}
    for (src, dst), w in g.edges.items():
        ci, cj = g.out_class(src), g.out_class(dst)
        if ci == cj:
            continue
        edges[(ci, cj)] = edges.get((ci, cj), 0.0) + w
    return FeatureGraph(sorted(classes), edges, CLASS, self_calls_dropped=g.self_calls_dropped)


def attach_perf(g: FeatureGraph, perf: list[PerfRecord], normalize: bool = True) -> FeatureGraph:
    """Attach (cpu_time, retained_bytes) attributes to every class vertex.

    Missing classes get (0, 0). With ``normalize`` (the default) each
    attribute is divided by its maximum over all classes so both lie in
    [0, 1]; an all-zero attribute stays all-zero.
    """
    if g.granularity != CLASS:
        raise ValueError("attach_perf expects a class-level graph")
    known = set(g.vertices)
    by_class = {}
    for r in perf:
        if r.class_id not in known:
            log.warning("perf record for %r has no call-graph vertex; ignored", r.class_id)
            continue
        by_class[r.class_id] = (r.cpu_time, r.retained_bytes)
    t_max = max((t for t, _ in by_class.values()), default=0.0)
    r_max = max((r for _, r in by_class.values()), default=0.0)
    attrs = {}
    for v in g.vertices:
        t, r = by_class.get(v, (0.0, 0.0))
        if normalize:
            t = t / t_max if t_max > 0 else 0.0
            r = r / r_max if r_max > 0 else 0.0
        attrs[v] = (t, r)
    return replace(g, vertex_attrs=attrs)


def fuse(g: FeatureGraph) -> FeatureGraph:
    """Reweight each directed edge (i -> j) by the callee factor
    (t_j + r_j + 1). Edge set and vertex set are unchanged."""
    if g.vertex_attrs is None:
        raise ValueError("fuse requires vertex attributes; call attach_perf first")
    edges = {}
    for (i, j), w in g.edges.items():
        t, r = g.vertex_attrs[j]
        edges[(i, j)] = w * (t + r + 1.0)
    return replace(g, edges=edges)


def unit_structure(g: FeatureGraph) -> FeatureGraph:
    """Replace every edge weight with 1, keeping the edge set. Used by the
    dynamic-only mode so fused weights carry only performance signal."""
    return replace(g, edges={e: 1.0 for e in g.edges})


def to_affinity(g: FeatureGraph) -> AffinityMatrix:
    """Symmetrize by directional sum: W[i][j] = w(i->j) + w(j->i)."""
    if g.granularity != CLASS:
        raise ValueError("to_affinity expects a class-level graph")
    ids = list(g.vertices)
    index = {v: i for i, v in enumerate(ids)}
    W = np.zeros((len(ids), len(ids)))
    for (src, dst), w in g.edges.items():
        i, j = index[src], index[dst]
        W[i, j] += w
        W[j, i] += w
    return AffinityMatrix(W, ids)


# --- export helpers ---------------------------------------------------------


def write_edge_list(g: FeatureGraph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "weight"])
        for (src, dst) in sorted(g.edges):
            writer.writerow([src, dst, repr(g.edges[(src, dst)])])


def graph_to_json(g: FeatureGraph) -> dict:
    doc = {
        "granularity": g.granularity,
        "vertices": list(g.vertices),
        "edges": [
            {"src": src, "dst": dst, "weight": g.edges[(src, dst)]}
            for (src, dst) in sorted(g.edges)
        ],
    }
    if g.vertex_attrs is not None:
        doc["vertex_attrs"] = {
            v: {"cpu_time": t, "retained": r} for v, (t, r) in sorted(g.vertex_attrs.items())
        }
    return doc


def write_graph_json(g: FeatureGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph_to_json(g), indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def write_affinity_csv(W: AffinityMatrix, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + W.vertex_ids)
        for vid, row in zip(W.vertex_ids, W.entries):
            writer.writerow([vid] + [repr(x) for x in row])
