"""Partition quality: cohesion/coupling, modularity quality for unweighted
(MQ) and weighted (MQw) graphs, and the raw multiway cut value.

Conventions: edges are directed and self-loop free; sigma for a cluster pair
aggregates both directions, matching the 2 * N_i * N_j denominator; with a
single cluster the coupling term is vacuous and MQ equals mean cohesion.
Unassigned (isolated) vertices are excluded from scoring.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .feature_graph import AffinityMatrix, FeatureGraph
from .spectral import Partition


@dataclass
class QualityReport:
    coh: list[float]            # per-cluster cohesion, unweighted
    cop: dict[tuple[int, int], float]
    mq: float
    coh_w: list[float]          # per-cluster cohesion, weighted
    cop_w: dict[tuple[int, int], float]
    mqw: float
    cut: float
    k: int
    mode: str

    @property
    def mean_coh_w(self) -> float:
        return sum(self.coh_w) / len(self.coh_w)

    @property
    def mean_cop_w(self) -> float:
        return sum(self.cop_w.values()) / len(self.cop_w) if self.cop_w else 0.0

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "mode": self.mode,
            "coh": self.coh,
            "cop": {f"{i},{j}": v for (i, j), v in sorted(self.cop.items())},
            "MQ": self.mq,
            "coh_w": self.coh_w,
            "cop_w": {f"{i},{j}": v for (i, j), v in sorted(self.cop_w.items())},
            "MQw": self.mqw,
            "cut": self.cut,
        }

    def to_csv_row(self) -> str:
        return ",".join(
            [self.mode, str(self.k)]
            + [repr(x) for x in (self.mean_coh_w, self.mean_cop_w, self.mqw, self.mq, self.cut)]
        )

    @staticmethod
    def csv_header() -> str:
        return "mode,k,coh_w,cop_w,MQw,MQ,cut"


def _cluster_stats(p: Partition, g: FeatureGraph):
    """Per-cluster sizes, intra edge counts/weights, and pairwise inter
    counts/weights (both directions aggregated)."""
    vertex_set = set(g.vertices)
    members: dict[str, int] = {}
    for v, c in p.labels.items():
        if v not in vertex_set:
            raise ValueError(f"partition references vertex {v!r} absent from graph")
        members[v] = c
    scored = set(members)
    sizes = [0] * p.k
    for v, c in members.items():
        sizes[c] += 1
    u = [0] * p.k
    uw = [0.0] * p.k
    sigma: dict[tuple[int, int], int] = {}
    sigmaw: dict[tuple[int, int], float] = {}
    for (src, dst), w in g.edges.items():
        if src not in scored or dst not in scored:
            continue
        ci, cj = members[src], members[dst]
        if ci == cj:
            u[ci] += 1
            uw[ci] += w
        else:
            pair = (min(ci, cj), max(ci, cj))
            sigma[pair] = sigma.get(pair, 0) + 1
            sigmaw[pair] = sigmaw.get(pair, 0.0) + w
    return sizes, u, uw, sigma, sigmaw


def mq(p: Partition, g: FeatureGraph) -> tuple[list[float], dict[tuple[int, int], float], float]:
    """Unweighted modularity quality: mean cohesion minus mean pairwise
    coupling. coh_i = u_i / N_i^2, cop_ij = sigma_ij / (2 N_i N_j)."""
    sizes, u, _, sigma, _ = _cluster_stats(p, g)
    coh = [u[i] / sizes[i] ** 2 for i in range(p.k)]
    cop = {
        (i, j): sigma.get((i, j), 0) / (2 * sizes[i] * sizes[j])
        for i, j in combinations(range(p.k), 2)
    }
    value = sum(coh) / p.k
    if p.k > 1:
        value -= sum(cop.values()) / (p.k * (p.k - 1) / 2)
    return coh, cop, value


def mqw(p: Partition, g: FeatureGraph) -> tuple[list[float], dict[tuple[int, int], float], float]:
    """Weighted modularity quality; collapses exactly to MQ on unit weights.

    coh'_i = u'_i / (N_i^2 + u'_i - u_i)
    cop'_ij = sigma'_ij / (2 N_i N_j + sigma'_ij - sigma_ij)
    """
    sizes, u, uw, sigma, sigmaw = _cluster_stats(p, g)
    coh = []
    for i in range(p.k):
        denom = sizes[i] ** 2 + uw[i] - u[i]
        # ratios are within [0, 1] by construction; clamp float roundoff
        coh.append(min(1.0, uw[i] / denom) if denom > 0 else 0.0)
    cop = {}
    for i, j in combinations(range(p.k), 2):
        s, sw = sigma.get((i, j), 0), sigmaw.get((i, j), 0.0)
        denom = 2 * sizes[i] * sizes[j] + sw - s
        cop[(i, j)] = min(1.0, sw / denom) if denom > 0 else 0.0
    value = sum(coh) / p.k
    if p.k > 1:
        value -= sum(cop.values()) / (p.k * (p.k - 1) / 2)
    return coh, cop, value


def cut_value(p: Partition, W: AffinityMatrix) -> float:
    """Half the total affinity crossing cluster boundaries."""
    total = 0.0
    idx = {v: i for i, v in enumerate(W.vertex_ids)}
    items = [(v, c) for v, c in p.labels.items() if v in idx]
    for (vi, ci), (vj, cj) in combinations(items, 2):
        if ci != cj:
            total += W.entries[idx[vi], idx[vj]]
    return total


def score(p: Partition, structure: FeatureGraph, weighted: FeatureGraph,
          W: AffinityMatrix, mode: str) -> QualityReport:
    """Assemble a full QualityReport: counts from the structural graph,
    weighted terms from the mode's weighted graph, cut from the affinity."""
    coh, cop, mq_value = mq(p, structure)
    coh_w, cop_w, mqw_value = mqw(p, weighted)
    return QualityReport(
        coh=coh, cop=cop, mq=mq_value,
        coh_w=coh_w, cop_w=cop_w, mqw=mqw_value,
        cut=cut_value(p, W), k=p.k, mode=mode,
    )


def report_to_json_str(report: QualityReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
