"""Spectral relaxation of the multiway min-cut: unnormalized Laplacian,
smallest-k eigenvector embedding, seeded k-means on the embedded rows."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .feature_graph import AffinityMatrix


class NumericError(RuntimeError):
    """Eigensolver or clustering failure."""


@dataclass
class Laplacian:
    """L = D - W with D the diagonal degree matrix of W."""

    matrix: np.ndarray
    source: AffinityMatrix

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass
class Embedding:
    """Columns of U are eigenvectors of the k smallest eigenvalues of L,
    ascending; the rows are the points handed to k-means."""

    U: np.ndarray
    eigenvalues: np.ndarray


@dataclass
class Partition:
    """Assignment of every non-isolated class vertex to one of K candidates."""

    labels: dict[str, int]
    k: int
    unassigned: set[str] = field(default_factory=set)

    def __post_init__(self):
        used = set(self.labels.values())
        if used and used != set(range(self.k)):
            raise ValueError("every candidate index in [0, K) must be non-empty")

    def candidates(self) -> list[list[str]]:
        groups: list[list[str]] = [[] for _ in range(self.k)]
        for v in sorted(self.labels):
            groups[self.labels[v]].append(v)
        return groups

    def to_json(self, seed: int | None = None) -> dict:
        doc = {
            "k": self.k,
            "candidates": self.candidates(),
            "unassigned": sorted(self.unassigned),
        }
        if seed is not None:
            doc["seed"] = seed
        return doc


def build_laplacian(W: AffinityMatrix) -> Laplacian:
    if W.n == 0:
        raise ValueError("empty graph")
    L = np.diag(W.entries.sum(axis=1)) - W.entries
    return Laplacian(L, W)


def full_spectrum(L: Laplacian) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition, ascending; computed once per graph so k
    sweeps can slice instead of re-solving."""
    try:
        return np.linalg.eigh(L.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc


def embedding_from_spectrum(eigenvalues: np.ndarray, vectors: np.ndarray, k: int) -> Embedding:
    U = vectors[:, :k].copy()
    for col in range(k):
        v = U[:, col]
        nonzero = np.flatnonzero(np.abs(v) > 1e-12 * max(1.0, np.abs(v).max()))
        if nonzero.size and v[nonzero[0]] < 0:
            U[:, col] = -v
    return Embedding(U, eigenvalues[:k].copy())


def embed(L: Laplacian, k: int) -> Embedding:
    """Eigenpairs of the k smallest eigenvalues, ascending, with a
    deterministic sign convention (first nonzero coordinate positive)."""
    n = L.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    eigenvalues, vectors = full_spectrum(L)
    emb = embedding_from_spectrum(eigenvalues, vectors, k)
    _check_residuals(L, emb)
    return emb


def _check_residuals(L: Laplacian, emb: Embedding, tol: float = 1e-6) -> None:
    scale = max(1.0, float(np.abs(L.matrix).max()))
    for i in range(emb.U.shape[1]):
        u = emb.U[:, i]
        residual = np.linalg.norm(L.matrix @ u - emb.eigenvalues[i] * u)
        if residual > tol * scale:
            raise NumericError(f"eigenpair {i} residual {residual:.3e} exceeds tolerance")


def kmeans(points: np.ndarray, k: int, seed: int, n_restarts: int = 10,
           max_iter: int = 300) -> np.ndarray:
    """Lloyd's algorithm with distance-weighted seeding, deterministic given
    the seed. Keeps the best of ``n_restarts`` runs by inertia; runs that
    collapse to an empty cluster are retried (bounded)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if np.unique(pts, axis=0).shape[0] < k:
        raise ValueError("k exceeds distinct embedded points")
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    attempts = 0
    runs = 0
    while runs < n_restarts and attempts < 4 * n_restarts:
        attempts += 1
        labels, inertia = _lloyd_once(pts, k, rng, max_iter)
        if labels is None:
            continue  # empty-cluster collapse; retry with fresh init
        runs += 1
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    if best_labels is None:
        raise NumericError("k-means failed to produce k non-empty clusters")
    return best_labels


def _kmeanspp_init(pts: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = pts.shape[0]
    centers = np.empty((k, pts.shape[1]))
    centers[0] = pts[rng.integers(n)]
    d2 = ((pts - centers[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            # all remaining points coincide with chosen centers; pick any
            # point distinct from them (guaranteed by the distinct-count check)
            taken = {tuple(c) for c in centers[:i]}
            idx = next(j for j in range(n) if tuple(pts[j]) not in taken)
        centers[i] = pts[idx]
        d2 = np.minimum(d2, ((pts - centers[i]) ** 2).sum(axis=1))
    return centers


def _lloyd_once(pts, k, rng, max_iter):
    centers = _kmeanspp_init(pts, k, rng)
    labels = None
    for _ in range(max_iter):
        dists = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = dists.argmin(axis=1)
        if np.unique(new_labels).size < k:
            return None, np.inf
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            centers[c] = pts[labels == c].mean(axis=0)
    inertia = float(((pts - centers[labels]) ** 2).sum())
    return labels, inertia


def extract_candidates(W: AffinityMatrix, k: int, seed: int) -> Partition:
    """End-to-end: Laplacian, smallest-k embedding, k-means, canonical
    relabeling (clusters renumbered by smallest contained vertex id)."""
    if not 2 <= k <= W.n:
        raise ValueError(f"k must be in [2, {W.n}], got {k}")
    emb = embed(build_laplacian(W), k)
    raw = kmeans(emb.U, k, seed)
    labels = dict(zip(W.vertex_ids, (int(c) for c in raw)))
    return canonicalize(labels, k)


def canonicalize(labels: dict[str, int], k: int) -> Partition:
    """Renumber clusters by their smallest contained vertex id so partitions
    compare across runs regardless of k-means label permutation."""
    rep = {}
    for v, c in labels.items():
        if c not in rep or v < rep[c]:
            rep[c] = v
    order = sorted(rep, key=lambda c: rep[c])
    remap = {c: i for i, c in enumerate(order)}
    return Partition({v: remap[c] for v, c in labels.items()}, k)
