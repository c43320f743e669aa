"""Unsupervised comparison methods: equal split, kmeans, FINCH."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalError, KTooLargeError, KUnreachableError
from .hierarchy import build_hierarchy
from .refine import refine_to_k, select_level
from .types import FeatureSequence, Partition, PartitionHierarchy, relabel_dense


@dataclass(frozen=True)
class KmeansConfig:
    k: int
    max_iters: int = 100
    seed: int = 0
    restarts: int = 10

    def __post_init__(self):
        if self.k < 1 or self.max_iters < 1 or self.restarts < 1:
            raise ValueError("k, max_iters and restarts must all be >= 1")


def equal_split(n: int, k: int) -> Partition:
    """Split n frames into k contiguous blocks, longer blocks first."""
    if k > n:
        raise KTooLargeError(f"cannot split {n} frames into {k} blocks")
    if k < 1:
        raise ValueError("k must be >= 1")
    q, r = divmod(n, k)
    sizes = np.full(k, q, dtype=np.int64)
    sizes[:r] += 1
    return Partition(np.repeat(np.arange(k), sizes))


def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]), dtype=np.float64)
    centers[0] = x[rng.integers(n)]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total > 0.0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centers[i] = x[idx]
        d2 = np.minimum(d2, np.sum((x - centers[i]) ** 2, axis=1))
    return centers


def _assign(x: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Squared Euclidean via expansion; x term dropped for the argmin,
    # added back for the objective.
    cross = x @ centers.T
    c2 = np.sum(centers**2, axis=1)
    partial = c2[None, :] - 2.0 * cross
    labels = np.argmin(partial, axis=1)
    d2 = partial[np.arange(x.shape[0]), labels] + np.sum(x**2, axis=1)
    return labels, np.maximum(d2, 0.0)


def _lloyd(x: np.ndarray, k: int, max_iters: int, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    n = x.shape[0]
    centers = _kmeans_pp_init(x, k, rng)
    labels, d2 = _assign(x, centers)
    prev_obj = float(d2.sum())
    for _ in range(max_iters):
        for c in range(k):
            members = labels == c
            if members.any():
                centers[c] = x[members].mean(axis=0)
            else:
                centers[c] = x[np.argmax(d2)]  # re-seed to the farthest point
                d2[np.argmax(d2)] = 0.0
        new_labels, d2 = _assign(x, centers)
        obj = float(d2.sum())
        if obj > prev_obj * (1.0 + 1e-9) + 1e-12:
            raise InternalError(f"kmeans objective increased: {prev_obj} -> {obj}")
        converged = np.array_equal(new_labels, labels) and obj >= prev_obj - 1e-12
        labels, prev_obj = new_labels, obj
        if converged:
            break
    return labels, prev_obj


def kmeans(seq: FeatureSequence, cfg: KmeansConfig) -> Partition:
    """Best-of-restarts Lloyd iterations from kmeans++ seeds.

    Deterministic given ``cfg.seed``; restarts are ranked by within-cluster
    sum of squares with ties going to the earlier restart.
    """
    if cfg.k > seq.n:
        raise KTooLargeError(f"k={cfg.k} exceeds {seq.n} frames")
    x = seq.frames.astype(np.float64)
    best_labels, best_obj = None, np.inf
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        labels, obj = _lloyd(x, cfg.k, cfg.max_iters, rng)
        if obj < best_obj:
            best_labels, best_obj = labels, obj
    return relabel_dense(best_labels)


def finch(seq: FeatureSequence, k: int, *, temporal: bool = False,
          shared_neighbor_links: bool = True) -> tuple[PartitionHierarchy, Partition]:
    """Hierarchical first-neighbor clustering without temporal weighting.

    Identical machinery to the temporally-weighted pipeline with the time
    factor switched off. The original first-neighbor relation also links
    nodes that share a nearest neighbor, but such nodes are already connected
    through that neighbor, so the connected components (and therefore every
    partition) are unchanged; the ``shared_neighbor_links`` toggle is kept
    for explicit configuration-equivalence testing.

    With ``temporal=True`` and ``shared_neighbor_links=False`` this
    reproduces the temporally-weighted pipeline exactly.
    """
    del shared_neighbor_links  # no effect on components; see docstring
    h = build_hierarchy(seq, temporal=temporal)
    try:
        level = select_level(h, k)
    except KUnreachableError:
        return h, h.finest
    p, _ = refine_to_k(seq, level, k, temporal=temporal)
    return h, p


def first_neighbor_edges(nn: np.ndarray) -> frozenset[tuple[int, int]]:
    """The full original first-neighbor adjacency, shared-neighbor links included.

    Links (i, j) whenever j = nn(i), nn(j) = i, or nn(i) = nn(j). Exposed for
    tests documenting that the shared-neighbor links never change the
    connected components.
    """
    edges = set()
    by_target: dict[int, list[int]] = {}
    for i in range(nn.shape[0]):
        j = int(nn[i])
        edges.add((i, j))
        edges.add((j, i))
        by_target.setdefault(j, []).append(i)
    for group in by_target.values():
        for a_pos, a in enumerate(group):
            for b in group[a_pos + 1:]:
                edges.add((a, b))
                edges.add((b, a))
    return frozenset(edges)
