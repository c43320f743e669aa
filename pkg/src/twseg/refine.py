"""Level selection and one-merge-at-a-time refinement down to K clusters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import graph
from .errors import KTooLargeError, KUnreachableError
from .hierarchy import build_hierarchy, summarize
from .types import FeatureSequence, Partition, PartitionHierarchy, relabel_dense


@dataclass(frozen=True)
class RefinementTrace:
    """Audit trail of the pairwise merges performed by ``refine_to_k``.

    Each record is ``(cluster_a, cluster_b, w_value)`` in the labeling that
    was current at that step, with ``cluster_a < cluster_b``.
    """

    start_level_clusters: int
    merges: tuple[tuple[int, int, float], ...] = ()


@dataclass(frozen=True)
class SegmentationResult:
    """Final partition plus provenance; ``fallback`` flags a K that was
    unreachable (the finest available partition is returned instead)."""

    partition: Partition
    requested_k: int
    fallback: bool
    hierarchy: PartitionHierarchy
    trace: RefinementTrace | None = None

    @property
    def k(self) -> int:
        return self.partition.num_clusters


def select_level(h: PartitionHierarchy, k: int) -> Partition:
    """The hierarchy partition with the smallest cluster count >= k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    for p in reversed(h.partitions):  # counts strictly decrease, coarsest last
        if p.num_clusters >= k:
            return p
    raise KUnreachableError(h.partitions[0].num_clusters)


def _min_link(summary, n_total: int, temporal: bool) -> tuple[int, int, float]:
    """The symmetric 1-NN link with globally minimal weighted distance.

    The global minimum over all pairs is always attained on a 1-NN link, so
    the row minima of the link weights suffice. Ties break lexicographically
    on the (low id, high id) pair.
    """
    nn, link_w = graph.nearest_neighbor_links(
        summary.means, summary.mean_times, n_total, temporal=temporal
    )
    wmin = link_w.min()
    pairs = {
        (min(i, int(nn[i])), max(i, int(nn[i])))
        for i in np.flatnonzero(link_w == wmin)
    }
    a, b = min(pairs)
    return a, b, float(wmin)


def refine_to_k(seq: FeatureSequence, p: Partition, k: int, *,
                temporal: bool = True) -> tuple[Partition, RefinementTrace]:
    """Merge two clusters at a time until exactly ``k`` remain.

    Each step re-summarizes from the original frames, rebuilds the weighted
    1-NN graph over cluster means, and merges the single symmetric link with
    minimal weighted distance.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > p.num_clusters:
        raise KTooLargeError(f"k={k} exceeds the {p.num_clusters} available clusters")

    merges: list[tuple[int, int, float]] = []
    start = p.num_clusters
    for _ in range(start - k):
        summary = summarize(seq, p)
        a, b, w = _min_link(summary, seq.n, temporal)
        merged = p.labels.copy()
        merged[merged == b] = a
        p = relabel_dense(merged)
        merges.append((a, b, w))
    return p, RefinementTrace(start, tuple(merges))


def segment(seq: FeatureSequence, k: int, *, temporal: bool = True) -> SegmentationResult:
    """Full pipeline: hierarchy, level selection, refinement to ``k``.

    If no level has at least ``k`` clusters the finest partition is returned
    with ``fallback=True`` instead of aborting, so batch runs survive
    degenerate videos.
    """
    h = build_hierarchy(seq, temporal=temporal)
    try:
        level = select_level(h, k)
    except KUnreachableError:
        return SegmentationResult(h.finest, k, True, h)
    p, trace = refine_to_k(seq, level, k, temporal=temporal)
    return SegmentationResult(p, k, False, h, trace)
