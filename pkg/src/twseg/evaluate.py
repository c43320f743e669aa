"""Segmentation metrics under optimal one-to-one label matching.

Predicted cluster ids are matched to ground-truth labels by maximizing total
frame overlap (Hungarian assignment); all frame metrics are then computed
against that mapping. Background counts as an ordinary label; the background
removal protocol is expressed separately via ``filter_background``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptyInputError, LengthMismatchError
from .types import EvalReport, FeatureSequence, GroundTruth, Partition, _freeze


@dataclass(frozen=True)
class OverlapMatrix:
    """Frame co-occurrence counts between predicted clusters and gt labels."""

    counts: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "counts", _freeze(np.asarray(self.counts, dtype=np.int64)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape


@dataclass(frozen=True)
class Segment:
    """A maximal run of one label: [start, end] inclusive."""

    label: int
    start: int
    end: int

    @property
    def midpoint(self) -> int:
        return (self.start + self.end) // 2

    def __len__(self) -> int:
        return self.end - self.start + 1


def segments_from_labels(labels: np.ndarray) -> list[Segment]:
    """Decompose a label array into its maximal runs."""
    labels = np.asarray(labels)
    if labels.size == 0:
        return []
    boundaries = np.flatnonzero(np.diff(labels)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries - 1, [labels.size - 1]))
    return [Segment(int(labels[s]), int(s), int(e)) for s, e in zip(starts, ends)]


def overlap_matrix(pred: Partition, gt: GroundTruth,
                   num_pred: int | None = None,
                   num_gt: int | None = None) -> OverlapMatrix:
    if pred.n != gt.n:
        raise LengthMismatchError(f"{pred.n} predicted frames vs {gt.n} ground-truth frames")
    p = num_pred if num_pred is not None else pred.num_clusters
    g = num_gt if num_gt is not None else gt.num_labels
    counts = np.zeros((p, g), dtype=np.int64)
    np.add.at(counts, (pred.labels, gt.labels), 1)
    return OverlapMatrix(counts)


def hungarian_match(overlap: OverlapMatrix) -> dict[int, int]:
    """Maximum-total-overlap one-to-one assignment of clusters to labels.

    Rectangular matrices are handled directly: only min(P, G) pairs are
    assigned, and unmatched predicted clusters are simply absent from the
    mapping (their frames count as errors downstream).
    """
    rows, cols = linear_sum_assignment(overlap.counts, maximize=True)
    return {int(r): int(c) for r, c in zip(rows, cols)}


def _mapped(pred: Partition, mapping: dict[int, int]) -> np.ndarray:
    lut = np.full(pred.num_clusters, -1, dtype=np.int64)
    for c, g in mapping.items():
        if c < pred.num_clusters:
            lut[c] = g
    return lut[pred.labels]


def mof(pred: Partition, gt: GroundTruth, mapping: dict[int, int]) -> float:
    """Fraction of frames whose mapped cluster equals the ground truth."""
    if pred.n != gt.n:
        raise LengthMismatchError(f"{pred.n} vs {gt.n} frames")
    return float(np.mean(_mapped(pred, mapping) == gt.labels))


def iou(pred: Partition, gt: GroundTruth, mapping: dict[int, int]) -> float:
    """Mean Jaccard index over ground-truth labels.

    Matched pairs contribute |intersection| / |union|; ground-truth labels
    without a matched cluster contribute 0. The mean is over all gt labels.
    """
    ov = overlap_matrix(pred, gt)
    pred_sizes = ov.counts.sum(axis=1)
    gt_sizes = ov.counts.sum(axis=0)
    total = 0.0
    for c, g in mapping.items():
        inter = ov.counts[c, g]
        union = pred_sizes[c] + gt_sizes[g] - inter
        if union > 0:
            total += inter / union
    # Average over labels present in this video (the interned table may be
    # shared across videos and carry labels this video never uses).
    return total / np.unique(gt.labels).size


def f1(pred: Partition, gt: GroundTruth, mapping: dict[int, int],
       average: str = "micro") -> float:
    """Harmonic mean of matched-label precision and recall.

    micro: precision pools intersections over the frames of matched clusters;
    recall pools over all ground-truth frames (unmatched gt labels contribute
    their frame counts to the denominator). macro: mean over gt labels of the
    per-label F1, unmatched labels scoring 0.
    """
    ov = overlap_matrix(pred, gt)
    pred_sizes = ov.counts.sum(axis=1)
    gt_sizes = ov.counts.sum(axis=0)
    if average == "micro":
        inter = sum(int(ov.counts[c, g]) for c, g in mapping.items())
        pred_total = sum(int(pred_sizes[c]) for c in mapping)
        precision = inter / pred_total if pred_total else 0.0
        recall = inter / gt.n
        if precision + recall == 0.0:
            return 0.0
        return 2.0 * precision * recall / (precision + recall)
    if average == "macro":
        by_gt = {g: c for c, g in mapping.items()}
        scores = []
        for g in np.unique(gt.labels):
            c = by_gt.get(int(g))
            if c is None or ov.counts[c, g] == 0 or pred_sizes[c] == 0 or gt_sizes[g] == 0:
                scores.append(0.0)
                continue
            p = ov.counts[c, g] / pred_sizes[c]
            r = ov.counts[c, g] / gt_sizes[g]
            scores.append(2.0 * p * r / (p + r))
        return float(np.mean(scores))
    raise ValueError(f"unknown F1 average {average!r}")


def midpoint_hit(pred_segments: list[Segment], gt_segments: list[Segment],
                 mapping: dict[int, int]) -> tuple[float, float]:
    """Midpoint-hit precision and recall over segments.

    A predicted segment hits if its midpoint frame lies inside a ground-truth
    segment of the mapped label; each ground-truth segment can be claimed at
    most once, greedily in temporal order of the predictions.
    """
    claimed = [False] * len(gt_segments)
    hits = 0
    for seg in pred_segments:
        target = mapping.get(seg.label)
        if target is None:
            continue
        m = seg.midpoint
        for gi, gseg in enumerate(gt_segments):
            if gseg.label == target and gseg.start <= m <= gseg.end:
                if not claimed[gi]:
                    claimed[gi] = True
                    hits += 1
                break  # at most one gt segment contains the midpoint
    precision = hits / len(pred_segments) if pred_segments else 0.0
    recall = hits / len(gt_segments) if gt_segments else 0.0
    return precision, recall


def purity(pred: Partition, gt: GroundTruth) -> float:
    """Size-weighted majority-label purity (no matching involved)."""
    ov = overlap_matrix(pred, gt)
    return float(ov.counts.max(axis=1).sum() / gt.n)


def background_keep_indices(gt: GroundTruth, tau: float, seed: int) -> np.ndarray:
    """Original indices surviving removal of floor(tau * #background) frames.

    Removed background frames are chosen uniformly at random under ``seed``;
    survivors keep their original order. A no-op when the video has no
    background frames.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    bg = gt.background_id
    if bg is None:
        return np.arange(gt.n)
    bg_positions = np.flatnonzero(gt.labels == bg)
    n_remove = int(np.floor(tau * bg_positions.size))
    rng = np.random.default_rng(seed)
    removed = rng.choice(bg_positions, size=n_remove, replace=False)
    mask = np.ones(gt.n, dtype=bool)
    mask[removed] = False
    return np.flatnonzero(mask)


def filter_background(seq: FeatureSequence, gt: GroundTruth, tau: float,
                      seed: int) -> tuple[FeatureSequence, GroundTruth, np.ndarray]:
    """Remove a ratio ``tau`` of the background frames from a video.

    Returns the filtered sequence and ground truth plus the original-index
    map for the survivors. Deterministic for a fixed seed.
    """
    keep = background_keep_indices(gt, tau, seed)
    filtered_seq = FeatureSequence(seq.frames[keep], seq.video_id)
    filtered_gt = GroundTruth(gt.labels[keep], gt.label_names, gt.background_label)
    return filtered_seq, filtered_gt, keep


def evaluate_pair(pred: Partition, gt: GroundTruth,
                  mapping: dict[int, int] | None = None,
                  f1_average: str = "micro") -> EvalReport:
    """All metrics for one video; computes the per-video matching if none given."""
    if pred.n != gt.n:
        raise LengthMismatchError(f"{pred.n} predicted frames vs {gt.n} ground-truth frames")
    if mapping is None:
        mapping = hungarian_match(overlap_matrix(pred, gt))
    mid_p, mid_r = midpoint_hit(
        segments_from_labels(pred.labels), segments_from_labels(gt.labels), mapping
    )
    return EvalReport(
        mof=mof(pred, gt, mapping),
        iou=iou(pred, gt, mapping),
        f1=f1(pred, gt, mapping, f1_average),
        midpoint_precision=mid_p,
        midpoint_recall=mid_r,
        purity=purity(pred, gt),
        mapping=dict(mapping),
        n_frames=pred.n,
    )


def match_across_videos(pairs: list[tuple[Partition, GroundTruth]]) -> dict[int, int]:
    """One Hungarian matching over the pooled overlaps of several videos.

    Cluster id j is treated as the same label in every video; ground truths
    must share one interned label table (load them with a common table).
    """
    if not pairs:
        raise EmptyInputError("no videos to match")
    num_pred = max(p.num_clusters for p, _ in pairs)
    num_gt = max(g.num_labels for _, g in pairs)
    pooled = np.zeros((num_pred, num_gt), dtype=np.int64)
    for p, g in pairs:
        pooled += overlap_matrix(p, g, num_pred=num_pred, num_gt=num_gt).counts
    return hungarian_match(OverlapMatrix(pooled))


def aggregate(reports: list[EvalReport], mode: str = "video") -> EvalReport:
    """Combine per-video reports: unweighted mean or frame-count-weighted mean."""
    if not reports:
        raise EmptyInputError("nothing to aggregate")
    if mode == "video":
        weights = np.ones(len(reports))
    elif mode == "frame":
        weights = np.array([r.n_frames for r in reports], dtype=np.float64)
    else:
        raise ValueError(f"unknown aggregation mode {mode!r}")
    weights = weights / weights.sum()

    def avg(name: str) -> float:
        return float(sum(w * getattr(r, name) for w, r in zip(weights, reports)))

    return EvalReport(
        mof=avg("mof"),
        iou=avg("iou"),
        f1=avg("f1"),
        midpoint_precision=avg("midpoint_precision"),
        midpoint_recall=avg("midpoint_recall"),
        purity=avg("purity"),
        mapping={},
        n_frames=sum(r.n_frames for r in reports),
    )
