"""Seeded synthetic sequences and brute-force oracles for the test suites."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import InfeasibleSpecError, TooLargeError
from .evaluate import OverlapMatrix
from .types import FeatureSequence, GroundTruth, Partition

_MIN_RUN = 2


@dataclass(frozen=True)
class SynthSpec:
    """Parameters for one planted-segment sequence.

    ``sep`` is the pairwise center separation in units of ``noise_sigma``.
    ``repeat_pattern`` plants runs that share visual classes (e.g.
    ("A", "B", "A")); its length must equal ``k``. Ground-truth labels are
    per-run instances, so a repeated class yields distinct gt labels for its
    runs while their features stay indistinguishable.
    """

    k: int = 4
    n: int = 800
    d: int = 64
    sep: float = 8.0
    noise_sigma: float = 1.0
    background_frac: float = 0.0
    repeat_pattern: tuple[str, ...] | None = None
    seed: int = 0
    background_label: str = "BG"
    length_alpha: float = 1.5  # Dirichlet concentration; higher = more even runs

    def __post_init__(self):
        if self.k < 1 or self.n < self.k or self.sep < 0:
            raise InfeasibleSpecError("need k >= 1, n >= k, sep >= 0")
        if self.length_alpha <= 0:
            raise InfeasibleSpecError("length_alpha must be positive")
        if self.repeat_pattern is not None and len(self.repeat_pattern) != self.k:
            raise InfeasibleSpecError(
                f"repeat_pattern has {len(self.repeat_pattern)} runs but k={self.k}"
            )
        if not 0.0 <= self.background_frac <= 1.0:
            raise InfeasibleSpecError("background_frac must lie in [0, 1]")


def _run_classes(spec: SynthSpec) -> list[str]:
    if spec.repeat_pattern is not None:
        return list(spec.repeat_pattern)
    return [f"act{i}" for i in range(spec.k)]


def _partition_lengths(total: int, parts: int, min_len: int,
                       rng: np.random.Generator, alpha: float) -> np.ndarray:
    """Random positive lengths summing to ``total``, each >= ``min_len``."""
    spare = total - parts * min_len
    props = rng.dirichlet(np.full(parts, alpha))
    extra = np.floor(props * spare).astype(np.int64)
    remainder = spare - extra.sum()
    extra[:remainder] += 1
    return extra + min_len


def generate(spec: SynthSpec) -> tuple[FeatureSequence, GroundTruth]:
    """Deterministic planted-segment sequence with per-run ground truth.

    Class centers sit on scaled basis vectors, pairwise ``sep * noise_sigma``
    apart; the optional background center is three separations away from the
    origin on its own axis. Background frames are spread over the k+1 gaps
    around the action runs.
    """
    rng = np.random.default_rng(spec.seed)
    classes = _run_classes(spec)
    class_names = list(dict.fromkeys(classes))
    n_classes = len(class_names) + (1 if spec.background_frac > 0 else 0)
    if spec.d < n_classes:
        raise InfeasibleSpecError(f"need d >= {n_classes} for {n_classes} class centers")

    scale = spec.sep * spec.noise_sigma / np.sqrt(2.0)
    centers = {name: scale * np.eye(1, spec.d, i)[0] for i, name in enumerate(class_names)}

    n_bg = int(round(spec.background_frac * spec.n))
    n_act = spec.n - n_bg
    if n_act < spec.k * _MIN_RUN:
        raise InfeasibleSpecError(
            f"{n_act} non-background frames cannot hold {spec.k} runs of >= {_MIN_RUN}"
        )
    run_lengths = _partition_lengths(n_act, spec.k, _MIN_RUN, rng, alpha=spec.length_alpha)
    gaps = rng.multinomial(n_bg, np.full(spec.k + 1, 1.0 / (spec.k + 1)))

    pieces: list[tuple[str, str, int]] = []  # (gt label, class name, length)
    bg_center_name = "__background__"
    if spec.background_frac > 0:
        centers[bg_center_name] = 3.0 * scale * np.eye(1, spec.d, len(class_names))[0]
    for r in range(spec.k):
        if gaps[r] > 0:
            pieces.append((spec.background_label, bg_center_name, int(gaps[r])))
        pieces.append((f"{classes[r]}#{r}", classes[r], int(run_lengths[r])))
    if gaps[spec.k] > 0:
        pieces.append((spec.background_label, bg_center_name, int(gaps[spec.k])))

    tokens: list[str] = []
    frames = np.empty((spec.n, spec.d), dtype=np.float64)
    pos = 0
    for gt_label, cls, length in pieces:
        frames[pos:pos + length] = centers[cls]
        tokens.extend([gt_label] * length)
        pos += length
    frames += rng.normal(0.0, spec.noise_sigma, size=frames.shape)

    seq = FeatureSequence(frames, video_id=f"synth-{spec.seed}")
    gt = GroundTruth.from_tokens(tokens, background_label=spec.background_label)
    return seq, gt


def brute_force_assignment(overlap: OverlapMatrix) -> dict[int, int]:
    """Exhaustive maximum-overlap one-to-one assignment (oracle).

    Enumerates all injective maps between the smaller and larger side; bails
    out above 8x8. Ties resolve to the first enumerated optimum.
    """
    p, g = overlap.shape
    if max(p, g) > 8:
        raise TooLargeError("brute force capped at 8x8 matrices")
    counts = overlap.counts.tolist()  # plain ints: the hot loop below is pure Python
    best_total = -1
    best: dict[int, int] = {}
    if p <= g:
        for cols in permutations(range(g), p):
            total = sum(counts[r][c] for r, c in enumerate(cols))
            if total > best_total:
                best_total = total
                best = {r: c for r, c in enumerate(cols)}
    else:
        for rows in permutations(range(p), g):
            total = sum(counts[r][c] for c, r in enumerate(rows))
            if total > best_total:
                best_total = total
                best = {r: c for c, r in enumerate(rows)}
    return best


def assignment_total(overlap: OverlapMatrix, mapping: dict[int, int]) -> int:
    return int(sum(overlap.counts[r, c] for r, c in mapping.items()))


def brute_force_components(n: int, edges) -> Partition:
    """Connected-component labels by repeated BFS (oracle)."""
    if n > 10_000:
        raise TooLargeError("BFS oracle capped at 10000 nodes")
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adjacency[a].append(b)
        adjacency[b].append(a)
    labels = np.full(n, -1, dtype=np.int64)
    next_label = 0
    for start in range(n):
        if labels[start] != -1:
            continue
        queue = deque([start])
        labels[start] = next_label
        while queue:
            node = queue.popleft()
            for nbr in adjacency[node]:
                if labels[nbr] == -1:
                    labels[nbr] = next_label
                    queue.append(nbr)
        next_label += 1
    return Partition(labels)
