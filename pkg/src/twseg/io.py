"""File formats: feature matrices, label files, manifests, partitions.

Binary feature format (extension-agnostic; anything not ``.csv``):
    bytes 0-7   magic  b"TWSEGF01"
    bytes 8-11  u32 little-endian  N (frames)
    bytes 12-15 u32 little-endian  d (dims)
    then        N*d float32 little-endian, row-major

CSV feature format: one frame per line, d comma-separated reals.
Label files: one token per line, frame-aligned, surrounding whitespace trimmed.
Partition files: one integer cluster id per line.
Manifests: JSON, see ``load_manifest``.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    EmptySequenceError,
    InputError,
    ParseError,
    TruncatedFileError,
)
from .types import FeatureSequence, GroundTruth, Partition, validate_sequence

MAGIC = b"TWSEGF01"
_HEADER = struct.Struct("<II")


@dataclass(frozen=True)
class ManifestEntry:
    video_id: str
    activity: str
    feature_path: Path
    label_path: Path
    k_override: int | None = None


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    background_label: str = "SIL"
    label_map_path: Path | None = None
    k_counts_background: bool = True

    def label_table(self) -> tuple[str, ...] | None:
        """Optional pinned label-id order shared by every video."""
        if self.label_map_path is None:
            return None
        lines = self.label_map_path.read_text().splitlines()
        return tuple(tok.strip() for tok in lines if tok.strip())


def save_features(seq: FeatureSequence, path, fmt: str = "binary") -> None:
    path = Path(path)
    if fmt == "binary":
        payload = np.ascontiguousarray(seq.frames, dtype="<f4").tobytes()
        path.write_bytes(MAGIC + _HEADER.pack(seq.n, seq.dim) + payload)
    elif fmt == "csv":
        lines = [",".join(repr(float(v)) for v in row) for row in seq.frames]
        path.write_text("\n".join(lines) + "\n")
    else:
        raise ValueError(f"unknown feature format {fmt!r}")


def load_features(path) -> FeatureSequence:
    """Load a feature matrix; ``.csv`` parses as text, anything else as binary."""
    path = Path(path)
    seq = _load_csv(path) if path.suffix.lower() == ".csv" else _load_binary(path)
    validate_sequence(seq)
    return seq


def _load_binary(path: Path) -> FeatureSequence:
    blob = path.read_bytes()
    if len(blob) < len(MAGIC):
        raise TruncatedFileError(f"{path}: {len(blob)} bytes is too short for a header")
    if blob[: len(MAGIC)] != MAGIC:
        raise BadMagicError(f"{path}: bad magic {blob[:len(MAGIC)]!r}")
    if len(blob) < len(MAGIC) + _HEADER.size:
        raise TruncatedFileError(f"{path}: header cut short")
    n, d = _HEADER.unpack_from(blob, len(MAGIC))
    expected = len(MAGIC) + _HEADER.size + 4 * n * d
    if len(blob) < expected:
        raise TruncatedFileError(f"{path}: expected {expected} bytes, found {len(blob)}")
    if len(blob) > expected:
        raise ParseError(f"{path}: {len(blob) - expected} trailing bytes after the payload")
    frames = np.frombuffer(blob, dtype="<f4", offset=len(MAGIC) + _HEADER.size)
    if n == 0 or d == 0:
        raise EmptySequenceError(f"{path}: declared shape {n}x{d}")
    return FeatureSequence(frames.reshape(n, d), video_id=path.stem)


def _load_csv(path: Path) -> FeatureSequence:
    raw = path.read_text().splitlines()
    while raw and not raw[-1].strip():
        raw.pop()
    rows: list[list[float]] = []
    for lineno, line in enumerate(raw, start=1):
        if not line.strip():
            raise ParseError("blank line", line=lineno)
        try:
            row = [float(tok) for tok in line.split(",")]
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if rows and len(row) != len(rows[0]):
            raise ParseError(f"expected {len(rows[0])} values, got {len(row)}", line=lineno)
        rows.append(row)
    if not rows:
        raise EmptySequenceError(f"{path}: no frames")
    return FeatureSequence(np.array(rows, dtype=np.float32), video_id=path.stem)


def load_labels(path, background_label: str = "SIL",
                label_table: tuple[str, ...] | None = None) -> GroundTruth:
    """One label token per line; interning preserves first-occurrence order."""
    path = Path(path)
    raw = path.read_text().splitlines()
    while raw and not raw[-1].strip():
        raw.pop()
    tokens = []
    for lineno, line in enumerate(raw, start=1):
        tok = line.strip()
        if not tok:
            raise ParseError("blank label", line=lineno)
        tokens.append(tok)
    if not tokens:
        raise ParseError(f"{path}: no labels")
    return GroundTruth.from_tokens(tokens, background_label, label_table)


def save_partition(p: Partition, path) -> None:
    Path(path).write_text("".join(f"{v}\n" for v in p.labels))


def load_partition(path) -> Partition:
    path = Path(path)
    labels = []
    raw = path.read_text().splitlines()
    while raw and not raw[-1].strip():
        raw.pop()
    for lineno, line in enumerate(raw, start=1):
        try:
            labels.append(int(line.strip()))
        except ValueError:
            raise ParseError(f"not an integer: {line.strip()!r}", line=lineno) from None
    if not labels:
        raise ParseError(f"{path}: empty partition file")
    return Partition(np.array(labels, dtype=np.int64))


def save_indices(indices: np.ndarray, path) -> None:
    Path(path).write_text("".join(f"{int(v)}\n" for v in indices))


def load_indices(path) -> np.ndarray:
    path = Path(path)
    values = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            values.append(int(line.strip()))
        except ValueError:
            raise ParseError(f"not an integer: {line.strip()!r}", line=lineno) from None
    return np.array(values, dtype=np.int64)


def load_manifest(path) -> DatasetManifest:
    """Parse and validate a dataset manifest.

    JSON schema::

        {
          "background_label": "SIL",            // optional, default "SIL"
          "label_map_path": "labels.map",       // optional, pins label id order
          "k_counts_background": true,          // optional, default true
          "entries": [
            {"video_id": "...", "activity": "...",
             "feature_path": "...", "label_path": "...",
             "k_override": 5}                   // k_override optional
          ]
        }

    Relative paths resolve against the manifest's directory. Validation
    errors name the offending entry.
    """
    path = Path(path)
    base = path.parent
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if not isinstance(doc, dict) or "entries" not in doc:
        raise InputError(f"{path}: manifest must be a JSON object with an 'entries' list")

    entries = []
    seen = set()
    for i, raw in enumerate(doc["entries"]):
        where = f"{path} entry {i}"
        for key in ("video_id", "activity", "feature_path", "label_path"):
            if key not in raw:
                raise InputError(f"{where}: missing field {key!r}")
        vid = raw["video_id"]
        if vid in seen:
            raise InputError(f"{where} ({vid}): duplicate video_id")
        seen.add(vid)
        feature_path = base / raw["feature_path"]
        label_path = base / raw["label_path"]
        if not feature_path.is_file():
            raise InputError(f"{where} ({vid}): missing feature file {feature_path}")
        if not label_path.is_file():
            raise InputError(f"{where} ({vid}): missing label file {label_path}")
        entries.append(ManifestEntry(
            video_id=vid,
            activity=raw["activity"],
            feature_path=feature_path,
            label_path=label_path,
            k_override=raw.get("k_override"),
        ))

    label_map_path = None
    if doc.get("label_map_path"):
        label_map_path = base / doc["label_map_path"]
        if not label_map_path.is_file():
            raise InputError(f"{path}: missing label map {label_map_path}")

    return DatasetManifest(
        entries=tuple(entries),
        background_label=doc.get("background_label", "SIL"),
        label_map_path=label_map_path,
        k_counts_background=doc.get("k_counts_background", True),
    )


def compute_activity_k(manifest: DatasetManifest) -> dict[str, int]:
    """Per activity: rounded (half-up) mean of distinct labels per video."""
    table = manifest.label_table()
    counts: dict[str, list[int]] = {}
    for entry in manifest.entries:
        gt = load_labels(entry.label_path, manifest.background_label, table)
        counts.setdefault(entry.activity, []).append(
            gt.distinct_count(include_background=manifest.k_counts_background)
        )
    return {
        activity: max(1, int(math.floor(sum(vals) / len(vals) + 0.5)))
        for activity, vals in counts.items()
    }
