"""Embedding dataset model and its portable on-disk formats.

A dataset is a fixed-dimension block of float32 vectors with one dense
class index per row. The binary container ("EMB1") is little-endian:

    bytes 0-3   ASCII magic "EMB1"
    u32         version (currently 1)
    u32         n   number of rows
    u32         d   dimensionality
    u32         k   number of classes
    u32 * n     labels, each in [0, k)
    f32 * n*d   vectors, row-major

An optional sidecar ``<file>.meta.json`` carries human-facing metadata
(keys "class_names", "source", "encoder", "split").
"""

from __future__ import annotations

import csv
import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CapacityError, CorruptionError, FormatError, ValidationError

logger = logging.getLogger(__name__)

MAGIC = b"EMB1"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<III")  # n, d, k (after magic + version)


@dataclass(frozen=True)
class EmbeddingDataset:
    """Labeled embedding vectors; immutable after construction.

    vectors : (n, d) float32, all entries finite
    labels  : (n,) integer class indices in [0, k)
    k       : class count (classes may be empty in intermediates)
    class_names : k display names, defaults to "class_0".."class_{k-1}"
    """

    vectors: np.ndarray
    labels: np.ndarray
    k: int
    class_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        vectors = np.ascontiguousarray(self.vectors, dtype=np.float32)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if vectors.ndim != 2:
            raise ValidationError(f"vectors must be 2-D, got shape {vectors.shape}")
        if labels.ndim != 1 or labels.shape[0] != vectors.shape[0]:
            raise ValidationError(
                f"labels length {labels.shape} does not match {vectors.shape[0]} rows"
            )
        if vectors.shape[1] < 1:
            raise ValidationError("dimensionality must be >= 1")
        if self.k < 1:
            raise ValidationError("class count must be >= 1")
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            bad = labels[(labels < 0) | (labels >= self.k)][0]
            raise ValidationError(f"label {bad} outside [0, {self.k})")
        if not np.all(np.isfinite(vectors)):
            raise ValidationError("vectors contain non-finite values")
        names = self.class_names or tuple(f"class_{i}" for i in range(self.k))
        if len(names) != self.k:
            raise ValidationError(
                f"expected {self.k} class names, got {len(names)}"
            )
        vectors.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", tuple(names))

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def class_counts(self) -> np.ndarray:
        """Per-class example counts, length k."""
        return np.bincount(self.labels, minlength=self.k)

    def class_rows(self, c: int) -> np.ndarray:
        """Row indices belonging to class c, ascending."""
        if not 0 <= c < self.k:
            raise IndexError(f"class index {c} outside [0, {self.k})")
        return np.flatnonzero(self.labels == c)

    def empty_classes(self) -> list[int]:
        return [int(c) for c in np.flatnonzero(self.class_counts() == 0)]

    @property
    def is_training_complete(self) -> bool:
        """True when every class index appears at least once."""
        return self.n > 0 and not self.empty_classes()

    def subset(self, indices) -> "EmbeddingDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return EmbeddingDataset(self.vectors[idx], self.labels[idx], self.k,
                                self.class_names)

    def with_rows(self, vectors, labels) -> "EmbeddingDataset":
        """New dataset with extra rows appended (same k and names)."""
        extra_v = np.asarray(vectors, dtype=np.float32).reshape(-1, self.d)
        extra_l = np.asarray(labels, dtype=np.int64)
        return EmbeddingDataset(
            np.concatenate([self.vectors, extra_v], axis=0),
            np.concatenate([self.labels, extra_l]),
            self.k,
            self.class_names,
        )

    def __eq__(self, other):
        if not isinstance(other, EmbeddingDataset):
            return NotImplemented
        return (
            self.k == other.k
            and self.vectors.shape == other.vectors.shape
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.vectors, other.vectors)
        )


@dataclass
class DatasetManifest:
    """Sidecar metadata paired with an EMB1 file."""

    source: str = ""
    encoder: str = ""
    split: str = ""  # "train" or "eval"
    class_names: tuple[str, ...] | None = None
    dimensionality: int | None = None

    def to_json(self) -> dict:
        out = {
            "class_names": list(self.class_names) if self.class_names else None,
            "source": self.source,
            "encoder": self.encoder,
            "split": self.split,
        }
        return out


def _meta_path(path) -> Path:
    return Path(str(path) + ".meta.json")


def save_embeddings(ds: EmbeddingDataset, path, manifest: DatasetManifest | None = None) -> None:
    """Write ds to path in the EMB1 layout (plus optional meta sidecar)."""
    if ds.n < 1:
        raise ValidationError("refusing to write an empty dataset (n must be >= 1)")
    if manifest is not None and manifest.dimensionality not in (None, ds.d):
        raise ValidationError(
            f"manifest dimensionality {manifest.dimensionality} != dataset d {ds.d}"
        )
    path = Path(path)
    payload = (
        MAGIC
        + struct.pack("<I", FORMAT_VERSION)
        + _HEADER.pack(ds.n, ds.d, ds.k)
        + ds.labels.astype("<u4").tobytes()
        + ds.vectors.astype("<f4").tobytes()
    )
    path.write_bytes(payload)
    if manifest is not None:
        meta = manifest.to_json()
        if meta["class_names"] is None:
            meta["class_names"] = list(ds.class_names)
        _meta_path(path).write_text(json.dumps(meta, indent=2))
    elif ds.class_names != tuple(f"class_{i}" for i in range(ds.k)):
        meta = DatasetManifest(class_names=ds.class_names).to_json()
        _meta_path(path).write_text(json.dumps(meta, indent=2))


def load_manifest(path) -> DatasetManifest | None:
    meta_file = _meta_path(path)
    if not meta_file.exists():
        return None
    try:
        raw = json.loads(meta_file.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"unreadable meta sidecar {meta_file}: {exc}") from exc
    names = raw.get("class_names")
    return DatasetManifest(
        source=raw.get("source", ""),
        encoder=raw.get("encoder", ""),
        split=raw.get("split", ""),
        class_names=tuple(names) if names else None,
    )


def load_embeddings(path) -> EmbeddingDataset:
    """Parse an EMB1 file back into a validated dataset."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 8 or blob[:4] != MAGIC:
        raise FormatError(f"{path}: not an EMB1 file (bad magic)")
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported EMB1 version {version}")
    if len(blob) < 8 + _HEADER.size:
        raise CorruptionError(f"{path}: truncated header")
    n, d, k = _HEADER.unpack_from(blob, 8)
    if n < 1:
        raise ValidationError(f"{path}: empty dataset (n=0) is not loadable")
    if d < 1 or k < 1:
        raise ValidationError(f"{path}: invalid header (d={d}, k={k})")
    expected = 8 + _HEADER.size + 4 * n + 4 * n * d
    if len(blob) < expected:
        raise CorruptionError(
            f"{path}: truncated payload ({len(blob)} bytes, expected {expected})"
        )
    if len(blob) > expected:
        raise CorruptionError(
            f"{path}: {len(blob) - expected} trailing bytes after payload"
        )
    off = 8 + _HEADER.size
    labels = np.frombuffer(blob, dtype="<u4", count=n, offset=off).astype(np.int64)
    off += 4 * n
    vectors = np.frombuffer(blob, dtype="<f4", count=n * d, offset=off).reshape(n, d)
    if labels.max() >= k:
        raise ValidationError(f"{path}: label {labels.max()} >= k={k}")
    if not np.all(np.isfinite(vectors)):
        raise ValidationError(f"{path}: vectors contain non-finite values")

    manifest = load_manifest(path)
    names: tuple[str, ...] = ()
    if manifest is not None and manifest.class_names:
        if len(manifest.class_names) != k:
            raise ValidationError(
                f"{path}: sidecar has {len(manifest.class_names)} class names, header k={k}"
            )
        names = manifest.class_names
    ds = EmbeddingDataset(vectors, labels, k, names)
    empties = ds.empty_classes()
    if empties:
        logger.warning("%s: classes with no examples: %s", path, empties)
    return ds


def import_csv(path, d: int) -> EmbeddingDataset:
    """Import "label,f0,...,f{d-1}" rows; labels may be names or indices.

    Class names are assigned dense indices in first-appearance order.
    If every label parses as a non-negative integer it is used directly
    as the class index.
    """
    path = Path(path)
    expected_header = ["label"] + [f"f{i}" for i in range(d)]
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty CSV") from None
        if [h.strip() for h in header] != expected_header:
            raise FormatError(
                f"{path}: bad header {header[:3]}..., expected label,f0,...,f{d-1}"
            )
        raw_labels: list[str] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 1:
                raise FormatError(
                    f"{path}:{lineno}: ragged row with {len(row)} fields, expected {d + 1}"
                )
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: unparseable float: {exc}") from exc
            raw_labels.append(row[0].strip())

    if not rows:
        raise ValidationError(f"{path}: no data rows")

    if all(lbl.lstrip("-").isdigit() for lbl in raw_labels):
        labels = np.array([int(v) for v in raw_labels], dtype=np.int64)
        if labels.min() < 0:
            raise ValidationError(f"{path}: negative class index {labels.min()}")
        k = int(labels.max()) + 1
        names: tuple[str, ...] = ()
    else:
        order: dict[str, int] = {}
        for lbl in raw_labels:
            order.setdefault(lbl, len(order))
        labels = np.array([order[lbl] for lbl in raw_labels], dtype=np.int64)
        k = len(order)
        names = tuple(order)

    vectors = np.asarray(rows, dtype=np.float32)
    return EmbeddingDataset(vectors, labels, k, names)


def stratified_split(
    ds: EmbeddingDataset, per_class_train: int, per_class_eval: int, seed: int
) -> tuple[EmbeddingDataset, EmbeddingDataset]:
    """Disjoint train/eval subsets with exact per-class counts."""
    if per_class_train < 0 or per_class_eval < 0:
        raise ValidationError("per-class counts must be non-negative")
    rng = np.random.default_rng(seed)
    need = per_class_train + per_class_eval
    train_idx: list[np.ndarray] = []
    eval_idx: list[np.ndarray] = []
    for c in range(ds.k):
        rows = ds.class_rows(c)
        if rows.size < need:
            raise CapacityError(
                f"class {c} ({ds.class_names[c]}) has {rows.size} examples, "
                f"needs {need}"
            )
        perm = rng.permutation(rows)
        train_idx.append(np.sort(perm[:per_class_train]))
        eval_idx.append(np.sort(perm[per_class_train:need]))
    return (
        ds.subset(np.concatenate(train_idx)),
        ds.subset(np.concatenate(eval_idx)),
    )
