"""Artificial class imbalance and the upsampling baseline.

``make_imbalanced`` keeps half the classes at their original size and
cuts each of the remaining classes down to a small random subset;
``upsample_balance`` is the baseline repair that duplicates rows of
small classes until all counts match the maximum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import EmbeddingDataset
from .errors import CapacityError, ValidationError


@dataclass(frozen=True)
class ImbalanceSpec:
    """Record of which classes were restricted and how."""

    n_few: int
    restricted_classes: tuple[int, ...]
    n_many_per_class: tuple[int, ...]
    seed: int

    def __post_init__(self):
        k = len(self.n_many_per_class)
        if len(self.restricted_classes) != k // 2:
            raise ValidationError(
                f"expected {k // 2} restricted classes for k={k}, "
                f"got {len(self.restricted_classes)}"
            )
        if any(not 0 <= c < k for c in self.restricted_classes):
            raise ValidationError("restricted class index out of range")

    def to_json(self) -> dict:
        return {
            "n_few": self.n_few,
            "restricted_classes": list(self.restricted_classes),
            "n_many_per_class": list(self.n_many_per_class),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, raw: dict) -> "ImbalanceSpec":
        return cls(
            n_few=int(raw["n_few"]),
            restricted_classes=tuple(int(c) for c in raw["restricted_classes"]),
            n_many_per_class=tuple(int(c) for c in raw["n_many_per_class"]),
            seed=int(raw["seed"]),
        )

    @classmethod
    def load(cls, path) -> "ImbalanceSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def make_imbalanced(
    ds: EmbeddingDataset, n_few: int, seed: int
) -> tuple[EmbeddingDataset, ImbalanceSpec]:
    """Restrict a random half of the classes to n_few examples each.

    floor(k/2) classes are chosen uniformly; each keeps a uniform
    random subset of n_few rows. The other classes are untouched. The
    output is always a row subset of the input (never fabricates data).
    """
    if n_few < 1:
        raise ValidationError(f"n_few must be >= 1, got {n_few}")
    counts = ds.class_counts()
    short = [c for c in range(ds.k) if counts[c] < n_few]
    if short:
        raise CapacityError(
            f"n_few={n_few} exceeds the size of classes {short} "
            f"(counts {[int(counts[c]) for c in short]})"
        )
    rng = np.random.default_rng(seed)
    restricted = np.sort(rng.choice(ds.k, size=ds.k // 2, replace=False))
    keep: list[np.ndarray] = []
    for c in range(ds.k):
        rows = ds.class_rows(c)
        if c in restricted:
            rows = np.sort(rng.choice(rows, size=n_few, replace=False))
        keep.append(rows)
    keep_idx = np.sort(np.concatenate(keep))
    spec = ImbalanceSpec(
        n_few=n_few,
        restricted_classes=tuple(int(c) for c in restricted),
        n_many_per_class=tuple(int(c) for c in counts),
        seed=seed,
    )
    return ds.subset(keep_idx), spec


def upsample_balance(ds: EmbeddingDataset, seed: int) -> EmbeddingDataset:
    """Duplicate rows of small classes until all counts hit the maximum.

    Duplicates are sampled uniformly with replacement from the class's
    existing rows; every added row is a bit-exact copy of an original.
    """
    counts = ds.class_counts()
    if ds.n == 0 or (counts == 0).any():
        raise ValidationError("upsample_balance requires every class to be non-empty")
    top = int(counts.max())
    rng = np.random.default_rng(seed)
    extra: list[np.ndarray] = []
    for c in range(ds.k):
        deficit = top - int(counts[c])
        if deficit == 0:
            continue
        rows = ds.class_rows(c)
        extra.append(rng.choice(rows, size=deficit, replace=True))
    if not extra:
        return ds
    dup = np.concatenate(extra)
    return ds.with_rows(ds.vectors[dup], ds.labels[dup])
