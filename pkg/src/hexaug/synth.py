"""Synthetic labeled embeddings with controllable class geometry.

Classes are axis-aligned Gaussian clusters. In "shared" covariance mode
every class uses one common diagonal covariance, so cross-class
extrapolation's assumption (within-class shape transfers between
classes) holds by construction. In "per_class" mode each class draws
its own covariance, with per-class global scales spread over a 16x
range, so the assumption is deliberately false and its failure mode can
be demonstrated.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .data import DatasetManifest, EmbeddingDataset, save_embeddings
from .errors import ValidationError

COVARIANCE_MODES = ("shared", "per_class")


@dataclass(frozen=True)
class SynthSpec:
    k: int
    d: int
    per_class: int
    mean_scale: float = 1.0
    covariance_mode: str = "shared"
    within_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValidationError(f"need k >= 2 classes, got {self.k}")
        if self.d < 1 or self.per_class < 1:
            raise ValidationError("d and per_class must be >= 1")
        if self.mean_scale <= 0 or self.within_scale <= 0:
            raise ValidationError("mean_scale and within_scale must be > 0")
        if self.covariance_mode not in COVARIANCE_MODES:
            raise ValidationError(
                f"covariance_mode must be one of {COVARIANCE_MODES}, "
                f"got {self.covariance_mode!r}"
            )


def generate(spec: SynthSpec) -> tuple[EmbeddingDataset, EmbeddingDataset]:
    """Draw (train, eval) datasets, per_class rows each per class.

    Class means are i.i.d. Normal(0, mean_scale) per coordinate. The
    diagonal stds are within_scale times a Uniform(0.5, 1.5) jitter per
    coordinate; in per_class mode each class additionally gets a global
    scale factor log-uniform in [1/4, 4]. Everything is deterministic
    given the seed; eval sets are balanced by construction.
    """
    rng = np.random.default_rng(spec.seed)
    means = rng.normal(0.0, spec.mean_scale, size=(spec.k, spec.d))
    if spec.covariance_mode == "shared":
        stds = np.tile(spec.within_scale * rng.uniform(0.5, 1.5, size=spec.d),
                       (spec.k, 1))
    else:
        class_scale = np.exp(rng.uniform(np.log(0.25), np.log(4.0), size=spec.k))
        jitter = rng.uniform(0.5, 1.5, size=(spec.k, spec.d))
        stds = spec.within_scale * class_scale[:, None] * jitter

    def draw_split() -> EmbeddingDataset:
        chunks = [
            means[c] + stds[c] * rng.standard_normal((spec.per_class, spec.d))
            for c in range(spec.k)
        ]
        labels = np.repeat(np.arange(spec.k, dtype=np.int64), spec.per_class)
        return EmbeddingDataset(
            np.concatenate(chunks, axis=0).astype(np.float32), labels, spec.k
        )

    return draw_split(), draw_split()


def emit(spec: SynthSpec, train_path, eval_path) -> tuple[EmbeddingDataset, EmbeddingDataset]:
    """Generate and write both splits with manifests recording the spec."""
    train, evaluation = generate(spec)
    source = "synth:" + json.dumps(asdict(spec), sort_keys=True)
    save_embeddings(train, train_path,
                    DatasetManifest(source=source, split="train"))
    save_embeddings(evaluation, eval_path,
                    DatasetManifest(source=source, split="eval"))
    return train, evaluation
