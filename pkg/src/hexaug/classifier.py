"""Linear softmax classifier over frozen embeddings.

The encoder that produced the embeddings is never touched: training
fits only a k x d weight matrix and bias by seeded minibatch SGD on the
mean cross-entropy plus an L2 penalty on the weights. Training is
bit-reproducible: the only randomness is the epoch shuffle (and the
optional random init), both driven by the config seed.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .data import EmbeddingDataset
from .errors import (CorruptionError, FormatError, ShapeError, TrainingError,
                     ValidationError)
from .imbalance import ImbalanceSpec

MODEL_MAGIC = b"LMD1"


@dataclass(frozen=True)
class LinearModel:
    """Weights (k, d) and bias (k,), held in float64."""

    W: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        W = np.ascontiguousarray(self.W, dtype=np.float64)
        b = np.ascontiguousarray(self.b, dtype=np.float64)
        if W.ndim != 2 or b.ndim != 1 or b.shape[0] != W.shape[0]:
            raise ShapeError(f"inconsistent parameter shapes {W.shape} / {b.shape}")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)

    @property
    def k(self) -> int:
        return self.W.shape[0]

    @property
    def d(self) -> int:
        return self.W.shape[1]

    @classmethod
    def zeros(cls, k: int, d: int) -> "LinearModel":
        return cls(np.zeros((k, d)), np.zeros(k))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    batch_size: int = 64
    epochs: int = 30
    l2: float = 1e-4
    seed: int = 0
    init_scale: float = 0.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs}")
        if self.l2 < 0:
            raise ValidationError(f"l2 must be >= 0, got {self.l2}")
        if self.init_scale < 0:
            raise ValidationError(f"init_scale must be >= 0, got {self.init_scale}")

    def to_json(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "l2": self.l2,
            "seed": self.seed,
            "init_scale": self.init_scale,
        }


def forward_logits(model: LinearModel, x) -> np.ndarray:
    """Logits W x + b for one vector (d,) or a batch (n, d)."""
    xv = np.asarray(x, dtype=np.float64)
    if xv.ndim not in (1, 2) or xv.shape[-1] != model.d:
        raise ShapeError(f"input shape {xv.shape} incompatible with d={model.d}")
    return xv @ model.W.T + model.b


def softmax(logits) -> np.ndarray:
    """Row-wise softmax with max-subtraction for stability."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def loss_and_grad(model: LinearModel, vectors, labels, l2: float):
    """Mean cross-entropy + (l2/2)||W||^2 and its exact gradient.

    Returns (loss, (grad_W, grad_b)).
    """
    X = np.asarray(vectors, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ShapeError("batch must be a non-empty (n, d) array")
    if X.shape[0] != y.shape[0]:
        raise ShapeError("vectors and labels disagree on batch size")
    if X.shape[1] != model.d:
        raise ShapeError(f"batch d={X.shape[1]} != model d={model.d}")
    if y.min() < 0 or y.max() >= model.k:
        raise ShapeError(f"label outside [0, {model.k})")
    m = X.shape[0]
    rows = np.arange(m)
    logits = X @ model.W.T + model.b
    shifted = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(shifted)
    z_sum = expz.sum(axis=1)
    ce = np.log(z_sum) - shifted[rows, y]
    loss = float(ce.mean() + 0.5 * l2 * np.square(model.W).sum())
    p = expz / z_sum[:, None]
    p[rows, y] -= 1.0
    p /= m
    grad_w = p.T @ X + l2 * model.W
    grad_b = p.sum(axis=0)
    return loss, (grad_w, grad_b)


def train(
    ds: EmbeddingDataset,
    cfg: TrainConfig,
    init: LinearModel | None = None,
) -> tuple[LinearModel, np.ndarray]:
    """Seeded-shuffle minibatch SGD; returns the model and per-epoch loss.

    Deterministic: the same (dataset, config, init) always yields a
    bit-identical model under a given kernel backend.
    """
    if not ds.is_training_complete:
        raise ValidationError(
            f"training set is not class-complete (empty classes {ds.empty_classes()})"
        )
    if init is None:
        if cfg.init_scale > 0:
            init_rng = np.random.default_rng((cfg.seed, 1))
            init = LinearModel(
                cfg.init_scale * init_rng.standard_normal((ds.k, ds.d)),
                np.zeros(ds.k),
            )
        else:
            init = LinearModel.zeros(ds.k, ds.d)
    if init.k != ds.k or init.d != ds.d:
        raise ShapeError(f"init shape ({init.k},{init.d}) != dataset ({ds.k},{ds.d})")

    W = init.W.copy()
    b = init.b.copy()
    if cfg.epochs == 0:
        return LinearModel(W, b), np.zeros(0)

    X = np.ascontiguousarray(ds.vectors, dtype=np.float64)
    y = np.ascontiguousarray(ds.labels, dtype=np.int64)
    shuffle_rng = np.random.default_rng(cfg.seed)
    order = np.empty((cfg.epochs, ds.n), dtype=np.int64)
    for e in range(cfg.epochs):
        order[e] = shuffle_rng.permutation(ds.n)
    loss_hist = np.zeros(cfg.epochs, dtype=np.float64)

    bad_step = kernels.sgd_epochs(
        X, y, W, b, cfg.learning_rate, cfg.l2, cfg.batch_size, order, loss_hist
    )
    if bad_step >= 0:
        raise TrainingError(f"loss became non-finite at optimization step {bad_step}")
    if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
        raise TrainingError("parameters became non-finite during training")
    return LinearModel(W, b), loss_hist


@dataclass(frozen=True)
class EvalResult:
    """Accuracy report; ties in argmax resolve to the lowest class index."""

    accuracy: float                      # percent
    per_class: tuple[float, ...]         # percent; nan for absent classes
    n: int
    acc_restricted: float | None = None  # percent over restricted classes
    acc_unrestricted: float | None = None

    def to_json(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_class": [None if np.isnan(v) else v for v in self.per_class],
            "n": self.n,
            "acc_restricted": self.acc_restricted,
            "acc_unrestricted": self.acc_unrestricted,
        }


def predict(model: LinearModel, vectors) -> np.ndarray:
    """Argmax class per row (lowest index wins ties)."""
    logits = forward_logits(model, np.asarray(vectors, dtype=np.float64))
    return np.argmax(logits, axis=-1)


def evaluate(
    model: LinearModel,
    ds: EmbeddingDataset,
    imbalance_spec: ImbalanceSpec | None = None,
) -> EvalResult:
    """Overall, per-class, and restricted/unrestricted accuracy (percent)."""
    if ds.n == 0:
        raise ValidationError("cannot evaluate on an empty dataset")
    if ds.d != model.d:
        raise ShapeError(f"eval d={ds.d} != model d={model.d}")
    if ds.k > model.k:
        raise ShapeError(f"eval set has {ds.k} classes, model only {model.k}")
    preds = predict(model, ds.vectors)
    hits = preds == ds.labels
    per_class = []
    for c in range(ds.k):
        mask = ds.labels == c
        per_class.append(100.0 * hits[mask].mean() if mask.any() else float("nan"))
    acc_r = acc_u = None
    if imbalance_spec is not None:
        restricted = np.zeros(ds.k, dtype=bool)
        restricted[list(imbalance_spec.restricted_classes)] = True
        r_mask = restricted[ds.labels]
        if r_mask.any():
            acc_r = float(100.0 * hits[r_mask].mean())
        if (~r_mask).any():
            acc_u = float(100.0 * hits[~r_mask].mean())
    return EvalResult(
        accuracy=float(100.0 * hits.mean()),
        per_class=tuple(per_class),
        n=ds.n,
        acc_restricted=acc_r,
        acc_unrestricted=acc_u,
    )


def save_model(model: LinearModel, path) -> None:
    """Binary checkpoint: magic "LMD1", u32 k, u32 d, f32 W row-major, f32 b."""
    payload = (
        MODEL_MAGIC
        + struct.pack("<II", model.k, model.d)
        + model.W.astype("<f4").tobytes()
        + model.b.astype("<f4").tobytes()
    )
    Path(path).write_bytes(payload)


def load_model(path) -> LinearModel:
    blob = Path(path).read_bytes()
    if len(blob) < 12 or blob[:4] != MODEL_MAGIC:
        raise FormatError(f"{path}: not a model checkpoint (bad magic)")
    k, d = struct.unpack_from("<II", blob, 4)
    expected = 12 + 4 * k * d + 4 * k
    if len(blob) != expected:
        raise CorruptionError(f"{path}: {len(blob)} bytes, expected {expected}")
    W = np.frombuffer(blob, dtype="<f4", count=k * d, offset=12).reshape(k, d)
    b = np.frombuffer(blob, dtype="<f4", count=k, offset=12 + 4 * k * d)
    return LinearModel(W.astype(np.float64), b.astype(np.float64))
