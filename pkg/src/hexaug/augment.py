"""Hidden-space augmentation operators and generation-volume policies.

Two families of operators act on embedding vectors:

* ``ge3`` re-anchors a source-class example's offset from its class mean
  at another class's mean, extrapolating one class's within-class
  distribution onto another (cross-class extrapolation).
* Within-class operators synthesize rows from examples of a single
  class: pairwise interpolation, pairwise extrapolation, adding the
  delta of a pair to a third example, and element-wise uniform or
  Gaussian noising.

All operators are pure functions of their inputs and a seed; generation
is deterministic and parallel-safe because each target class draws from
its own random stream derived from (seed, class index).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import EmbeddingDataset, save_embeddings
from .errors import CapacityError, PlanError, ShapeError, StatsError

GE3 = "ge3"
INTERPOLATE = "interpolate"
WITHIN_EXTRAPOLATE = "within_extrapolate"
LINEAR_DELTA = "linear_delta"
UNIFORM_NOISE = "uniform_noise"
GAUSSIAN_NOISE = "gaussian_noise"
NONE = "none"

METHODS = (GE3, INTERPOLATE, WITHIN_EXTRAPOLATE, LINEAR_DELTA,
           UNIFORM_NOISE, GAUSSIAN_NOISE, NONE)
WITHIN_CLASS_METHODS = (INTERPOLATE, WITHIN_EXTRAPOLATE, LINEAR_DELTA,
                        UNIFORM_NOISE, GAUSSIAN_NOISE)


@dataclass(frozen=True)
class ClassStats:
    """Per-class example counts and mean vectors.

    Means are accumulated in float64 regardless of the dataset width.
    """

    counts: np.ndarray  # (k,) int64
    means: np.ndarray   # (k, d) float64

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        means = np.asarray(self.means, dtype=np.float64)
        if means.ndim != 2 or counts.ndim != 1 or counts.shape[0] != means.shape[0]:
            raise ShapeError("counts and means disagree on class count")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "means", means)

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def d(self) -> int:
        return self.means.shape[1]


@dataclass(frozen=True)
class AugmentPlan:
    """Which operator to run and with what parameters.

    n_aug is the volume knob: for ``ge3`` it is the number of donor
    classes per target ("all" = every other class); for within-class
    methods it is the multiplier on the largest per-class count that
    defines the per-class generation target, and must be an integer.
    """

    method: str
    lam: float = 0.5
    uniform_bounds: tuple[float, float] = (-0.1, 0.1)
    gaussian_params: tuple[float, float] = (0.0, 0.1)
    n_aug: int | str = "all"
    seed: int = 0
    within_literal_form: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise PlanError(f"unknown method {self.method!r}; choose from {METHODS}")
        a, b = self.uniform_bounds
        if not (np.isfinite(a) and np.isfinite(b) and a <= b):
            raise PlanError(f"uniform bounds must satisfy a <= b, got ({a}, {b})")
        mu, sigma = self.gaussian_params
        if not (np.isfinite(mu) and sigma > 0):
            raise PlanError(f"gaussian sigma must be > 0, got {sigma}")
        if not np.isfinite(self.lam):
            raise PlanError("lambda must be finite")
        if isinstance(self.n_aug, str):
            if self.n_aug != "all":
                raise PlanError(f"n_aug must be a positive integer or 'all', got {self.n_aug!r}")
        elif self.n_aug < 1:
            raise PlanError(f"n_aug must be >= 1, got {self.n_aug}")


@dataclass(frozen=True)
class AugmentedBatch:
    """Synthetic rows plus per-row provenance into the source dataset.

    source_rows has one column per example the operator consumed
    (1 for ge3/noise, 2 for pairs, 3 for triples); indices are global
    row numbers in the originating dataset.
    """

    vectors: np.ndarray       # (m, d) float32
    labels: np.ndarray        # (m,) int64
    k: int
    method: str
    seed: int
    source_class: np.ndarray  # (m,) int64
    source_rows: np.ndarray   # (m, r) int64

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    def to_dataset(self, class_names: tuple[str, ...] = ()) -> EmbeddingDataset:
        return EmbeddingDataset(self.vectors, self.labels, self.k, class_names)

    def save(self, path) -> None:
        """EMB1 file plus a ``<file>.provenance.json`` sidecar."""
        save_embeddings(self.to_dataset(), path)
        sidecar = {
            "method": self.method,
            "seed": int(self.seed),
            "source_class": [int(c) for c in self.source_class],
            "source_rows": [[int(r) for r in row] for row in self.source_rows],
        }
        Path(str(path) + ".provenance.json").write_text(json.dumps(sidecar))


def _empty_batch(d: int, k: int, method: str, seed: int, arity: int) -> AugmentedBatch:
    return AugmentedBatch(
        np.zeros((0, d), dtype=np.float32),
        np.zeros(0, dtype=np.int64),
        k, method, seed,
        np.zeros(0, dtype=np.int64),
        np.zeros((0, arity), dtype=np.int64),
    )


def class_means(ds: EmbeddingDataset) -> ClassStats:
    """Exact per-class arithmetic means, accumulated in float64."""
    counts = ds.class_counts()
    for c in range(ds.k):
        if counts[c] == 0:
            raise StatsError(
                f"class {c} ({ds.class_names[c]}) has no examples; cannot compute its mean"
            )
    means = np.empty((ds.k, ds.d), dtype=np.float64)
    for c in range(ds.k):
        means[c] = ds.vectors[ds.labels == c].astype(np.float64).mean(axis=0)
    return ClassStats(counts, means)


def _check_vector(x, d: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError(f"expected a 1-D vector, got shape {arr.shape}")
    if d is not None and arr.shape[0] != d:
        raise ShapeError(f"dimension mismatch: {arr.shape[0]} != {d}")
    return arr


def ge3_extrapolate(x, stats: ClassStats, source: int, target: int) -> np.ndarray:
    """Re-anchor x's deviation from its class mean at the target mean.

    Returns x - mean[source] + mean[target], computed in float64 and
    narrowed to float32.
    """
    if not 0 <= source < stats.k:
        raise IndexError(f"source class {source} outside [0, {stats.k})")
    if not 0 <= target < stats.k:
        raise IndexError(f"target class {target} outside [0, {stats.k})")
    xv = _check_vector(x, stats.d)
    return (xv - stats.means[source] + stats.means[target]).astype(np.float32)


def _donor_classes(k: int, target: int, plan: AugmentPlan) -> np.ndarray:
    others = np.array([s for s in range(k) if s != target], dtype=np.int64)
    if plan.n_aug == "all":
        return others
    if plan.n_aug > k - 1:
        raise PlanError(f"n_aug={plan.n_aug} exceeds the {k - 1} available donor classes")
    rng = np.random.default_rng((plan.seed, target))
    return np.sort(rng.choice(others, size=plan.n_aug, replace=False))


def ge3_augment_all(ds: EmbeddingDataset, stats: ClassStats, plan: AugmentPlan) -> AugmentedBatch:
    """Cross-class extrapolation for every (donor, target) pair in the plan.

    For each target class, every example of every chosen donor class is
    extrapolated and labeled with the target. With donors "all" the batch
    has (k-1) * n rows, so the union with the original dataset is exactly
    k times the original size.
    """
    if plan.method != GE3:
        raise PlanError(f"ge3_augment_all got plan method {plan.method!r}")
    if stats.k != ds.k or stats.d != ds.d:
        raise ShapeError("stats shape disagrees with dataset")
    vec_chunks: list[np.ndarray] = []
    lab_chunks: list[np.ndarray] = []
    src_cls: list[np.ndarray] = []
    src_rows: list[np.ndarray] = []
    for target in range(ds.k):
        for source in np.asarray(_donor_classes(ds.k, target, plan)):
            rows = ds.class_rows(int(source))
            if rows.size == 0:
                continue
            shifted = (
                ds.vectors[rows].astype(np.float64)
                - stats.means[source]
                + stats.means[target]
            ).astype(np.float32)
            vec_chunks.append(shifted)
            lab_chunks.append(np.full(rows.size, target, dtype=np.int64))
            src_cls.append(np.full(rows.size, source, dtype=np.int64))
            src_rows.append(rows.astype(np.int64))
    if not vec_chunks:
        return _empty_batch(ds.d, ds.k, GE3, plan.seed, 1)
    return AugmentedBatch(
        np.concatenate(vec_chunks, axis=0),
        np.concatenate(lab_chunks),
        ds.k, GE3, plan.seed,
        np.concatenate(src_cls),
        np.concatenate(src_rows)[:, None],
    )


def interpolate_pair(xi, xj) -> np.ndarray:
    """Exact midpoint of two same-class representations."""
    a = _check_vector(xi)
    b = _check_vector(xj, a.shape[0])
    return (0.5 * (a + b)).astype(np.float32)


def within_extrapolate_pair(xi, xj, lam: float = 0.5, literal_form: bool = False) -> np.ndarray:
    """Extrapolate along the line through two same-class examples.

    The default form is lam*(xi - xj) + xi, which pushes past xi away
    from xj. literal_form=True selects lam*(xi + xj) - xi instead (a
    sum-based variant kept for fidelity studies; with lam=0.5 it
    collapses to half the pair difference, near the origin).
    """
    a = _check_vector(xi)
    b = _check_vector(xj, a.shape[0])
    if literal_form:
        out = lam * (a + b) - a
    else:
        out = lam * (a - b) + a
    return out.astype(np.float32)


def linear_delta(xi, xj, xk) -> np.ndarray:
    """Add the difference of two same-class examples to a third."""
    a = _check_vector(xi)
    b = _check_vector(xj, a.shape[0])
    c = _check_vector(xk, a.shape[0])
    return ((a - b) + c).astype(np.float32)


def noise_augment(x, plan: AugmentPlan, rng: np.random.Generator) -> np.ndarray:
    """Add element-wise i.i.d. uniform or Gaussian noise to x."""
    xv = _check_vector(x)
    if plan.method == UNIFORM_NOISE:
        a, b = plan.uniform_bounds
        noise = rng.uniform(a, b, size=xv.shape[0])
    elif plan.method == GAUSSIAN_NOISE:
        mu, sigma = plan.gaussian_params
        noise = rng.normal(mu, sigma, size=xv.shape[0])
    else:
        raise PlanError(f"noise_augment got plan method {plan.method!r}")
    return (xv + noise).astype(np.float32)


def _distinct_pairs(rng: np.random.Generator, nc: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    i = rng.integers(0, nc, size=m)
    j = rng.integers(0, nc - 1, size=m)
    j[j >= i] += 1
    return i, j


def augment_to_count(
    ds: EmbeddingDataset,
    stats: ClassStats,
    plan: AugmentPlan,
    target_per_class: int,
) -> AugmentedBatch:
    """Generate within-class rows until every class reaches the target count.

    Source examples are drawn uniformly with replacement from each
    class (pairs and the delta pair are always two distinct examples).
    A class with a single example cannot feed a pair or triple operator
    and raises a capacity error.
    """
    if plan.method not in WITHIN_CLASS_METHODS:
        raise PlanError(
            f"augment_to_count requires a within-class method, got {plan.method!r}"
        )
    arity = {INTERPOLATE: 2, WITHIN_EXTRAPOLATE: 2, LINEAR_DELTA: 3,
             UNIFORM_NOISE: 1, GAUSSIAN_NOISE: 1}[plan.method]
    counts = stats.counts
    if counts.shape[0] != ds.k:
        raise ShapeError("stats class count disagrees with dataset")
    for c in range(ds.k):
        if counts[c] > target_per_class:
            raise PlanError(
                f"class {c} already has {counts[c]} examples, above target {target_per_class}"
            )
    vec_chunks: list[np.ndarray] = []
    lab_chunks: list[np.ndarray] = []
    src_cls: list[np.ndarray] = []
    src_rows: list[np.ndarray] = []
    for c in range(ds.k):
        need = int(target_per_class - counts[c])
        if need == 0:
            continue
        rows = ds.class_rows(c)
        nc = rows.size
        if nc == 0:
            raise CapacityError(f"class {c} is empty")
        if nc == 1 and arity > 1:
            raise CapacityError(
                f"class {c} ({ds.class_names[c]}) has a single example; "
                f"{plan.method} needs at least two distinct examples"
            )
        rng = np.random.default_rng((plan.seed, c))
        X = ds.vectors[rows].astype(np.float64)
        if plan.method == INTERPOLATE:
            i, j = _distinct_pairs(rng, nc, need)
            out = 0.5 * (X[i] + X[j])
            picked = np.stack([rows[i], rows[j]], axis=1)
        elif plan.method == WITHIN_EXTRAPOLATE:
            i, j = _distinct_pairs(rng, nc, need)
            if plan.within_literal_form:
                out = plan.lam * (X[i] + X[j]) - X[i]
            else:
                out = plan.lam * (X[i] - X[j]) + X[i]
            picked = np.stack([rows[i], rows[j]], axis=1)
        elif plan.method == LINEAR_DELTA:
            i, j = _distinct_pairs(rng, nc, need)
            kk = rng.integers(0, nc, size=need)
            out = (X[i] - X[j]) + X[kk]
            picked = np.stack([rows[i], rows[j], rows[kk]], axis=1)
        else:
            i = rng.integers(0, nc, size=need)
            if plan.method == UNIFORM_NOISE:
                a, b = plan.uniform_bounds
                noise = rng.uniform(a, b, size=(need, ds.d))
            else:
                mu, sigma = plan.gaussian_params
                noise = rng.normal(mu, sigma, size=(need, ds.d))
            out = X[i] + noise
            picked = rows[i][:, None]
        vec_chunks.append(out.astype(np.float32))
        lab_chunks.append(np.full(need, c, dtype=np.int64))
        src_cls.append(np.full(need, c, dtype=np.int64))
        src_rows.append(picked.astype(np.int64))
    if not vec_chunks:
        return _empty_batch(ds.d, ds.k, plan.method, plan.seed, arity)
    return AugmentedBatch(
        np.concatenate(vec_chunks, axis=0),
        np.concatenate(lab_chunks),
        ds.k, plan.method, plan.seed,
        np.concatenate(src_cls),
        np.concatenate(src_rows, axis=0),
    )


def apply_batch(ds: EmbeddingDataset, batch: AugmentedBatch) -> EmbeddingDataset:
    """Union of the original dataset and an augmented batch."""
    if batch.k != ds.k:
        raise ShapeError(f"batch k={batch.k} disagrees with dataset k={ds.k}")
    if batch.m == 0:
        return ds
    return ds.with_rows(batch.vectors, batch.labels)
