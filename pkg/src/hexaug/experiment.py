"""Experiment protocol: imbalance, augmentation, training, aggregation.

One *condition* is (augmentation plan, n_few) evaluated over a list of
seeds. Each seed re-randomizes the whole pipeline: which classes are
restricted, which rows survive, the augmentation draws, the upsampling
draws, and the training shuffle. Per-stage seeds are derived from the
experiment seed so the stages consume independent random streams.

Pipeline order per seed: restrict -> per-class stats -> augment ->
upsample residual imbalance -> train -> evaluate. Upsampling last means
the balanced baseline and the augmented conditions go through the same
code path; with fully cross-class-extrapolated data it is a no-op.

Reported spreads are population standard deviations over seeds. The
evaluation set is held fixed across conditions and seeds.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .augment import (GE3, NONE, WITHIN_CLASS_METHODS, AugmentPlan,
                      apply_batch, augment_to_count, class_means,
                      ge3_augment_all)
from .classifier import TrainConfig, evaluate, train
from .data import EmbeddingDataset, load_embeddings
from .errors import PlanError, ShapeError, ValidationError
from .imbalance import ImbalanceSpec, make_imbalanced, upsample_balance

PIPELINE_ORDER = "restrict -> class-stats -> augment -> upsample-residual -> train"

_STAGE_IMBALANCE = 0
_STAGE_AUGMENT = 1
_STAGE_UPSAMPLE = 2
_STAGE_TRAIN = 3

CSV_COLUMNS = ("method", "n_few", "n_aug", "seed", "accuracy",
               "acc_restricted", "acc_unrestricted", "std")


def stage_seed(seed: int, stage: int) -> int:
    """Independent integer sub-seed for one pipeline stage."""
    return int(np.random.SeedSequence([seed, stage]).generate_state(1)[0])


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one condition."""

    n_few: int
    plan: AugmentPlan
    train_cfg: TrainConfig = TrainConfig()
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    train_path: str | None = None
    eval_path: str | None = None
    report_dir: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if not self.seeds:
            raise ValidationError("seeds must be non-empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValidationError(f"seeds must be distinct, got {self.seeds}")
        if self.jobs < 1:
            raise ValidationError("jobs must be >= 1")


@dataclass(frozen=True)
class SeedOutcome:
    seed: int
    accuracy: float
    acc_restricted: float | None
    acc_unrestricted: float | None
    per_class: tuple[float, ...]
    imbalance: ImbalanceSpec


@dataclass(frozen=True)
class RunResult:
    """Per-seed accuracies with aggregate mean and population std."""

    method: str
    n_few: int
    n_aug: int | str | None
    seeds: tuple[int, ...]
    outcomes: tuple[SeedOutcome, ...]
    provenance: dict

    @property
    def accuracies(self) -> tuple[float, ...]:
        return tuple(o.accuracy for o in self.outcomes)

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        return float(np.std(self.accuracies))

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "n_few": self.n_few,
            "n_aug": self.n_aug,
            "seeds": list(self.seeds),
            "accuracies": list(self.accuracies),
            "mean": self.mean,
            "std": self.std,
            "per_seed": [
                {
                    "seed": o.seed,
                    "accuracy": o.accuracy,
                    "acc_restricted": o.acc_restricted,
                    "acc_unrestricted": o.acc_unrestricted,
                    "per_class": [None if np.isnan(v) else v for v in o.per_class],
                    "imbalance": o.imbalance.to_json(),
                }
                for o in self.outcomes
            ],
            "provenance": self.provenance,
        }


def run_seed(
    train_ds: EmbeddingDataset,
    eval_ds: EmbeddingDataset,
    n_few: int,
    plan: AugmentPlan,
    cfg: TrainConfig,
    seed: int,
) -> SeedOutcome:
    """One end-to-end pipeline pass for a single seed."""
    working, imb_spec = make_imbalanced(train_ds, n_few, stage_seed(seed, _STAGE_IMBALANCE))
    if plan.method != NONE:
        stats = class_means(working)
        seeded_plan = replace(plan, seed=stage_seed(seed, _STAGE_AUGMENT))
        if plan.method == GE3:
            batch = ge3_augment_all(working, stats, seeded_plan)
        elif plan.method in WITHIN_CLASS_METHODS:
            if not isinstance(plan.n_aug, int):
                raise PlanError(
                    f"{plan.method} needs an integer n_aug multiplier, got {plan.n_aug!r}"
                )
            target = plan.n_aug * int(stats.counts.max())
            batch = augment_to_count(working, stats, seeded_plan, target)
        else:
            raise PlanError(f"cannot run experiment with method {plan.method!r}")
        working = apply_batch(working, batch)
    working = upsample_balance(working, stage_seed(seed, _STAGE_UPSAMPLE))
    model, _ = train(working, replace(cfg, seed=stage_seed(seed, _STAGE_TRAIN)))
    ev = evaluate(model, eval_ds, imb_spec)
    return SeedOutcome(
        seed=seed,
        accuracy=ev.accuracy,
        acc_restricted=ev.acc_restricted,
        acc_unrestricted=ev.acc_unrestricted,
        per_class=ev.per_class,
        imbalance=imb_spec,
    )


def _seed_task(args) -> SeedOutcome:
    return run_seed(*args)


def _provenance(spec: ExperimentSpec, plan: AugmentPlan) -> dict:
    from . import kernels

    return {
        "version": __version__,
        "numpy": np.__version__,
        "kernel_backend": kernels.BACKEND,
        "pipeline_order": PIPELINE_ORDER,
        "train_path": spec.train_path,
        "eval_path": spec.eval_path,
        "plan": {
            "method": plan.method,
            "lam": plan.lam,
            "uniform_bounds": list(plan.uniform_bounds),
            "gaussian_params": list(plan.gaussian_params),
            "n_aug": plan.n_aug,
            "within_literal_form": plan.within_literal_form,
        },
        "train_cfg": spec.train_cfg.to_json(),
        "n_few": spec.n_few,
        "seeds": list(spec.seeds),
    }


def run_condition(
    spec: ExperimentSpec,
    train_ds: EmbeddingDataset | None = None,
    eval_ds: EmbeddingDataset | None = None,
    plan: AugmentPlan | None = None,
) -> RunResult:
    """Evaluate one condition over all seeds (optionally in parallel).

    Results are independent of the worker count: each seed is a closed
    deterministic job and rows are assembled in seed order.
    """
    plan = spec.plan if plan is None else plan
    if train_ds is None:
        if spec.train_path is None:
            raise ValidationError("no training dataset provided")
        train_ds = load_embeddings(spec.train_path)
    if eval_ds is None:
        if spec.eval_path is None:
            raise ValidationError("no evaluation dataset provided")
        eval_ds = load_embeddings(spec.eval_path)
    if train_ds.d != eval_ds.d or train_ds.k != eval_ds.k:
        raise ShapeError(
            f"train (d={train_ds.d}, k={train_ds.k}) and eval "
            f"(d={eval_ds.d}, k={eval_ds.k}) disagree"
        )
    tasks = [(train_ds, eval_ds, spec.n_few, plan, spec.train_cfg, s)
             for s in spec.seeds]
    if spec.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            outcomes = list(pool.map(_seed_task, tasks))
    else:
        outcomes = [_seed_task(t) for t in tasks]
    return RunResult(
        method=plan.method,
        n_few=spec.n_few,
        n_aug=None if plan.method == NONE else plan.n_aug,
        seeds=spec.seeds,
        outcomes=tuple(outcomes),
        provenance=_provenance(spec, plan),
    )


def run_experiment(
    spec: ExperimentSpec,
    train_ds: EmbeddingDataset | None = None,
    eval_ds: EmbeddingDataset | None = None,
) -> list[RunResult]:
    """Baseline condition plus the spec's condition (if any).

    The upsampling-only baseline always runs, so every augmented result
    ships with its paired improvement number.
    """
    if train_ds is None and spec.train_path is not None:
        train_ds = load_embeddings(spec.train_path)
    if eval_ds is None and spec.eval_path is not None:
        eval_ds = load_embeddings(spec.eval_path)
    results = [run_condition(spec, train_ds, eval_ds, plan=AugmentPlan(NONE))]
    if spec.plan.method != NONE:
        results.append(run_condition(spec, train_ds, eval_ds))
    if spec.report_dir is not None:
        emit_report(results, spec.report_dir)
    return results


def improvements(results: list[RunResult]) -> list[dict]:
    """Paired per-seed improvement of each condition over the baseline."""
    base = next((r for r in results if r.method == NONE), None)
    out = []
    if base is None:
        return out
    for r in results:
        if r.method == NONE:
            continue
        if r.seeds != base.seeds:
            continue
        diffs = [a - b for a, b in zip(r.accuracies, base.accuracies)]
        out.append({
            "method": r.method,
            "n_few": r.n_few,
            "n_aug": r.n_aug,
            "mean_improvement": float(np.mean(diffs)),
            "std_improvement": float(np.std(diffs)),
            "per_seed": diffs,
        })
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def result_rows(result: RunResult) -> list[dict]:
    """Per-seed rows plus one "agg" pseudo-seed row carrying mean/std."""
    rows = []
    for o in result.outcomes:
        rows.append({
            "method": result.method,
            "n_few": result.n_few,
            "n_aug": "" if result.n_aug is None else result.n_aug,
            "seed": o.seed,
            "accuracy": o.accuracy,
            "acc_restricted": o.acc_restricted,
            "acc_unrestricted": o.acc_unrestricted,
            "std": None,
        })
    accs_r = [o.acc_restricted for o in result.outcomes]
    accs_u = [o.acc_unrestricted for o in result.outcomes]
    rows.append({
        "method": result.method,
        "n_few": result.n_few,
        "n_aug": "" if result.n_aug is None else result.n_aug,
        "seed": "agg",
        "accuracy": result.mean,
        "acc_restricted": (float(np.mean([v for v in accs_r if v is not None]))
                           if any(v is not None for v in accs_r) else None),
        "acc_unrestricted": (float(np.mean([v for v in accs_u if v is not None]))
                             if any(v is not None for v in accs_u) else None),
        "std": result.std,
    })
    return rows


def emit_report(results: list[RunResult], out_dir, extra: dict | None = None) -> dict:
    """Write report.csv (per-seed + aggregate rows) and report.json.

    Output is byte-identical across reruns of the same spec: nothing
    time- or host-dependent is recorded. `extra` entries (e.g. the
    resolved command-line configuration) land in the JSON bundle.
    """
    if not results:
        raise ValidationError("no results to report")
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "report.csv")
    json_path = os.path.join(out_dir, "report.json")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for result in results:
            for row in result_rows(result):
                writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    bundle = {
        "conditions": [r.to_json() for r in results],
        "improvements": improvements(results),
    }
    if extra:
        bundle.update(extra)
    with open(json_path, "w") as fh:
        json.dump(bundle, fh, indent=2)
    return {"csv": csv_path, "json": json_path}


def ablate_nfew(
    spec: ExperimentSpec,
    values: list[int],
    plans: list[AugmentPlan] | None = None,
    train_ds: EmbeddingDataset | None = None,
    eval_ds: EmbeddingDataset | None = None,
) -> list[RunResult]:
    """One result per (plan, n_few value); baseline plan included by default."""
    if plans is None:
        plans = [AugmentPlan(NONE)]
        if spec.plan.method != NONE:
            plans.append(spec.plan)
    if train_ds is None and spec.train_path is not None:
        train_ds = load_embeddings(spec.train_path)
    if eval_ds is None and spec.eval_path is not None:
        eval_ds = load_embeddings(spec.eval_path)
    results = []
    for plan in plans:
        for value in values:
            cond = replace(spec, n_few=value)
            results.append(run_condition(cond, train_ds, eval_ds, plan=plan))
    return results


def write_nfew_csv(results: list[RunResult], path) -> None:
    """Plot-ready ablation table: method,n_few,mean,std."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "n_few", "mean", "std"])
        for r in results:
            writer.writerow([r.method, r.n_few, _fmt(r.mean), _fmt(r.std)])


def ablate_naug(
    spec: ExperimentSpec,
    values: list[int],
    train_ds: EmbeddingDataset | None = None,
    eval_ds: EmbeddingDataset | None = None,
) -> list[RunResult]:
    """Baseline plus one result per generation-volume value.

    For cross-class extrapolation the value is the donor-class count;
    for within-class methods it is the multiplier on the largest class.
    """
    if spec.plan.method == NONE:
        raise PlanError("volume ablation needs an augmentation method")
    if train_ds is None and spec.train_path is not None:
        train_ds = load_embeddings(spec.train_path)
    if eval_ds is None and spec.eval_path is not None:
        eval_ds = load_embeddings(spec.eval_path)
    results = [run_condition(spec, train_ds, eval_ds, plan=AugmentPlan(NONE))]
    for value in values:
        plan = replace(spec.plan, n_aug=value)
        results.append(run_condition(spec, train_ds, eval_ds, plan=plan))
    return results


def write_naug_csv(results: list[RunResult], path) -> None:
    """Plot-ready volume table with improvement over the bundled baseline."""
    base = next((r for r in results if r.method == NONE), None)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "n_aug", "mean", "std", "improvement"])
        for r in results:
            if r.method == NONE:
                continue
            impr = "" if base is None else _fmt(r.mean - base.mean)
            writer.writerow([r.method, r.n_aug, _fmt(r.mean), _fmt(r.std), impr])
