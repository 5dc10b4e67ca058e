"""Hidden-space augmentation toolkit for imbalanced embedding classification.

The package generates training vectors directly in an encoder's output
space. Its centerpiece moves a vector's within-class deviation from a
well-populated donor class onto the mean of an under-populated target
class; classical within-class operators (interpolation, extrapolation,
linear deltas, noise) are included as baselines, together with a linear
softmax probe, an imbalance protocol, and a seeded experiment harness.
"""

__version__ = "0.1.0"

from .augment import (GAUSSIAN_NOISE, GE3, INTERPOLATE, LINEAR_DELTA,
                      METHODS, NONE, UNIFORM_NOISE, WITHIN_CLASS_METHODS,
                      WITHIN_EXTRAPOLATE, AugmentedBatch, AugmentPlan,
                      ClassStats, apply_batch, augment_to_count, class_means,
                      ge3_augment_all, ge3_extrapolate, interpolate_pair,
                      linear_delta, noise_augment, within_extrapolate_pair)
from .classifier import (EvalResult, LinearModel, TrainConfig, evaluate,
                         forward_logits, load_model, loss_and_grad, predict,
                         save_model, softmax, train)
from .data import (DatasetManifest, EmbeddingDataset, import_csv,
                   load_embeddings, load_manifest, save_embeddings,
                   stratified_split)
from .errors import (CapacityError, CorruptionError, FormatError, HexaugError,
                     PlanError, ShapeError, StatsError, TrainingError,
                     ValidationError)
from .experiment import (ExperimentSpec, RunResult, SeedOutcome, ablate_naug,
                         ablate_nfew, emit_report, improvements,
                         run_condition, run_experiment, run_seed, stage_seed,
                         write_naug_csv, write_nfew_csv)
from .imbalance import ImbalanceSpec, make_imbalanced, upsample_balance
from .synth import SynthSpec, generate

__all__ = [
    "__version__",
    "AugmentPlan", "AugmentedBatch", "ClassStats",
    "GE3", "INTERPOLATE", "WITHIN_EXTRAPOLATE", "LINEAR_DELTA",
    "UNIFORM_NOISE", "GAUSSIAN_NOISE", "NONE", "METHODS",
    "WITHIN_CLASS_METHODS",
    "apply_batch", "augment_to_count", "class_means", "ge3_augment_all",
    "ge3_extrapolate", "interpolate_pair", "linear_delta", "noise_augment",
    "within_extrapolate_pair",
    "EvalResult", "LinearModel", "TrainConfig", "evaluate", "forward_logits",
    "load_model", "loss_and_grad", "predict", "save_model", "softmax",
    "train",
    "DatasetManifest", "EmbeddingDataset", "import_csv", "load_embeddings",
    "load_manifest", "save_embeddings", "stratified_split",
    "HexaugError", "FormatError", "CorruptionError", "ValidationError",
    "CapacityError", "PlanError", "StatsError", "ShapeError",
    "TrainingError",
    "ExperimentSpec", "RunResult", "SeedOutcome", "ablate_naug",
    "ablate_nfew", "emit_report", "improvements", "run_condition",
    "run_experiment", "run_seed", "stage_seed", "write_naug_csv",
    "write_nfew_csv",
    "ImbalanceSpec", "make_imbalanced", "upsample_balance",
    "SynthSpec", "generate",
]
