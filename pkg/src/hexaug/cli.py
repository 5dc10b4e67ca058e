"""Command-line front end.

Every subcommand resolves its settings in a fixed order: built-in
defaults, then a JSON config file (--config), then explicit flags.
``--verbose`` prints the resolved value and source of every setting.
Identical argv plus config file yields identical outputs: nothing here
consults the clock, the host name, or any implicit directory.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import __version__
from .augment import (GE3, METHODS, NONE, WITHIN_CLASS_METHODS, AugmentPlan,
                      apply_batch, augment_to_count, class_means,
                      ge3_augment_all)
from .classifier import (TrainConfig, evaluate, load_model, save_model,
                         train)
from .data import (DatasetManifest, import_csv, load_embeddings,
                   load_manifest, save_embeddings, stratified_split)
from .errors import HexaugError, ValidationError
from .experiment import (ExperimentSpec, ablate_naug, ablate_nfew,
                         emit_report, improvements, run_condition,
                         run_experiment, write_naug_csv, write_nfew_csv)
from .imbalance import ImbalanceSpec, make_imbalanced
from .synth import COVARIANCE_MODES, SynthSpec
from .synth import emit as synth_emit

JOBS_ENV = "HEXAUG_JOBS"
_RESERVED = ("config", "verbose")


class _Sub:
    """Subparser wrapper that keeps defaults out of argparse.

    argparse only reports what was typed (defaults are SUPPRESSed), so
    the merge order defaults < config < flags stays observable.
    """

    def __init__(self, parser: argparse.ArgumentParser):
        self.parser = parser
        self.defaults: dict = {}
        self.types: dict = {}

    def add(self, *names, default=None, **kwargs):
        action = self.parser.add_argument(*names, default=argparse.SUPPRESS, **kwargs)
        self.defaults[action.dest] = default
        self.types[action.dest] = kwargs.get("type")
        return action


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _n_aug_value(text: str):
    if text == "all":
        return "all"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'all', got {text!r}")


def _resolve(args: argparse.Namespace, sub: _Sub) -> tuple[dict, dict]:
    """Merge defaults, config file, and explicit flags (in that order)."""
    explicit = {k: v for k, v in vars(args).items()
                if k not in ("handler", "cmd")}
    config_path = explicit.pop("config", None)
    verbose = explicit.pop("verbose", False)
    merged = dict(sub.defaults)
    for key in _RESERVED:
        merged.pop(key, None)
    sources = {key: "default" for key in merged}
    if config_path is not None:
        try:
            with open(config_path) as fh:
                loaded = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file {config_path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ValidationError(f"config file {config_path} must hold a JSON object")
        for key, value in loaded.items():
            dest = key.replace("-", "_")
            if dest in _RESERVED or dest not in merged:
                raise ValidationError(f"unknown config key {key!r}")
            caster = sub.types.get(dest)
            if caster is not None and isinstance(value, str):
                try:
                    value = caster(value)
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise ValidationError(f"config key {key!r}: {exc}") from exc
            merged[dest] = value
            sources[dest] = "config"
    for key, value in explicit.items():
        merged[key] = value
        sources[key] = "flag"
    if verbose:
        print("resolution order: defaults < config file < flags", file=sys.stderr)
        for key in sorted(merged):
            print(f"  {key} = {merged[key]!r}  [{sources[key]}]", file=sys.stderr)
    merged["_sources"] = sources
    return merged, sources


def _require(a: dict, *keys: str) -> None:
    missing = [k for k in keys if a.get(k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise ValidationError(f"missing required setting(s): {flags}")


def _cli_echo(a: dict) -> dict:
    """Fully-resolved settings for report provenance, JSON-clean."""
    return {k: v for k, v in a.items() if not k.startswith("_")}


def _plan_from(a: dict, seed: int = 0) -> AugmentPlan:
    method = a["method"]
    n_aug = a.get("n_aug")
    if n_aug is None:
        n_aug = "all" if method == GE3 else 5
    return AugmentPlan(
        method=method,
        lam=a["lam"],
        uniform_bounds=(a["uniform_low"], a["uniform_high"]),
        gaussian_params=(a["gaussian_mean"], a["sigma"]),
        n_aug=n_aug,
        seed=seed,
        within_literal_form=a["literal_within"],
    )


def _train_cfg_from(a: dict, seed: int = 0) -> TrainConfig:
    return TrainConfig(
        learning_rate=a["lr"],
        batch_size=a["batch_size"],
        epochs=a["epochs"],
        l2=a["l2"],
        seed=seed,
        init_scale=a["init_scale"],
    )


def _resolve_jobs(value) -> int:
    if value is None:
        raw = os.environ.get(JOBS_ENV, "1")
        try:
            value = int(raw)
        except ValueError:
            raise ValidationError(f"{JOBS_ENV} must be an integer, got {raw!r}")
    if value < 1:
        raise ValidationError(f"jobs must be >= 1, got {value}")
    return value


def _add_plan_flags(sub: _Sub, with_seed: bool) -> None:
    sub.add("--method", type=str, choices=list(METHODS),
            help="augmentation operator (default: %s)" % GE3, default=GE3)
    sub.add("--n-aug", type=_n_aug_value, default=None,
            help="donor classes per target for ge3 ('all' = every other class, "
                 "the default); per-class volume multiplier for within-class "
                 "methods (default 5)")
    sub.add("--lam", type=float, default=0.5,
            help="extrapolation strength for within_extrapolate (default 0.5)")
    sub.add("--uniform-low", type=float, default=-0.1,
            help="uniform noise lower bound (default -0.1)")
    sub.add("--uniform-high", type=float, default=0.1,
            help="uniform noise upper bound (default 0.1)")
    sub.add("--gaussian-mean", type=float, default=0.0,
            help="gaussian noise mean (default 0.0)")
    sub.add("--sigma", type=float, default=0.1,
            help="gaussian noise standard deviation (default 0.1)")
    sub.add("--literal-within", action="store_true", default=False,
            help="use the lam*(xi+xj)-xi extrapolation variant instead of "
                 "lam*(xi-xj)+xi")
    if with_seed:
        sub.add("--seed", type=int, default=0, help="random seed (default 0)")


def _add_train_flags(sub: _Sub) -> None:
    sub.add("--lr", type=float, default=0.05, help="learning rate (default 0.05)")
    sub.add("--epochs", type=int, default=30, help="training epochs (default 30)")
    sub.add("--batch-size", type=int, default=64, help="minibatch size (default 64)")
    sub.add("--l2", type=float, default=1e-4,
            help="L2 penalty coefficient (default 1e-4)")
    sub.add("--init-scale", type=float, default=0.0,
            help="stddev of random weight init; 0 = zero init (default 0)")


def _add_experiment_flags(sub: _Sub) -> None:
    sub.add("--train", type=str, default=None, help="training EMB1 file")
    sub.add("--eval", type=str, default=None, help="evaluation EMB1 file")
    sub.add("--n-few", type=int, default=10,
            help="per-class size of restricted classes (default 10)")
    sub.add("--seeds", type=int, default=5,
            help="number of seeds, run as 0..N-1 (default 5)")
    sub.add("--report-dir", type=str, default="report",
            help="directory for report.csv / report.json (default report)")
    sub.add("--jobs", type=int, default=None,
            help=f"seed-level worker processes (default ${JOBS_ENV} or 1)")
    _add_plan_flags(sub, with_seed=False)
    _add_train_flags(sub)


def cmd_synth(a: dict) -> None:
    _require(a, "train_out", "eval_out")
    spec = SynthSpec(
        k=a["k"], d=a["d"], per_class=a["per_class"],
        mean_scale=a["mean_scale"], covariance_mode=a["cov"],
        within_scale=a["within_scale"], seed=a["seed"],
    )
    train_ds, eval_ds = synth_emit(spec, a["train_out"], a["eval_out"])
    print(f"wrote {a['train_out']} ({train_ds.n} rows) and "
          f"{a['eval_out']} ({eval_ds.n} rows), k={spec.k} d={spec.d}")


def cmd_import(a: dict) -> None:
    _require(a, "csv", "d", "out")
    ds = import_csv(a["csv"], a["d"])
    manifest = DatasetManifest(source=f"csv:{a['csv']}", class_names=ds.class_names)
    save_embeddings(ds, a["out"], manifest)
    print(f"imported {ds.n} rows, k={ds.k} d={ds.d} -> {a['out']}")


def cmd_split(a: dict) -> None:
    _require(a, "data", "train_out", "eval_out")
    ds = load_embeddings(a["data"])
    base = load_manifest(a["data"]) or DatasetManifest(source=str(a["data"]))
    train_ds, eval_ds = stratified_split(
        ds, a["per_class_train"], a["per_class_eval"], a["seed"])
    save_embeddings(train_ds, a["train_out"],
                    dataclasses.replace(base, split="train"))
    save_embeddings(eval_ds, a["eval_out"],
                    dataclasses.replace(base, split="eval"))
    print(f"split {ds.n} rows into {train_ds.n} train + {eval_ds.n} eval")


def cmd_imbalance(a: dict) -> None:
    _require(a, "data", "out")
    ds = load_embeddings(a["data"])
    imbalanced, spec = make_imbalanced(ds, a["n_few"], a["seed"])
    save_embeddings(imbalanced, a["out"], load_manifest(a["data"]))
    spec_path = a["spec_out"] or str(a["out"]) + ".imbalance.json"
    with open(spec_path, "w") as fh:
        json.dump(spec.to_json(), fh, indent=2)
    restricted = ",".join(str(c) for c in spec.restricted_classes)
    print(f"restricted classes [{restricted}] to {spec.n_few} rows each; "
          f"kept {imbalanced.n}/{ds.n} rows -> {a['out']}")


def cmd_augment(a: dict) -> None:
    _require(a, "data", "out")
    ds = load_embeddings(a["data"])
    stats = class_means(ds)
    plan = _plan_from(a, seed=a["seed"])
    if plan.method == NONE:
        raise ValidationError("method 'none' generates nothing; pick an operator")
    if plan.method == GE3:
        batch = ge3_augment_all(ds, stats, plan)
    else:
        target = a["target_per_class"]
        if target is None:
            if not isinstance(plan.n_aug, int):
                raise ValidationError(
                    f"{plan.method} needs an integer --n-aug or --target-per-class")
            target = plan.n_aug * int(stats.counts.max())
        batch = augment_to_count(ds, stats, plan, target)
    if a["emit"] == "batch":
        batch.save(a["out"])
        print(f"wrote {batch.m} generated rows -> {a['out']} (+provenance sidecar)")
    else:
        union = apply_batch(ds, batch)
        save_embeddings(union, a["out"], load_manifest(a["data"]))
        print(f"wrote {union.n} rows ({ds.n} real + {batch.m} generated) -> {a['out']}")


def cmd_train(a: dict) -> None:
    _require(a, "train", "model_out")
    ds = load_embeddings(a["train"])
    cfg = _train_cfg_from(a, seed=a["seed"])
    model, losses = train(ds, cfg)
    save_model(model, a["model_out"])
    final = losses[-1] if len(losses) else float("nan")
    print(f"trained on {ds.n} rows for {cfg.epochs} epochs, "
          f"final loss {final:.6f} -> {a['model_out']}")


def cmd_eval(a: dict) -> None:
    _require(a, "model", "data")
    model = load_model(a["model"])
    ds = load_embeddings(a["data"])
    spec = ImbalanceSpec.load(a["imbalance_spec"]) if a["imbalance_spec"] else None
    result = evaluate(model, ds, spec)
    print(f"accuracy {result.accuracy:.2f} on {result.n} rows")
    if result.acc_restricted is not None:
        print(f"restricted-class accuracy {result.acc_restricted:.2f}")
        print(f"unrestricted-class accuracy {result.acc_unrestricted:.2f}")
    if a["json_out"]:
        with open(a["json_out"], "w") as fh:
            json.dump(result.to_json(), fh, indent=2)


def _experiment_spec(a: dict) -> ExperimentSpec:
    _require(a, "train", "eval")
    if a["seeds"] < 1:
        raise ValidationError(f"--seeds must be >= 1, got {a['seeds']}")
    return ExperimentSpec(
        n_few=a["n_few"],
        plan=_plan_from(a),
        train_cfg=_train_cfg_from(a),
        seeds=tuple(range(a["seeds"])),
        train_path=a["train"],
        eval_path=a["eval"],
        jobs=_resolve_jobs(a["jobs"]),
    )


def _print_results(results) -> None:
    for r in results:
        extra = "" if r.n_aug is None else f" n_aug={r.n_aug}"
        print(f"method={r.method:<20} n_few={r.n_few:<4}{extra} "
              f"mean={r.mean:.2f} std={r.std:.2f}")
    for gain in improvements(results):
        print(f"improvement {gain['method']} - none: "
              f"{gain['mean_improvement']:+.2f} "
              f"(std {gain['std_improvement']:.2f})")


def cmd_experiment(a: dict) -> None:
    spec = _experiment_spec(a)
    results = run_experiment(spec)
    paths = emit_report(results, a["report_dir"], extra={"cli_config": _cli_echo(a)})
    _print_results(results)
    print(f"report: {paths['csv']}, {paths['json']}")


def cmd_ablate(a: dict) -> None:
    spec = _experiment_spec(a)
    values = a["values"]
    if isinstance(values, str):
        values = _int_list(values)
    if not values:
        raise ValidationError("--values must list at least one integer")
    if a["mode"] == "nfew":
        results = ablate_nfew(spec, values)
        table = os.path.join(a["report_dir"], "nfew.csv")
        writer = write_nfew_csv
    else:
        results = ablate_naug(spec, values)
        table = os.path.join(a["report_dir"], "naug.csv")
        writer = write_naug_csv
    paths = emit_report(results, a["report_dir"], extra={"cli_config": _cli_echo(a)})
    writer(results, table)
    _print_results(results)
    print(f"report: {paths['csv']}, {paths['json']}, {table}")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="hexaug",
        description="Hidden-space augmentation for imbalanced embedding classification.",
    )
    parser.add_argument("--version", action="version", version=f"hexaug {__version__}")
    subparsers = parser.add_subparsers(dest="cmd")
    subs: dict[str, _Sub] = {}

    def new(name: str, handler, help_text: str) -> _Sub:
        p = subparsers.add_parser(name, help=help_text, description=help_text)
        sub = _Sub(p)
        sub.add("--config", type=str, default=None,
                help="JSON file of settings; explicit flags win")
        sub.add("--verbose", action="store_true", default=False,
                help="print every resolved setting and its source")
        p.set_defaults(handler=handler)
        subs[name] = sub
        return sub

    s = new("synth", cmd_synth, "generate a synthetic Gaussian-cluster dataset pair")
    s.add("--k", type=int, default=8, help="number of classes (default 8)")
    s.add("--d", type=int, default=32, help="embedding width (default 32)")
    s.add("--per-class", type=int, default=200,
          help="rows per class in each split (default 200)")
    s.add("--cov", type=str, choices=list(COVARIANCE_MODES), default="shared",
          help="covariance mode (default shared)")
    s.add("--mean-scale", type=float, default=1.0,
          help="stddev of class-mean placement (default 1.0)")
    s.add("--within-scale", type=float, default=1.0,
          help="within-class spread multiplier (default 1.0)")
    s.add("--seed", type=int, default=0, help="random seed (default 0)")
    s.add("--train-out", type=str, default=None, help="output EMB1 path, train split")
    s.add("--eval-out", type=str, default=None, help="output EMB1 path, eval split")

    s = new("import", cmd_import, "convert a label,f0..fD-1 CSV into an EMB1 file")
    s.add("--csv", type=str, default=None, help="input CSV path (required)")
    s.add("--d", type=int, default=None,
          help="embedding width the CSV must carry (required)")
    s.add("--out", type=str, default=None, help="output EMB1 path (required)")

    s = new("split", cmd_split, "stratified train/eval split of an EMB1 file")
    s.add("--data", type=str, default=None, help="input EMB1 path")
    s.add("--train-out", type=str, default=None, help="output EMB1 path, train split")
    s.add("--eval-out", type=str, default=None, help="output EMB1 path, eval split")
    s.add("--per-class-train", type=int, default=100,
          help="train rows per class (default 100)")
    s.add("--per-class-eval", type=int, default=50,
          help="eval rows per class (default 50)")
    s.add("--seed", type=int, default=0, help="random seed (default 0)")

    s = new("imbalance", cmd_imbalance,
            "restrict a random half of the classes to n_few rows")
    s.add("--data", type=str, default=None, help="input EMB1 path")
    s.add("--out", type=str, default=None, help="output EMB1 path")
    s.add("--n-few", type=int, default=10,
          help="rows kept per restricted class (default 10)")
    s.add("--seed", type=int, default=0, help="random seed (default 0)")
    s.add("--spec-out", type=str, default=None,
          help="where to write the imbalance spec JSON "
               "(default <out>.imbalance.json)")

    s = new("augment", cmd_augment, "generate synthetic rows for an EMB1 file")
    s.add("--data", type=str, default=None, help="input EMB1 path")
    s.add("--out", type=str, default=None, help="output EMB1 path")
    _add_plan_flags(s, with_seed=True)
    s.add("--target-per-class", type=int, default=None,
          help="within-class generation target; overrides n_aug * max count")
    s.add("--emit", type=str, choices=["union", "batch"], default="union",
          help="write real+generated rows, or only the generated batch "
               "with provenance (default union)")

    s = new("train", cmd_train, "fit the linear softmax probe")
    s.add("--train", type=str, default=None, help="training EMB1 path")
    s.add("--model-out", type=str, default=None, help="output model path")
    _add_train_flags(s)
    s.add("--seed", type=int, default=0, help="random seed (default 0)")

    s = new("eval", cmd_eval, "score a trained model on an EMB1 file")
    s.add("--model", type=str, default=None, help="model path")
    s.add("--data", type=str, default=None, help="evaluation EMB1 path")
    s.add("--imbalance-spec", type=str, default=None,
          help="imbalance spec JSON for restricted/unrestricted accuracy")
    s.add("--json-out", type=str, default=None, help="write the result as JSON")

    s = new("experiment", cmd_experiment,
            "seeded imbalance + augmentation + training sweep with baseline")
    _add_experiment_flags(s)

    s = new("ablate", cmd_ablate, "sweep n_few or generation volume")
    _add_experiment_flags(s)
    s.add("--mode", type=str, choices=["nfew", "naug"], default="nfew",
          help="which knob to sweep (default nfew)")
    s.add("--values", type=_int_list, default=None,
          help="comma-separated sweep values, e.g. 5,10,20,40")

    return parser, subs


def main(argv=None) -> int:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "handler", None) is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        settings, _ = _resolve(args, subs[args.cmd])
        args.handler(settings)
    except HexaugError as exc:
        print(f"hexaug {args.cmd}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"hexaug {args.cmd}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
