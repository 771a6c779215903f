"""Experiment orchestration shared by the command line and the test suite.

Everything here is deterministic given its arguments.  Artifacts carry no
timestamps, JSON objects are emitted with a fixed key order, and floats are
serialized with full round-trip precision, so repeating a run with the same
inputs produces byte-identical files.

Artifact layout for a single training run (``run_training`` with ``outdir``):

* ``config.json`` -- the fully resolved experiment configuration
* ``checkpoint.json`` -- trained parameters plus the fitted standardizer
* ``history.csv`` -- per-epoch loss components (or ``history_<net>.csv``
  per stage for the sequential baseline)
* ``eval.json`` -- metric report on the held-out test split
* ``scatter.csv`` -- optional (true, predicted) thickness pairs
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from .data import (
    PixelDataset,
    SplitPlan,
    Standardizer,
    kfold_indices,
    split_indices,
)
from .engine import TrainConfig, dumps_deterministic, load_checkpoint, save_checkpoint
from .errors import ConfigError, DataError
from .metrics import METRIC_COLUMNS, EvalReport, evaluate_predictions
from .models import (
    ArchitectureSpec,
    LossTargets,
    Model,
    Predictions,
    TrainResult,
    build_model,
    history_csv,
    predictions_from_outputs,
    train_model,
)

CONFIG_NAME = "config.json"
CHECKPOINT_NAME = "checkpoint.json"
EVAL_NAME = "eval.json"
SCATTER_NAME = "scatter.csv"

#: metrics extracted from each fold's report for model selection:
#: (metric name, lower is better, EvalReport attribute)
KFOLD_METRICS = (
    ("ACC_bi", False, "acc_bi"),
    ("AUPRC_w", False, "auprc_weighted"),
    ("MSE", True, "mse_all"),
    ("R2", False, "r2_all"),
)


def _check_feature_dim(ds: PixelDataset, spec: ArchitectureSpec) -> None:
    if ds.feature_dim != spec.input_dim:
        raise ConfigError(
            f"dataset provides {ds.feature_dim} features but the "
            f"architecture expects input_dim={spec.input_dim}")


def evaluate_model(model: Model, standardizer: Standardizer,
                   ds: PixelDataset) -> tuple[Predictions, EvalReport]:
    """Standardize, run inference, and score against the labels."""
    _check_feature_dim(ds, model.spec)
    feats = standardizer.transform(ds.feature_matrix())
    outputs = model.forward(feats, train_mode=False)
    pred = predictions_from_outputs(outputs, model.spec)
    return pred, evaluate_predictions(pred, ds)


@dataclass
class RunResult:
    """Everything a single training run produced, in memory."""

    model: Model
    standardizer: Standardizer
    train_result: TrainResult
    report: EvalReport | None        # None when the test split is empty
    train_idx: np.ndarray
    val_idx: np.ndarray
    test_idx: np.ndarray


def resolved_config(spec: ArchitectureSpec, config: TrainConfig,
                    plan: SplitPlan, sensor_name: str,
                    data_source: dict | None = None) -> dict:
    """Assemble the provenance document written next to every artifact."""
    doc = {
        "sensor": sensor_name,
        "architecture": spec.to_dict(),
        "train": config.to_dict(),
        "split": {
            "train": plan.train,
            "val": plan.val,
            "test": plan.test,
            "seed": plan.seed,
        },
    }
    if data_source is not None:
        doc["data"] = data_source
    return doc


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _history_filename(key: str) -> str:
    return "history.csv" if key == "model" else f"history_{key}.csv"


def scatter_csv(pred: Predictions, ds: PixelDataset) -> str:
    """(pixel, true, predicted) log10-thickness rows over truly cloudy pixels."""
    cloudy = ds.cloudy_mask()
    lines = ["pixel_id,y_true_log10,y_pred_log10"]
    for i in np.flatnonzero(cloudy):
        lines.append("%d,%s,%s" % (ds.pixel_id[i],
                                   repr(float(ds.cot_log10[i])),
                                   repr(float(pred.cot_raw[i]))))
    return "\n".join(lines) + "\n"


def run_training(ds: PixelDataset, spec: ArchitectureSpec, config: TrainConfig,
                 plan: SplitPlan, outdir: str | None = None,
                 dump_scatter: bool = False, sensor_name: str = "FILE",
                 data_source: dict | None = None) -> RunResult:
    """Split, standardize, train, evaluate, and optionally write artifacts."""
    ds.validate()
    _check_feature_dim(ds, spec)
    train_idx, val_idx, test_idx = split_indices(len(ds), plan)
    if train_idx.size == 0:
        raise ConfigError("split plan leaves the training set empty")
    train_ds = ds.subset(train_idx)
    standardizer = Standardizer.fit(train_ds.feature_matrix())

    def targets_for(sub: PixelDataset) -> LossTargets:
        feats = standardizer.transform(sub.feature_matrix())
        return LossTargets.from_dataset(sub, feats, spec.bins)

    model = build_model(spec, config.seed)
    val_ds = ds.subset(val_idx)
    val_targets = targets_for(val_ds) if len(val_ds) else None
    train_result = train_model(model, targets_for(train_ds), config, val_targets)

    report = None
    pred = None
    test_ds = ds.subset(test_idx)
    if len(test_ds):
        pred, report = evaluate_model(model, standardizer, test_ds)

    if outdir is not None:
        os.makedirs(outdir, exist_ok=True)
        doc = resolved_config(spec, config, plan, sensor_name, data_source)
        _write_text(os.path.join(outdir, CONFIG_NAME),
                    dumps_deterministic(doc) + "\n")
        save_checkpoint(
            os.path.join(outdir, CHECKPOINT_NAME), model.params,
            architecture=spec.to_dict(), config=config.to_dict(),
            extras={"standardizer": standardizer.to_dict(),
                    "sensor": sensor_name})
        for key, records in train_result.histories.items():
            _write_text(os.path.join(outdir, _history_filename(key)),
                        history_csv(records))
        if report is not None:
            _write_text(os.path.join(outdir, EVAL_NAME), report.to_json() + "\n")
        if dump_scatter and pred is not None:
            _write_text(os.path.join(outdir, SCATTER_NAME),
                        scatter_csv(pred, test_ds))
    return RunResult(model=model, standardizer=standardizer,
                     train_result=train_result, report=report,
                     train_idx=train_idx, val_idx=val_idx, test_idx=test_idx)


def load_trained(path: str) -> tuple[Model, Standardizer, dict]:
    """Rebuild a model and its standardizer from a checkpoint file.

    Returns the model (parameters restored), the standardizer, and the full
    checkpoint document for callers that need the recorded configuration.
    """
    doc = load_checkpoint(path)
    spec = ArchitectureSpec.from_dict(doc["architecture"])
    seed = int(doc.get("config", {}).get("seed", 0))
    model = build_model(spec, seed)
    model.params.load_values(doc["values"])
    extras = doc.get("extras", {})
    if "standardizer" not in extras:
        raise DataError(f"{path}: checkpoint lacks standardizer statistics")
    standardizer = Standardizer.from_dict(extras["standardizer"])
    return model, standardizer, doc


def _report_cell(report: EvalReport, attr: str, context: str) -> float:
    value = getattr(report, attr)
    if value is None:
        raise DataError(f"{context}: metric {attr} is undefined on this fold")
    return float(value)


@dataclass
class KfoldResult:
    """Per-fold reports plus selection-ready fold rows."""

    reports: dict[tuple[str, int], EvalReport]
    fold_rows: list[tuple[str, str, str, bool, list[float]]]


def run_kfold(ds: PixelDataset, specs: list[ArchitectureSpec],
              config: TrainConfig, k: int, outdir: str | None = None,
              dataset_label: str = "DATA") -> KfoldResult:
    """K-fold cross-validation over one dataset for several variants.

    Every variant sees the identical fold partition.  Fold ``i`` trains on
    the other ``k - 1`` folds with seed ``config.seed + i`` and is scored on
    fold ``i``; no pixels are held out beyond that.
    """
    ds.validate()
    if not specs:
        raise ConfigError("no architectures given")
    names = [s.variant for s in specs]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate variants in k-fold run")
    for spec in specs:
        _check_feature_dim(ds, spec)
    folds = kfold_indices(len(ds), k, config.seed)
    if outdir is not None:
        os.makedirs(outdir, exist_ok=True)

    reports: dict[tuple[str, int], EvalReport] = {}
    values: dict[tuple[str, str], list[float]] = {
        (name, metric): [] for name in names for metric, _, _ in KFOLD_METRICS}
    all_idx = np.arange(len(ds))
    for i, test_idx in enumerate(folds):
        train_idx = np.setdiff1d(all_idx, test_idx, assume_unique=True)
        train_ds = ds.subset(train_idx)
        test_ds = ds.subset(test_idx)
        standardizer = Standardizer.fit(train_ds.feature_matrix())
        fold_config = replace(config, seed=config.seed + i)
        for spec in specs:
            feats = standardizer.transform(train_ds.feature_matrix())
            targets = LossTargets.from_dataset(train_ds, feats, spec.bins)
            model = build_model(spec, fold_config.seed)
            train_model(model, targets, fold_config)
            _, report = evaluate_model(model, standardizer, test_ds)
            reports[(spec.variant, i)] = report
            context = f"fold {i} of {spec.variant}"
            for metric, _, attr in KFOLD_METRICS:
                values[(spec.variant, metric)].append(
                    _report_cell(report, attr, context))
            if outdir is not None:
                _write_text(
                    os.path.join(outdir, f"eval_{spec.variant}_fold{i}.json"),
                    report.to_json() + "\n")

    fold_rows = [(name, dataset_label, metric, lower, values[(name, metric)])
                 for name in names
                 for metric, lower, _ in KFOLD_METRICS]
    return KfoldResult(reports=reports, fold_rows=fold_rows)


ABLATION_COLUMNS = ("variant", "param_count") + METRIC_COLUMNS


def ablation_csv(rows: list[tuple[str, int, EvalReport]]) -> str:
    """One CSV row per variant: identity, size, and every report column."""
    lines = [",".join(ABLATION_COLUMNS)]
    for variant, count, report in rows:
        d = report.to_dict()
        cells = [variant, str(count)]
        for col in METRIC_COLUMNS:
            v = d[col]
            if v is None:
                cells.append("")
            elif isinstance(v, int):
                cells.append(str(v))
            else:
                cells.append(repr(float(v)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def run_ablation(ds: PixelDataset, specs: list[ArchitectureSpec],
                 config: TrainConfig, plan: SplitPlan,
                 outdir: str | None = None, sensor_name: str = "FILE"
                 ) -> dict[str, RunResult]:
    """Train each variant under the identical split and seed.

    Per-variant artifacts land in ``<outdir>/<variant>/``; the comparison
    table ``ablation.csv`` and a parameter-count manifest go in ``outdir``
    itself.  A variant that fails aborts the run but leaves the artifacts
    of the variants that already finished in place.
    """
    if not specs:
        raise ConfigError("no architectures given")
    names = [s.variant for s in specs]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate variants in ablation")
    results: dict[str, RunResult] = {}
    table_rows: list[tuple[str, int, EvalReport]] = []
    manifest: dict[str, dict] = {}
    for spec in specs:
        sub = os.path.join(outdir, spec.variant) if outdir is not None else None
        result = run_training(ds, spec, config, plan, outdir=sub,
                              sensor_name=sensor_name)
        if result.report is None:
            raise ConfigError("ablation requires a non-empty test split")
        results[spec.variant] = result
        table_rows.append((spec.variant, result.model.param_count(),
                           result.report))
        manifest[spec.variant] = {
            "param_count": result.model.param_count(),
            "eval": result.report.to_dict(),
        }
    if outdir is not None:
        _write_text(os.path.join(outdir, "ablation.csv"),
                    ablation_csv(table_rows))
        _write_text(os.path.join(outdir, "manifest.json"),
                    dumps_deterministic(manifest) + "\n")
    return results
