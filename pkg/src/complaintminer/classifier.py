"""Elastic-net logistic regression and stratified cross-validation.

The model minimizes

    (1/n) sum log-loss + lambda1 * ||w||_1 + (lambda2/2) * ||w||_2^2

with an unpenalized bias, by proximal gradient descent with backtracking
and soft-thresholding.  Features are standardized with training-split
statistics; constant columns are dropped at fit time.  Everything is
deterministic: no randomness enters training, and the only seed in cross
validation drives the fold shuffle.
"""

import json
import math
import random
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.special import expit

from .errors import ConfigError, InputFormatError

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    lambda1: float = 1e-4
    lambda2: float = 1e-4
    max_epochs: int = 500
    tolerance: float = 1e-7
    rng_seed: int = 0
    balance_classes: bool = False

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ConfigError(f"penalties must be non-negative, got {self.lambda1}, {self.lambda2}")
        if self.tolerance <= 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be at least 1, got {self.max_epochs}")


@dataclass(frozen=True)
class ElasticNetLRModel:
    feature_index: Mapping[str, int]
    weights: tuple[float, ...]
    bias: float
    lambda1: float
    lambda2: float
    scaling_mean: tuple[float, ...]
    scaling_std: tuple[float, ...]
    # per-epoch objective values; diagnostic only, not serialized
    objective_history: tuple[float, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        d = len(self.feature_index)
        if not (len(self.weights) == len(self.scaling_mean) == len(self.scaling_std) == d):
            raise ValueError("weights and scaling must cover exactly the indexed features")
        if any(s <= 0 for s in self.scaling_std):
            raise ValueError("scaling stdev entries must be positive")

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "feature_index": dict(sorted(self.feature_index.items(), key=lambda kv: kv[1])),
            "weights": list(self.weights),
            "bias": self.bias,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "scaling": {"mean": list(self.scaling_mean), "stdev": list(self.scaling_std)},
        }

    @staticmethod
    def from_dict(data: dict) -> "ElasticNetLRModel":
        version = data.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise InputFormatError(f"unsupported model format version {version!r}")
        return ElasticNetLRModel(
            feature_index={str(k): int(v) for k, v in data["feature_index"].items()},
            weights=tuple(float(w) for w in data["weights"]),
            bias=float(data["bias"]),
            lambda1=float(data["lambda1"]),
            lambda2=float(data["lambda2"]),
            scaling_mean=tuple(float(m) for m in data["scaling"]["mean"]),
            scaling_std=tuple(float(s) for s in data["scaling"]["stdev"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @staticmethod
    def load(path: str | Path) -> "ElasticNetLRModel":
        return ElasticNetLRModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _matrix(rows: Sequence[Mapping[str, float]], names: Sequence[str]) -> np.ndarray:
    X = np.zeros((len(rows), len(names)), dtype=float)
    cols = {name: j for j, name in enumerate(names)}
    for i, row in enumerate(rows):
        for name, value in row.items():
            if not math.isfinite(value):
                raise ValueError(f"row {i}: feature {name!r} has non-finite value {value}")
            j = cols.get(name)
            if j is not None:
                X[i, j] = value
    return X


def _validate_training_input(X: Sequence[Mapping[str, float]], y: Sequence[int]) -> np.ndarray:
    if len(X) != len(y):
        raise ValueError(f"{len(X)} feature rows but {len(y)} labels")
    if len(y) < 2:
        raise ValueError("need at least 2 training rows")
    arr = np.asarray(y, dtype=float)
    if not set(np.unique(arr)) <= {0.0, 1.0}:
        raise ValueError("labels must be 0 or 1")
    if len(np.unique(arr)) < 2:
        raise ValueError("training labels contain a single class; both classes are required")
    return arr


def _smooth_value_and_grad(
    Z: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, lambda2: float, sample_weight: np.ndarray
) -> tuple[float, np.ndarray, float]:
    """Differentiable part of the objective: weighted log-loss + ridge."""
    z = Z @ w + b
    # log(1 + e^z) - y*z, stable for large |z|
    losses = np.logaddexp(0.0, z) - y * z
    value = float(np.dot(sample_weight, losses)) + 0.5 * lambda2 * float(w @ w)
    residual = sample_weight * (expit(z) - y)
    grad_w = Z.T @ residual + lambda2 * w
    grad_b = float(residual.sum())
    return value, grad_w, grad_b


def _soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def train(X: Sequence[Mapping[str, float]], y: Sequence[int], config: TrainConfig | None = None) -> ElasticNetLRModel:
    if config is None:
        config = TrainConfig()
    labels = _validate_training_input(X, y)
    all_names = sorted({name for row in X for name in row})
    full = _matrix(X, all_names)

    mean = full.mean(axis=0)
    std = full.std(axis=0)
    keep = [j for j in range(len(all_names)) if std[j] > 0.0]
    names = [all_names[j] for j in keep]
    Z = (full[:, keep] - mean[keep]) / std[keep]

    n = len(labels)
    if config.balance_classes:
        pos = labels.sum()
        per_class = {1.0: n / (2.0 * pos), 0.0: n / (2.0 * (n - pos))}
        sample_weight = np.array([per_class[v] for v in labels]) / n
    else:
        sample_weight = np.full(n, 1.0 / n)

    w = np.zeros(len(names))
    b = 0.0
    value, grad_w, grad_b = _smooth_value_and_grad(Z, labels, w, b, config.lambda2, sample_weight)
    objective = value + config.lambda1 * float(np.abs(w).sum())
    history = [objective]
    step = 1.0
    for _ in range(config.max_epochs):
        # backtracking: shrink until the smooth part is below its
        # quadratic majorizer, which makes the full objective monotone
        while True:
            w_new = _soft_threshold(w - step * grad_w, step * config.lambda1)
            b_new = b - step * grad_b
            dw = w_new - w
            db = b_new - b
            bound = value + float(grad_w @ dw) + grad_b * db + (float(dw @ dw) + db * db) / (2.0 * step)
            new_value, new_grad_w, new_grad_b = _smooth_value_and_grad(
                Z, labels, w_new, b_new, config.lambda2, sample_weight
            )
            if new_value <= bound + 1e-15 or step < 1e-18:
                break
            step *= 0.5
        w, b = w_new, b_new
        value, grad_w, grad_b = new_value, new_grad_w, new_grad_b
        new_objective = value + config.lambda1 * float(np.abs(w).sum())
        history.append(new_objective)
        decrease = objective - new_objective
        objective = new_objective
        if decrease <= config.tolerance * max(abs(objective), 1e-12):
            break
        step = min(step * 1.5, 1e6)

    return ElasticNetLRModel(
        feature_index={name: j for j, name in enumerate(names)},
        weights=tuple(float(v) for v in w),
        bias=float(b),
        lambda1=config.lambda1,
        lambda2=config.lambda2,
        scaling_mean=tuple(float(mean[j]) for j in keep),
        scaling_std=tuple(float(std[j]) for j in keep),
        objective_history=tuple(history),
    )


def predict(model: ElasticNetLRModel, x: Mapping[str, float]) -> float:
    """Probability of the positive (complaint) class; missing features are 0."""
    z = model.bias
    for name, j in model.feature_index.items():
        raw = x.get(name, 0.0)
        if not math.isfinite(raw):
            raise ValueError(f"feature {name!r} has non-finite value {raw}")
        z += model.weights[j] * (raw - model.scaling_mean[j]) / model.scaling_std[j]
    return float(expit(z))


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {"accuracy": self.accuracy, "precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class EvalReport:
    """Headline metrics with per-fold detail.

    For a single split the headline values are that split's own and the
    stdevs are 0; for cross-validation they are the mean and sample
    stdev over folds.
    """

    accuracy: float
    precision: float
    recall: float
    f1: float
    per_fold: tuple[Metrics, ...]
    stdev: Metrics

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "stdev": self.stdev.to_dict(),
            "per_fold": [m.to_dict() for m in self.per_fold],
        }


def _split_metrics(predictions: Sequence[int], labels: Sequence[int]) -> Metrics:
    tp = fp = fn = tn = 0
    for p, t in zip(predictions, labels):
        if p == 1 and t == 1:
            tp += 1
        elif p == 1 and t == 0:
            fp += 1
        elif p == 0 and t == 1:
            fn += 1
        else:
            tn += 1
    n = tp + fp + fn + tn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(accuracy=(tp + tn) / n, precision=precision, recall=recall, f1=f1)


def _aggregate(folds: Sequence[Metrics]) -> EvalReport:
    def mean(attr):
        return statistics.fmean(getattr(m, attr) for m in folds)

    def sdev(attr):
        return statistics.stdev(getattr(m, attr) for m in folds) if len(folds) > 1 else 0.0

    return EvalReport(
        accuracy=mean("accuracy"),
        precision=mean("precision"),
        recall=mean("recall"),
        f1=mean("f1"),
        per_fold=tuple(folds),
        stdev=Metrics(accuracy=sdev("accuracy"), precision=sdev("precision"), recall=sdev("recall"), f1=sdev("f1")),
    )


def evaluate(predictions: Sequence[int], labels: Sequence[int]) -> EvalReport:
    if len(predictions) != len(labels):
        raise ValueError(f"{len(predictions)} predictions but {len(labels)} labels")
    if not labels:
        raise ValueError("nothing to evaluate")
    bad = [v for v in list(predictions) + list(labels) if v not in (0, 1)]
    if bad:
        raise ValueError(f"predictions and labels must be 0 or 1, got {bad[:5]}")
    return _aggregate([_split_metrics(predictions, labels)])


def stratified_folds(y: Sequence[int], k: int, seed: int = 0) -> list[list[int]]:
    """Disjoint index folds covering all of y, class-balanced within 1."""
    if k < 2:
        raise ConfigError(f"k must be at least 2, got {k}")
    rng = random.Random(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in sorted(set(y)):
        idxs = [i for i, v in enumerate(y) if v == cls]
        if len(idxs) < k:
            raise ValueError(f"class {cls} has only {len(idxs)} members; use k <= {len(idxs)}")
        rng.shuffle(idxs)
        base, rem = divmod(len(idxs), k)
        pos = 0
        for j in range(k):
            folds[j].extend(idxs[pos : pos + base])
            pos += base
        for _ in range(rem):
            # extras go wherever is currently lightest, ties by fold id
            j = min(range(k), key=lambda f: (len(folds[f]), f))
            folds[j].append(idxs[pos])
            pos += 1
    return [sorted(f) for f in folds]


def cross_validate(
    X: Sequence[Mapping[str, float]], y: Sequence[int], k: int = 10, config: TrainConfig | None = None
) -> EvalReport:
    if config is None:
        config = TrainConfig()
    _validate_training_input(X, y)
    folds = stratified_folds(list(y), k, seed=config.rng_seed)
    per_fold = []
    for fold in folds:
        held = set(fold)
        train_X = [X[i] for i in range(len(X)) if i not in held]
        train_y = [y[i] for i in range(len(y)) if i not in held]
        model = train(train_X, train_y, config)
        predictions = [1 if predict(model, X[i]) >= 0.5 else 0 for i in fold]
        per_fold.append(_split_metrics(predictions, [y[i] for i in fold]))
    return _aggregate(per_fold)
