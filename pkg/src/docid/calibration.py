"""Confidence calibration for match-count classification.

Raw per-class match counts are standardized to z-scores over the vector's
own entries, then a single-feature logistic regression maps a z-score to
the probability that the candidate class is the true one. One global model
is shared across classes; fitting is deterministic full-batch gradient
descent so retraining on identical data reproduces the model bitwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDistribution,
    InsufficientData,
    IoError,
    SchemaError,
    SingleClassData,
)

MODEL_SCHEMA = 1
LEARNING_RATE = 0.1
MAX_EPOCHS = 10000
LOSS_TOLERANCE = 1e-8
MIN_SAMPLES = 10

_P_FLOOR = 1e-15


@dataclass(frozen=True)
class CalibrationModel:
    """Logistic model p = sigmoid(w z + b) with training metadata."""

    w: float
    b: float
    trained_on: int = 0
    epochs: int = 0
    final_loss: float = float("nan")

    def __post_init__(self):
        if not (math.isfinite(self.w) and math.isfinite(self.b)):
            raise ValueError("model parameters must be finite")


def z_scores(scores) -> np.ndarray:
    """Population standardization of a raw match-count vector.

    z_i = (x_i - mu) / sigma with mu and sigma taken over the vector's own
    entries (divisor N). All-equal scores raise DegenerateDistribution.
    """
    x = np.asarray(scores, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("z_scores needs a 1-D vector of length >= 2")
    mu = x.mean()
    sigma = np.sqrt(np.mean((x - mu) ** 2))
    if sigma == 0.0:
        raise DegenerateDistribution("all raw scores are equal; sigma is zero")
    return (x - mu) / sigma


def _sigmoid(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def log_loss_and_grad(w: float, b: float, z: np.ndarray, y: np.ndarray):
    """Mean binary cross-entropy and its (dw, db) gradient."""
    t = w * z + b
    # softplus form keeps the loss finite for any t
    loss = float(np.mean(y * np.logaddexp(0.0, -t) + (1.0 - y) * np.logaddexp(0.0, t)))
    resid = _sigmoid(t) - y
    return loss, float(np.mean(resid * z)), float(np.mean(resid))


def fit_logistic(samples) -> CalibrationModel:
    """Fit by full-batch gradient descent from (w, b) = (0, 0).

    samples is a sequence of (z, label) with labels in {0, 1}; both labels
    must be present and at least 10 samples given. Converges when the loss
    delta drops below 1e-8 or after 10000 epochs.
    """
    arr = np.asarray(list(samples), dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be (z, label) pairs")
    if arr.shape[0] < MIN_SAMPLES:
        raise InsufficientData(
            f"need >= {MIN_SAMPLES} samples, got {arr.shape[0]}")
    z = arr[:, 0]
    y = arr[:, 1]
    if not (np.any(y == 0.0) and np.any(y == 1.0)):
        raise SingleClassData("both labels must be present to fit")

    w, b = 0.0, 0.0
    loss, dw, db = log_loss_and_grad(w, b, z, y)
    epochs = 0
    for epochs in range(1, MAX_EPOCHS + 1):
        w -= LEARNING_RATE * dw
        b -= LEARNING_RATE * db
        new_loss, dw, db = log_loss_and_grad(w, b, z, y)
        if abs(loss - new_loss) < LOSS_TOLERANCE:
            loss = new_loss
            break
        loss = new_loss
    return CalibrationModel(w=w, b=b, trained_on=arr.shape[0], epochs=epochs,
                            final_loss=loss)


def predict_confidence(model: CalibrationModel, z) -> float:
    """sigmoid(w z + b), clamped into the open interval (0, 1)."""
    p = float(_sigmoid(np.asarray(model.w * np.asarray(z, dtype=np.float64)
                                  + model.b)))
    return min(max(p, _P_FLOOR), 1.0 - _P_FLOOR)


def predict_confidences(model: CalibrationModel, z: np.ndarray) -> np.ndarray:
    """Vectorized predict_confidence."""
    p = _sigmoid(model.w * np.asarray(z, dtype=np.float64) + model.b)
    return np.clip(p, _P_FLOOR, 1.0 - _P_FLOOR)


def save_model(model: CalibrationModel, path) -> None:
    doc = {
        "schema_version": MODEL_SCHEMA,
        "w": model.w,
        "b": model.b,
        "trained_on": model.trained_on,
        "epochs": model.epochs,
        "final_loss": model.final_loss,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path) -> CalibrationModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise IoError(f"model file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"model file is not valid JSON: {path}") from exc
    try:
        if doc["schema_version"] != MODEL_SCHEMA:
            raise SchemaError(f"unsupported model schema {doc['schema_version']}")
        return CalibrationModel(w=float(doc["w"]), b=float(doc["b"]),
                                trained_on=int(doc["trained_on"]),
                                epochs=int(doc["epochs"]),
                                final_loss=float(doc["final_loss"]))
    except KeyError as exc:
        raise SchemaError(f"model file missing field {exc}: {path}") from exc
