"""Feed-forward surrogate of the truth model: training, evaluation, persistence.

The model is a fully-connected network mapping (design vector, frequency) to
the six electrical properties, trained by mini-batch gradient descent with
adaptive moment estimates on the mean squared error of normalized outputs.
Inputs and outputs are affinely mapped to [-1, 1]; dB columns use min/max
statistics of the training set while the two phase columns use the fixed
map deg/180 so that angles wrap at exactly +-1. Residuals on the phase
columns are computed modulo the wrap, which lets the network fit a smooth
(unwrapped) phase surface even where the stored targets jump between -180
and +180 degrees. The same wrapped distance defines the reported MAE.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import ANGULAR_OUTPUTS, Dataset
from .errors import (
    DivergenceError,
    SchemaError,
    UnsupportedVersionError,
    ValidationError,
)

MODEL_FORMAT_VERSION = 1

def _silu(z):
    return z / (1.0 + np.exp(-z))


def _dsilu(z, a):
    s = 1.0 / (1.0 + np.exp(-z))
    return s * (1.0 + z * (1.0 - s))


# name -> (f(z), df(z, a)) with a = f(z)
_ACTIVATIONS = {
    "tanh": (np.tanh, lambda z, a: 1.0 - a * a),
    "silu": (_silu, _dsilu),
}


@dataclass
class MlpModel:
    """Weights, normalizers, and topology tag of a trained surrogate."""

    topology: str
    layer_sizes: tuple[int, ...]
    activation: str
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    x_offset: np.ndarray
    x_scale: np.ndarray
    y_offset: np.ndarray
    y_scale: np.ndarray

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]


@dataclass(frozen=True)
class TrainConfig:
    """Budget, optimizer settings, and architecture of one training run.

    ``learning_rate`` decays to ``final_learning_rate`` on a cosine schedule
    over the epoch budget; setting both equal gives a constant rate.
    """

    epochs: int
    batch_size: int = 8
    learning_rate: float = 3e-3
    final_learning_rate: float = 3e-5
    seed: int = 0
    hidden_sizes: tuple[int, ...] = (64, 64, 64, 64)
    activation: str = "silu"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValidationError("epochs and batch size must be >= 1")
        if not (self.learning_rate > 0.0) or not (self.final_learning_rate > 0.0):
            raise ValidationError("learning rates must be positive")
        if self.activation not in _ACTIVATIONS:
            raise ValidationError(f"unknown activation {self.activation!r}")

    def rate_at(self, epoch: int) -> float:
        """Cosine-decayed learning rate for a 0-based epoch index."""
        if self.epochs == 1:
            return self.learning_rate
        t = epoch / (self.epochs - 1)
        lo, hi = self.final_learning_rate, self.learning_rate
        return lo + 0.5 * (hi - lo) * (1.0 + math.cos(math.pi * t))


@dataclass
class TrainReport:
    epoch_losses: list[float] = field(default_factory=list)
    final_mae: np.ndarray | None = None


def _wrap_unit(r: np.ndarray) -> np.ndarray:
    """Wrap a normalized angular residual to one turn (= 2); exact inside (-1, 1)."""
    return r - 2.0 * np.round(r / 2.0)


def _wrap_deg_array(ph: np.ndarray) -> np.ndarray:
    """Wrap degrees into (-180, 180]; exact for values already inside."""
    out = ph - 360.0 * np.round(ph / 360.0)
    out = np.where(out <= -180.0, out + 360.0, out)
    return np.where(out > 180.0, out - 360.0, out)


def _normalize_in(m: MlpModel, x: np.ndarray) -> np.ndarray:
    return (x - m.x_offset) / m.x_scale


def _denormalize_out(m: MlpModel, yn: np.ndarray) -> np.ndarray:
    y = m.y_offset + m.y_scale * yn
    y[..., ANGULAR_OUTPUTS] = _wrap_deg_array(y[..., ANGULAR_OUTPUTS])
    return y


def _forward_normalized(m: MlpModel, xn: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """(activations, pre-activations) per layer; activations[0] is the input."""
    act, _ = _ACTIVATIONS[m.activation]
    layers = [xn]
    zs = []
    h = xn
    for i, (w, b) in enumerate(zip(m.weights, m.biases)):
        z = h @ w + b
        zs.append(z)
        h = act(z) if i < len(m.weights) - 1 else z
        layers.append(h)
    return layers, zs


def forward(m: MlpModel, x_raw: np.ndarray) -> np.ndarray:
    """Predict the six electrical properties for raw (design vector, frequency) rows."""
    x = np.asarray(x_raw, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != m.n_inputs:
        raise ValidationError(
            f"model expects {m.n_inputs} inputs, got {x.shape[1]}"
        )
    yn = _forward_normalized(m, _normalize_in(m, x))[0][-1]
    y = _denormalize_out(m, yn.copy())
    return y[0] if single else y


def _loss_and_grads(
    m: MlpModel, xn: np.ndarray, yn_target: np.ndarray
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Wrap-aware normalized MSE and its exact gradient w.r.t. every parameter."""
    _, dact = _ACTIVATIONS[m.activation]
    layers, zs = _forward_normalized(m, xn)
    r = layers[-1] - yn_target
    r[:, ANGULAR_OUTPUTS] = _wrap_unit(r[:, ANGULAR_OUTPUTS])
    loss = float(np.mean(r * r))
    delta = 2.0 * r / r.size
    grads_w: list[np.ndarray] = [np.empty(0)] * len(m.weights)
    grads_b: list[np.ndarray] = [np.empty(0)] * len(m.biases)
    for i in range(len(m.weights) - 1, -1, -1):
        grads_w[i] = layers[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ m.weights[i].T) * dact(zs[i - 1], layers[i])
    return loss, grads_w, grads_b


def batch_loss(m: MlpModel, x_raw: np.ndarray, y_raw: np.ndarray) -> float:
    """Training loss (wrap-aware normalized MSE) of a raw batch."""
    xn = _normalize_in(m, np.atleast_2d(np.asarray(x_raw, dtype=float)))
    yn = _normalize_targets(m, np.atleast_2d(np.asarray(y_raw, dtype=float)))
    loss, _, _ = _loss_and_grads(m, xn, yn)
    return loss


def gradient(
    m: MlpModel, x_raw: np.ndarray, y_raw: np.ndarray
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Exact gradient of the batch training loss for every weight and bias."""
    x = np.atleast_2d(np.asarray(x_raw, dtype=float))
    y = np.atleast_2d(np.asarray(y_raw, dtype=float))
    if x.shape[0] == 0:
        raise ValidationError("gradient needs a non-empty batch")
    _, gw, gb = _loss_and_grads(m, _normalize_in(m, x), _normalize_targets(m, y))
    return gw, gb


def _normalize_targets(m: MlpModel, y: np.ndarray) -> np.ndarray:
    return (y - m.y_offset) / m.y_scale


def _init_model(topology: str, n_inputs: int, n_outputs: int, cfg: TrainConfig,
                x_offset, x_scale, y_offset, y_scale) -> MlpModel:
    sizes = (n_inputs, *cfg.hidden_sizes, n_outputs)
    rng = np.random.default_rng(cfg.seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(
        topology=topology,
        layer_sizes=sizes,
        activation=cfg.activation,
        weights=weights,
        biases=biases,
        x_offset=x_offset,
        x_scale=x_scale,
        y_offset=y_offset,
        y_scale=y_scale,
    )


def _norm_from_stats(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return (lo + hi) / 2.0, (hi - lo) / 2.0


def train(train_set: Dataset, val_set: Dataset, cfg: TrainConfig) -> tuple[MlpModel, TrainReport]:
    """Train a surrogate on ``train_set`` and report held-out MAE on ``val_set``.

    The seed fixes both weight initialization and batch order, so identical
    inputs reproduce identical weights.
    """
    if not train_set.records:
        raise ValidationError("training set is empty")
    if val_set.kind != train_set.kind:
        raise ValidationError("train and validation sets must share a topology")
    x = train_set.input_matrix()
    y = train_set.output_matrix()

    x_off, x_scale = _norm_from_stats(train_set.norm.in_min, train_set.norm.in_max)
    y_off, y_scale = _norm_from_stats(train_set.norm.out_min, train_set.norm.out_max)
    # phase columns use the fixed +-180 map so wrap arithmetic is exact
    for k in ANGULAR_OUTPUTS:
        y_off[k] = 0.0
        y_scale[k] = 180.0

    model = _init_model(train_set.kind, x.shape[1], y.shape[1], cfg,
                        x_off, x_scale, y_off, y_scale)
    xn = _normalize_in(model, x)
    yn = _normalize_targets(model, y)

    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]

    rng = np.random.default_rng([cfg.seed, 1])
    report = TrainReport()
    step = 0
    n = x.shape[0]
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        rate = cfg.rate_at(epoch)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            loss, gw, gb = _loss_and_grads(model, xn[idx], yn[idx])
            epoch_loss += loss
            n_batches += 1
            step += 1
            bias1 = 1.0 - cfg.beta1**step
            bias2 = 1.0 - cfg.beta2**step
            for i in range(len(model.weights)):
                m_w[i] = cfg.beta1 * m_w[i] + (1 - cfg.beta1) * gw[i]
                v_w[i] = cfg.beta2 * v_w[i] + (1 - cfg.beta2) * gw[i] ** 2
                model.weights[i] -= rate * (
                    (m_w[i] / bias1) / (np.sqrt(v_w[i] / bias2) + cfg.eps)
                    + cfg.weight_decay * model.weights[i]
                )
                m_b[i] = cfg.beta1 * m_b[i] + (1 - cfg.beta1) * gb[i]
                v_b[i] = cfg.beta2 * v_b[i] + (1 - cfg.beta2) * gb[i] ** 2
                model.biases[i] -= rate * (m_b[i] / bias1) / (
                    np.sqrt(v_b[i] / bias2) + cfg.eps
                )
        mean_loss = epoch_loss / max(n_batches, 1)
        if not math.isfinite(mean_loss):
            raise DivergenceError(f"training loss diverged at epoch {epoch}", epoch=epoch)
        report.epoch_losses.append(mean_loss)
    report.final_mae = evaluate_mae(model, val_set)
    return model, report


def evaluate_mae(m: MlpModel, d: Dataset) -> np.ndarray:
    """Per-output mean absolute error in physical units (dB / degrees).

    Phase columns use the wrapped angular distance, so an error of 359
    degrees counts as 1 degree.
    """
    if not d.records:
        raise ValidationError("cannot evaluate on an empty dataset")
    pred = forward(m, d.input_matrix())
    err = np.abs(pred - d.output_matrix())
    ph = np.mod(err[:, ANGULAR_OUTPUTS], 360.0)
    err[:, ANGULAR_OUTPUTS] = np.minimum(ph, 360.0 - ph)
    return err.mean(axis=0)


def save_model(m: MlpModel, path: str | Path) -> None:
    """Persist the model as versioned JSON at full float precision."""
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "topology": m.topology,
        "layer_sizes": list(m.layer_sizes),
        "activation": m.activation,
        "x_offset": m.x_offset.tolist(),
        "x_scale": m.x_scale.tolist(),
        "y_offset": m.y_offset.tolist(),
        "y_scale": m.y_scale.tolist(),
        "weights": [w.tolist() for w in m.weights],
        "biases": [b.tolist() for b in m.biases],
    }
    Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")


def load_model(path: str | Path) -> MlpModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise SchemaError(f"{path}: not a valid model file: {err}") from err
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise SchemaError(f"{path}: missing format_version field")
    if doc["format_version"] != MODEL_FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"{path}: format_version {doc['format_version']} unsupported "
            f"(this build reads version {MODEL_FORMAT_VERSION})"
        )
    try:
        model = MlpModel(
            topology=doc["topology"],
            layer_sizes=tuple(doc["layer_sizes"]),
            activation=doc["activation"],
            weights=[np.array(w, dtype=float) for w in doc["weights"]],
            biases=[np.array(b, dtype=float) for b in doc["biases"]],
            x_offset=np.array(doc["x_offset"], dtype=float),
            x_scale=np.array(doc["x_scale"], dtype=float),
            y_offset=np.array(doc["y_offset"], dtype=float),
            y_scale=np.array(doc["y_scale"], dtype=float),
        )
    except KeyError as err:
        raise SchemaError(f"{path}: missing field {err}") from err
    if model.activation not in _ACTIVATIONS:
        raise SchemaError(f"{path}: unknown activation {model.activation!r}")
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        if w.shape != (model.layer_sizes[i], model.layer_sizes[i + 1]) or b.shape != (
            model.layer_sizes[i + 1],
        ):
            raise SchemaError(f"{path}: layer {i} shape mismatch with layer_sizes")
    return model
