"""Toy learning algorithms as ring-generic programs.

The trainer maps per-example downweights w to trained parameters: theta
starts from seeded pseudorandom values, then for every epoch and every
example i takes the step

    theta <- theta - (1 - w_i) * lr * grad loss_i(theta)

with the gradient written out in closed form (both toy models are
polynomial, so the whole map is a polynomial circuit in w).  Evaluating at
w = 0 is ordinary training; w_i = 1 erases example i's contribution.

Running the same program over the complex ring gives the retrain oracle;
over the jet ring it is the precomputation kernel.  Measurement functions
are built as explicit circuits so predictions exercise the DAG evaluator.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .circuits import CircuitBuilder, ComplexRing, evaluate
from .errors import UsageError
from .sampling import key_words, raw_components

MODELS = ("linear_regression", "quadratic_mlp")

_THETA0_SCALE = 0.1
# Key-expansion tags for deriving the 256-bit theta0 key from a 64-bit seed.
_INIT_TAGS = (0x74686574612D696E, 0x69742D6B65792D76, 0x312E302D6A736B30)


def _init_key(init_seed):
    words = (int(init_seed) & 0xFFFFFFFFFFFFFFFF,) + _INIT_TAGS
    return b"".join(w.to_bytes(8, "little") for w in words)


def initial_parameters(init_seed, p):
    """Deterministic small real initialization (hard-coded randomness)."""
    key = _init_key(init_seed)
    raw = raw_components(key, np.zeros(p, dtype=np.uint64), np.arange(p))
    return _THETA0_SCALE * raw.real


@dataclass(frozen=True)
class TrainerConfig:
    model: str
    features: np.ndarray          # (n, d) real
    targets: np.ndarray           # (n,) real
    learning_rate: float
    epochs: int
    init_seed: int
    hidden_units: int = 2
    batch_size: int = 1

    def __post_init__(self):
        if self.model not in MODELS:
            raise UsageError(f"unknown model '{self.model}'")
        f = np.asarray(self.features, dtype=np.float64)
        t = np.asarray(self.targets, dtype=np.float64)
        if f.ndim != 2 or f.shape[0] == 0 or f.shape[1] == 0:
            raise UsageError("features must be a nonempty (n, d) array")
        if t.shape != (f.shape[0],):
            raise UsageError("targets must align with features rows")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(t))):
            raise UsageError("dataset contains non-finite values")
        if not self.learning_rate >= 0:
            raise UsageError("learning_rate must be >= 0")
        if int(self.epochs) < 1:
            raise UsageError("epochs must be >= 1")
        if self.batch_size != 1:
            raise UsageError("batch_size is fixed to 1")
        if self.model == "quadratic_mlp" and self.hidden_units < 1:
            raise UsageError("hidden_units must be >= 1")
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "targets", t)

    @property
    def num_examples(self):
        return self.features.shape[0]

    @property
    def num_features(self):
        return self.features.shape[1]

    @property
    def num_parameters(self):
        if self.model == "linear_regression":
            return self.num_features
        return self.hidden_units * (self.num_features + 1)


class TrainerProgram:
    """Ring program computing trained parameters from downweights."""

    def __init__(self, config):
        self.config = config
        self.num_inputs = config.num_examples
        self.num_outputs = config.num_parameters
        self.theta0 = initial_parameters(config.init_seed, config.num_parameters)

    def run(self, ring, w):
        cfg = self.config
        lr = float(cfg.learning_rate)
        x = cfg.features
        y = cfg.targets
        theta = [complex(v) for v in self.theta0]
        if cfg.model == "linear_regression":
            for _ in range(cfg.epochs):
                for i in range(cfg.num_examples):
                    keep = 1.0 - w[i]
                    pred = theta[0] * x[i, 0]
                    for j in range(1, cfg.num_features):
                        pred = pred + theta[j] * x[i, j]
                    common = keep * (pred - y[i])
                    theta = [
                        theta[j] - common * (2.0 * lr * x[i, j])
                        for j in range(cfg.num_features)
                    ]
        else:
            h, d = cfg.hidden_units, cfg.num_features
            for _ in range(cfg.epochs):
                for i in range(cfg.num_examples):
                    keep = 1.0 - w[i]
                    lins = []
                    sqs = []
                    for t in range(h):
                        lin = theta[t * d] * x[i, 0]
                        for j in range(1, d):
                            lin = lin + theta[t * d + j] * x[i, j]
                        lins.append(lin)
                        sqs.append(lin * lin)
                    pred = theta[h * d] * sqs[0]
                    for t in range(1, h):
                        pred = pred + theta[h * d + t] * sqs[t]
                    common = keep * (pred - y[i])
                    new_theta = list(theta)
                    for t in range(h):
                        g = common * (theta[h * d + t] * lins[t])
                        for j in range(d):
                            new_theta[t * d + j] = theta[t * d + j] - g * (
                                4.0 * lr * x[i, j]
                            )
                        new_theta[h * d + t] = theta[h * d + t] - (
                            common * sqs[t]
                        ) * (2.0 * lr)
                    theta = new_theta
        return [ring.constant(v) if isinstance(v, complex) else v for v in theta]


def build_trainer(config):
    return TrainerProgram(config)


def retrain_oracle(trainer, w):
    """Ground truth: evaluate the trainer at a downweight vector over C."""
    w = np.asarray(w, dtype=np.complex128)
    if not np.all(np.isfinite(w.real) & np.isfinite(w.imag)):
        raise UsageError("downweights must be finite")
    outs = evaluate(trainer, ComplexRing(), list(w))
    return np.array([complex(v) for v in outs], dtype=np.complex128)


@dataclass(frozen=True)
class MeasurementConfig:
    kind: str
    features: np.ndarray = None
    target: float = 0.0
    index: int = 0
    coordinate: int = 1
    model: str = "linear_regression"
    hidden_units: int = 2

    def __post_init__(self):
        if self.kind not in ("loss_on_example", "parameter_probe", "logit_probe"):
            raise UsageError(f"unknown measurement kind '{self.kind}'")
        if self.kind in ("loss_on_example", "logit_probe"):
            if self.features is None:
                raise UsageError(f"{self.kind} needs features")
            f = np.asarray(self.features, dtype=np.float64)
            if f.ndim != 1 or f.shape[0] == 0:
                raise UsageError("measurement features must be a 1-d vector")
            object.__setattr__(self, "features", f)
            if self.model not in MODELS:
                raise UsageError(f"unknown model '{self.model}'")


def _prediction_nodes(b, cfg, p):
    """Emit the model's prediction as a node id; inputs are theta."""
    x = cfg.features
    d = x.shape[0]
    if cfg.model == "linear_regression":
        if p != d:
            raise UsageError(
                f"linear model with {d} features needs p={d}, got {p}"
            )
        terms = [
            b.mul(b.const(x[j]), b.input(j + 1)) for j in range(d)
        ]
        return b.add(*terms)
    h = cfg.hidden_units
    if p != h * (d + 1):
        raise UsageError(
            f"quadratic_mlp with {d} features and {h} hidden units needs"
            f" p={h * (d + 1)}, got {p}"
        )
    terms = []
    for t in range(h):
        lin = b.add(
            *[b.mul(b.const(x[j]), b.input(t * d + j + 1)) for j in range(d)]
        )
        sq = b.mul(lin, lin)
        terms.append(b.mul(b.input(h * d + t + 1), sq))
    return b.add(*terms)


def build_measurement(cfg, p):
    """Measurement circuit phi: p parameter inputs -> 1 outcome."""
    b = CircuitBuilder(p)
    if cfg.kind == "parameter_probe":
        if not 1 <= cfg.index <= p:
            raise UsageError(f"probe index {cfg.index} outside [1, {p}]")
        b.output(b.input(cfg.index))
        return b.build()
    if cfg.kind == "logit_probe":
        if cfg.coordinate != 1:
            raise UsageError("toy models have a single output coordinate")
        b.output(_prediction_nodes(b, cfg, p))
        return b.build()
    pred = _prediction_nodes(b, cfg, p)
    resid = b.add(pred, b.const(-float(cfg.target)))
    b.output(b.mul(resid, resid))
    return b.build()


def load_dataset_csv(path):
    """CSV rows: feature_1, ..., feature_d, target."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as err:
                raise UsageError(f"{path}:{line_no}: {err}") from None
    if not rows:
        raise UsageError(f"{path}: empty dataset")
    widths = {len(r) for r in rows}
    if len(widths) != 1 or widths.pop() < 2:
        raise UsageError(f"{path}: rows must share a width of >= 2 columns")
    data = np.array(rows, dtype=np.float64)
    return data[:, :-1], data[:, -1]


def load_trainer_config(path, data_path):
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise UsageError(f"{path}: trainer config must be a JSON object")
    features, targets = load_dataset_csv(data_path)
    try:
        return TrainerConfig(
            model=obj["model"],
            features=features,
            targets=targets,
            learning_rate=float(obj["learning_rate"]),
            epochs=int(obj["epochs"]),
            init_seed=int(obj.get("init_seed", 0)),
            hidden_units=int(obj.get("hidden_units", 2)),
            batch_size=int(obj.get("batch_size", 1)),
        )
    except KeyError as err:
        raise UsageError(f"{path}: missing trainer config field {err}") from None


def load_measurement_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise UsageError(f"{path}: measurement config must be a JSON object")
    try:
        kind = obj["kind"]
    except KeyError:
        raise UsageError(f"{path}: missing measurement kind") from None
    return MeasurementConfig(
        kind=kind,
        features=obj.get("features"),
        target=float(obj.get("target", 0.0)),
        index=int(obj.get("index", 0)),
        coordinate=int(obj.get("coordinate", 1)),
        model=obj.get("model", "linear_regression"),
        hidden_units=int(obj.get("hidden_units", 2)),
    )
