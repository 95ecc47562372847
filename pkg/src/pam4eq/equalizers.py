"""The two receivers: a power-normalized LMS FFE+DFE baseline and a linear
SVM equalizer classifying PAM4 levels with three ordinal hyperplanes over
feature vectors that pair a symmetric window of received samples with
previous-decision feedback.

Feature layout: a vector for symbol k is
``[x(k-m) ... x(k+m), d(k-1) ... d(k-n)]`` with ``ffe_taps = 2m+1`` window
samples first and ``dfe_taps = n`` feedback amplitudes last. Feedback slots
hold true symbol amplitudes during training (teacher forcing) and the
model's own decisions at equalization time.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import _kernels
from .channel import ReceivedSymbols
from .errors import (
    AlignmentError,
    DegenerateTrainingSet,
    DimensionError,
    ModelQualityWarning,
    NonconvergenceWarning,
    TooShort,
)
from .txgen import PAM4_LEVELS, SymbolFrame, frame_from_levels

SLICER_THRESHOLDS = np.array([-2.0, 0.0, 2.0])


@dataclass(slots=True, frozen=True)
class EqTapConfig:
    """Tap counts shared by both receivers: ffe_taps = 2m+1, dfe_taps = n."""

    ffe_taps: int
    dfe_taps: int

    def __post_init__(self):
        if self.ffe_taps < 1 or self.ffe_taps % 2 == 0:
            raise ValueError(f"ffe_taps must be a positive odd integer, got {self.ffe_taps}")
        if self.dfe_taps < 0:
            raise ValueError(f"dfe_taps must be >= 0, got {self.dfe_taps}")

    @property
    def half_window(self) -> int:
        return (self.ffe_taps - 1) // 2

    @property
    def feature_length(self) -> int:
        return self.ffe_taps + self.dfe_taps


LIGHTWEIGHT = EqTapConfig(ffe_taps=9, dfe_taps=3)
ENHANCED = EqTapConfig(ffe_taps=31, dfe_taps=5)


@dataclass(slots=True)
class Hyperplane:
    """Linear decision boundary w.x + b = 0."""

    w: np.ndarray
    b: float


@dataclass(slots=True)
class SvmModel:
    """Three ordinal hyperplanes; plane j separates levels <= j from > j."""

    planes: list[Hyperplane]
    config: EqTapConfig
    training_meta: dict

    def weight_matrix(self) -> np.ndarray:
        return np.stack([p.w for p in self.planes])

    def bias_vector(self) -> np.ndarray:
        return np.array([p.b for p in self.planes])


@dataclass(slots=True)
class LmsModel:
    """Frozen FFE and DFE weights from LMS adaptation."""

    ffe_weights: np.ndarray
    dfe_weights: np.ndarray
    config: EqTapConfig
    step_size: float


def slice_levels(values: np.ndarray) -> np.ndarray:
    """Nearest-level indices; a value exactly on a midpoint slices low."""
    return np.searchsorted(SLICER_THRESHOLDS, np.asarray(values), side="left")


def _as_values(rx) -> np.ndarray:
    return rx.values if isinstance(rx, ReceivedSymbols) else np.asarray(rx, dtype=float)


def build_train_features(
    rx, labels: SymbolFrame, cfg: EqTapConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Teacher-forced feature matrix and level labels for symbols in
    [m, len - m); feedback slots before the stream start are zero."""
    x = _as_values(rx)
    if len(x) != len(labels.symbols):
        raise AlignmentError(
            f"rx and labels must be aligned: {len(x)} vs {len(labels.symbols)}"
        )
    m, n_fb = cfg.half_window, cfg.dfe_taps
    if len(x) <= max(2 * m, n_fb):
        raise TooShort(f"need more than {max(2 * m, n_fb)} symbols, got {len(x)}")
    ks = np.arange(m, len(x) - m)
    X = np.empty((len(ks), cfg.feature_length))
    X[:, : cfg.ffe_taps] = sliding_window_view(x, cfg.ffe_taps)[: len(ks)]
    amp = labels.symbols
    for j in range(1, n_fb + 1):
        col = np.zeros(len(ks))
        src = ks - j
        ok = src >= 0
        col[ok] = amp[src[ok]]
        X[:, cfg.ffe_taps + j - 1] = col
    return X, labels.level_index[ks].copy()


def hinge_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, lam: float) -> float:
    """L2-regularized mean hinge loss; the bias is regularized (it is
    trained as a constant-1 feature)."""
    margins = y * (X @ w + b)
    return 0.5 * lam * (float(np.dot(w, w)) + b * b) + float(np.mean(np.maximum(0.0, 1.0 - margins)))


def train_hyperplane(
    X: np.ndarray, y: np.ndarray, lam: float, epochs: int, rng: np.random.Generator
) -> Hyperplane:
    """Train one binary max-margin plane by stochastic subgradient descent
    with a 1/(lam*t) step schedule and tail-iterate averaging."""
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    perm = np.concatenate([rng.permutation(n) for _ in range(epochs)])
    w = _kernels.pegasos_train(X, y, float(lam), perm)
    return Hyperplane(w=w[:-1], b=float(w[-1]))


def _boundary_positions(model: SvmModel) -> np.ndarray:
    """Project each plane's boundary onto the shared mean normal."""
    W = model.weight_matrix()
    u = W.mean(axis=0)
    norm = np.linalg.norm(u)
    if norm == 0.0:
        return np.zeros(len(model.planes))
    u /= norm
    denom = W @ u
    denom[denom == 0.0] = np.finfo(float).tiny
    return -model.bias_vector() / denom


def svm_train(
    features: np.ndarray,
    level_labels: np.ndarray,
    cfg: EqTapConfig,
    lam: float = 1e-3,
    epochs: int = 20,
    seed: int = 0,
) -> SvmModel:
    """Train the three ordinal planes on a teacher-forced feature matrix.

    Plane j is fit to the binary split {levels <= j} vs {levels > j};
    training is deterministic in ``seed``.
    """
    features = np.asarray(features, dtype=float)
    level_labels = np.asarray(level_labels)
    if lam <= 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    if features.shape[1] != cfg.feature_length:
        raise DimensionError(
            f"feature length {features.shape[1]} != config length {cfg.feature_length}"
        )
    present = np.unique(level_labels)
    if len(present) < 4:
        missing = sorted(set(range(4)) - set(int(v) for v in present))
        raise DegenerateTrainingSet(f"training set missing level(s) {missing}")
    rng = np.random.default_rng(seed)
    planes = []
    for j in range(3):
        y = np.where(level_labels > j, 1.0, -1.0)
        planes.append(train_hyperplane(features, y, lam, epochs, rng))
    model = SvmModel(
        planes=planes,
        config=cfg,
        training_meta={
            "train_length": int(features.shape[0]),
            "lambda": float(lam),
            "epochs": int(epochs),
            "seed": int(seed),
        },
    )
    pos = _boundary_positions(model)
    if not np.all(np.diff(pos) >= 0):
        warnings.warn(
            f"ordinal boundaries are not monotone: {pos.tolist()}",
            ModelQualityWarning,
            stacklevel=2,
        )
    return model


def svm_classify(fv: np.ndarray, model: SvmModel) -> int:
    """Level = number of planes with strictly positive margin."""
    fv = np.asarray(fv, dtype=float)
    if fv.shape != (model.config.feature_length,):
        raise DimensionError(
            f"feature vector shape {fv.shape} != ({model.config.feature_length},)"
        )
    margins = model.weight_matrix() @ fv + model.bias_vector()
    return int(np.sum(margins > 0.0))


def _feedforward_margins(values: np.ndarray, model: SvmModel) -> np.ndarray:
    m = model.config.half_window
    padded = np.concatenate([np.zeros(m), values, np.zeros(m)])
    W = model.weight_matrix()
    ff = np.empty((len(model.planes), len(values)))
    for j in range(len(model.planes)):
        ff[j] = np.correlate(padded, W[j, : model.config.ffe_taps], "valid")
    return ff


def svm_equalize(rx, model: SvmModel, genie: SymbolFrame | None = None) -> SymbolFrame:
    """Sequential decision-directed pass over the whole stream.

    At each symbol the feature vector is assembled from the sample window
    (zero-padded at the edges) and the model's previous decisions; with
    ``genie`` the feedback reads true symbols instead, bounding error
    propagation.
    """
    values = _as_values(rx)
    if len(values) <= model.config.half_window:
        raise TooShort(
            f"need more than {model.config.half_window} symbols, got {len(values)}"
        )
    ff = _feedforward_margins(values, model)
    W = model.weight_matrix()
    w_fb = np.ascontiguousarray(W[:, model.config.ffe_taps :])
    genie_amp = genie.symbols if genie is not None else np.empty(0)
    levels = _kernels.ordinal_dfe_decide(
        ff, w_fb, model.bias_vector(), PAM4_LEVELS, genie_amp, genie is not None
    )
    return frame_from_levels(levels)


def lms_train(
    rx,
    labels: SymbolFrame,
    cfg: EqTapConfig,
    step: float = 0.1,
    train_length: int | None = None,
) -> LmsModel:
    """Single-pass normalized LMS with teacher-forced feedback.

    The FFE starts as a center spike (pure slicer) and adapts over symbols
    [m, train_length - m); the update is ``w += step * e * u / (eps + |u|^2)``.
    """
    x = _as_values(rx)
    if len(x) != len(labels.symbols):
        raise AlignmentError(
            f"rx and labels must be aligned: {len(x)} vs {len(labels.symbols)}"
        )
    if step < 0:
        raise ValueError(f"step must be >= 0, got {step}")
    n_train = len(x) if train_length is None else int(train_length)
    if n_train > len(x):
        raise TooShort(f"train_length {n_train} exceeds stream length {len(x)}")
    m = cfg.half_window
    if n_train <= max(2 * m, cfg.dfe_taps):
        raise TooShort(f"train_length {n_train} too small for window {cfg.ffe_taps}")
    w_ff = np.zeros(cfg.ffe_taps)
    w_ff[m] = 1.0
    w_fb = np.zeros(cfg.dfe_taps)
    head_mse, tail_mse = _kernels.nlms_train(
        np.ascontiguousarray(x), labels.symbols, w_ff, w_fb,
        float(step), m, n_train - m, 1e-9,
    )
    if tail_mse > head_mse:
        warnings.warn(
            f"LMS did not converge: windowed MSE rose from {head_mse:.4g} to {tail_mse:.4g}",
            NonconvergenceWarning,
            stacklevel=2,
        )
    return LmsModel(ffe_weights=w_ff, dfe_weights=w_fb, config=cfg, step_size=step)


def lms_equalize(rx, model: LmsModel) -> SymbolFrame:
    """Filter with frozen weights, slice to the nearest level, and feed the
    decisions back through the DFE taps."""
    values = _as_values(rx)
    cfg = model.config
    if len(values) <= cfg.half_window:
        raise TooShort(f"need more than {cfg.half_window} symbols, got {len(values)}")
    padded = np.concatenate([np.zeros(cfg.half_window), values, np.zeros(cfg.half_window)])
    ff_out = np.correlate(padded, model.ffe_weights, "valid")
    levels = _kernels.slicer_dfe_decide(ff_out, model.dfe_weights, PAM4_LEVELS)
    return frame_from_levels(levels)


def slicer_equalize(rx) -> SymbolFrame:
    """Bare symbol-by-symbol slicer (no equalization)."""
    return frame_from_levels(slice_levels(_as_values(rx)))


# --- model serialization (round-trip exact) ---

def model_to_dict(model: SvmModel | LmsModel) -> dict:
    if isinstance(model, SvmModel):
        return {
            "kind": "svm",
            "config": {"ffe_taps": model.config.ffe_taps, "dfe_taps": model.config.dfe_taps},
            "planes": [{"w": p.w.tolist(), "b": p.b} for p in model.planes],
            "training_meta": model.training_meta,
        }
    return {
        "kind": "ffe_dfe",
        "config": {"ffe_taps": model.config.ffe_taps, "dfe_taps": model.config.dfe_taps},
        "ffe_weights": model.ffe_weights.tolist(),
        "dfe_weights": model.dfe_weights.tolist(),
        "step_size": model.step_size,
    }


def model_from_dict(data: dict) -> SvmModel | LmsModel:
    cfg = EqTapConfig(ffe_taps=data["config"]["ffe_taps"], dfe_taps=data["config"]["dfe_taps"])
    if data["kind"] == "svm":
        planes = [Hyperplane(w=np.array(p["w"]), b=float(p["b"])) for p in data["planes"]]
        return SvmModel(planes=planes, config=cfg, training_meta=dict(data["training_meta"]))
    return LmsModel(
        ffe_weights=np.array(data["ffe_weights"]),
        dfe_weights=np.array(data["dfe_weights"]),
        config=cfg,
        step_size=float(data["step_size"]),
    )


def save_model(model: SvmModel | LmsModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def load_model(path: str | Path) -> SvmModel | LmsModel:
    return model_from_dict(json.loads(Path(path).read_text()))
