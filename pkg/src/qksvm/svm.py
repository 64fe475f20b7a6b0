"""SVM training on precomputed Gram matrices.

Two trainers share one model type:

* ``train_smo`` solves the box-constrained dual
  ``max sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij`` s.t. ``0 <= a_i <= C``,
  ``sum(a_i y_i) = 0`` by two-coefficient analytic updates.
* ``train_sgd`` is kernelised hinge-loss subgradient descent with an explicit
  learning rate, for learning-rate sweeps.

Both produce a decision function ``f(k) = sum_i a_i y_i k_i + b``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidArgumentError
from .kernels import PSD_TOL, KernelMatrix

TRAINERS = ("smo", "sgd")
SUPPORT_THRESHOLD = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    tol: float = 1e-3
    max_passes: int = 50
    seed: int = 0
    trainer: str = "smo"
    learning_rate: float = 0.1
    epochs: int = 100

    def __post_init__(self):
        if not self.C > 0:
            raise InvalidArgumentError(f"C must be > 0, got {self.C}")
        if not self.tol > 0:
            raise InvalidArgumentError(f"tol must be > 0, got {self.tol}")
        if int(self.max_passes) != self.max_passes or self.max_passes < 1:
            raise InvalidArgumentError(f"max_passes must be a positive integer, got {self.max_passes}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidArgumentError(f"seed must be an unsigned integer, got {self.seed}")
        if self.trainer not in TRAINERS:
            raise InvalidArgumentError(f"trainer must be one of {TRAINERS}, got {self.trainer!r}")
        if self.trainer == "sgd" and not self.learning_rate > 0:
            raise InvalidArgumentError(f"learning_rate must be > 0, got {self.learning_rate}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise InvalidArgumentError(f"epochs must be a positive integer, got {self.epochs}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise InvalidArgumentError(f"unknown trainer keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class SvmModel:
    """Binary kernel SVM in dual form.

    For SGD-trained models ``alphas`` holds the raw coefficients used by the
    decision function; ``support_indices`` lists where they exceed the
    support threshold.
    """

    alphas: np.ndarray
    labels: np.ndarray
    bias: float
    C: float
    support_indices: np.ndarray = None
    kernel_descriptor: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.alphas = np.asarray(self.alphas, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        self.bias = float(self.bias)
        if self.support_indices is None:
            self.support_indices = np.flatnonzero(np.maximum(self.alphas, 0.0) > SUPPORT_THRESHOLD)
        self.support_indices = np.asarray(self.support_indices, dtype=int)

    @property
    def n_train(self) -> int:
        return self.alphas.shape[0]

    def to_dict(self) -> dict:
        return {
            "alphas": self.alphas.tolist(),
            "labels": self.labels.tolist(),
            "bias": self.bias,
            "support_indices": self.support_indices.tolist(),
            "C": float(self.C),
            "kernel_descriptor": self.kernel_descriptor,
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SvmModel":
        return cls(
            alphas=d["alphas"],
            labels=d["labels"],
            bias=d["bias"],
            C=d["C"],
            support_indices=d.get("support_indices"),
            kernel_descriptor=d.get("kernel_descriptor", {}),
            provenance=d.get("provenance", {}),
        )


def _gram_values(K) -> tuple[np.ndarray, dict]:
    if isinstance(K, KernelMatrix):
        return K.values, K.kind
    values = np.asarray(K, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise InvalidArgumentError(f"Gram matrix must be square, got shape {values.shape}")
    return values, {}


def _check_binary(K, y, check_psd=True) -> tuple[np.ndarray, np.ndarray, dict]:
    values, kind = _gram_values(K)
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != values.shape[0]:
        raise InvalidArgumentError(
            f"{y.shape[0] if y.ndim == 1 else y.shape} labels for a {values.shape[0]}-point Gram matrix"
        )
    if not np.all(np.isin(y, (-1, 1))):
        raise InvalidArgumentError("binary labels must be -1 or +1")
    y = y.astype(int)
    if np.unique(y).size < 2:
        raise InvalidArgumentError("both classes must be present")
    if np.max(np.abs(values - values.T)) > 1e-9:
        raise InvalidArgumentError("Gram matrix is not symmetric")
    if check_psd:
        lam = np.linalg.eigvalsh(values)[0]
        if lam < -PSD_TOL * values.shape[0]:
            raise InvalidArgumentError(f"Gram matrix is not PSD (min eigenvalue {lam:.3g})")
    return values, y, kind


def dual_objective(alphas, K, y) -> float:
    values, _ = _gram_values(K)
    ay = np.asarray(alphas) * np.asarray(y)
    return float(np.sum(alphas) - 0.5 * ay @ values @ ay)


def _bias_from_free(alphas, y, values, C, eps=SUPPORT_THRESHOLD) -> float:
    margins = y - values @ (alphas * y)
    free = (alphas > eps) & (alphas < C - eps)
    if free.any():
        return float(np.mean(margins[free]))
    # no free coefficient: take the midpoint of the interval of biases that
    # keep every bounded point on the right side of its condition
    lower_side = ((alphas <= eps) & (y > 0)) | ((alphas >= C - eps) & (y < 0))
    lo = margins[lower_side].max(initial=-np.inf)
    hi = margins[~lower_side].min(initial=np.inf)
    if np.isfinite(lo) and np.isfinite(hi):
        return float(0.5 * (lo + hi))
    if np.isfinite(lo) or np.isfinite(hi):
        return float(lo if np.isfinite(lo) else hi)
    return float(np.mean(y))


@dataclass
class SmoTrace:
    """Optional recorder of SMO progress."""

    objectives: list = field(default_factory=list)
    full_sweeps: int = 0
    sweeps: int = 0


def train_smo(K, y, cfg: TrainConfig | None = None, *, trace: SmoTrace | None = None) -> SvmModel:
    """Train a binary SVM on a precomputed Gram matrix by SMO.

    The outer loop alternates full sweeps and sweeps over free coefficients.
    Each violator ``i`` is paired with the ``j`` that maximises ``|E_i - E_j|``;
    if that step makes no progress, the remaining candidates are tried in a
    seeded random order. Optimisation runs to ``tol / 10`` so that the final
    bias (averaged over free support vectors) still meets ``tol``.

    Parameters
    ----------
    K : KernelMatrix or ndarray of shape (m, m)
    y : ndarray of shape (m,)
        Labels in {-1, +1}.
    cfg : TrainConfig
    trace : SmoTrace, optional
        If given, its ``objectives`` list receives the dual objective after
        every successful pair update.
    """
    cfg = cfg or TrainConfig()
    values, y, kind = _check_binary(K, y)
    m = values.shape[0]
    C = float(cfg.C)
    inner_tol = cfg.tol / 10.0
    rng = np.random.default_rng(cfg.seed)
    yf = y.astype(float)

    alphas = np.zeros(m)
    b = 0.0
    # f_i without bias; E_i = f_i + b - y_i
    f = np.zeros(m)
    diag = np.diag(values)
    n_updates = 0

    def kkt_violated(i):
        r = yf[i] * (f[i] + b) - 1.0
        return (r < -inner_tol and alphas[i] < C) or (r > inner_tol and alphas[i] > 0)

    def take_step(i, j):
        nonlocal b, n_updates
        if i == j:
            return False
        ai, aj = alphas[i], alphas[j]
        yi, yj = yf[i], yf[j]
        Ei = f[i] + b - yi
        Ej = f[j] + b - yj
        if yi != yj:
            lo, hi = max(0.0, aj - ai), min(C, C + aj - ai)
        else:
            lo, hi = max(0.0, ai + aj - C), min(C, ai + aj)
        if hi - lo < 1e-12:
            return False
        eta = diag[i] + diag[j] - 2.0 * values[i, j]
        if eta <= 1e-12:
            return False
        aj_new = min(hi, max(lo, aj + yj * (Ei - Ej) / eta))
        if abs(aj_new - aj) < 1e-12 * (aj_new + aj + 1e-12):
            return False
        ai_new = ai + yi * yj * (aj - aj_new)
        # snap to the box so that the bounds hold exactly
        ai_new = min(C, max(0.0, ai_new))
        if ai_new < 1e-12:
            ai_new = 0.0
        elif C - ai_new < 1e-12 * C:
            ai_new = C
        dai, daj = ai_new - ai, aj_new - aj

        b1 = b - Ei - yi * dai * values[i, i] - yj * daj * values[i, j]
        b2 = b - Ej - yi * dai * values[i, j] - yj * daj * values[j, j]
        if 0 < ai_new < C:
            b_new = b1
        elif 0 < aj_new < C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)

        f[:] += yi * dai * values[:, i] + yj * daj * values[:, j]
        alphas[i], alphas[j] = ai_new, aj_new
        b = b_new
        n_updates += 1
        if trace is not None:
            trace.objectives.append(dual_objective(alphas, values, yf))
        return True

    def examine(i):
        if not kkt_violated(i):
            return False
        E = f + b - yf
        j = int(np.argmax(np.abs(E - E[i])))
        if take_step(i, j):
            return True
        for j in rng.permutation(m):
            if take_step(i, int(j)):
                return True
        return False

    # max_passes caps full sweeps; free-set sweeps in between are bounded separately
    examine_all = True
    full_sweeps = sweeps = 0
    while full_sweeps < cfg.max_passes and sweeps < 100 * cfg.max_passes * max(m, 10):
        sweeps += 1
        if examine_all:
            full_sweeps += 1
            candidates = range(m)
        else:
            candidates = [i for i in range(m) if 0 < alphas[i] < C]
        changed = sum(examine(i) for i in candidates)
        if examine_all and changed == 0:
            break
        examine_all = not examine_all and changed == 0

    bias = _bias_from_free(alphas, yf, values, C)
    if trace is not None:
        trace.full_sweeps, trace.sweeps = full_sweeps, sweeps
    return SvmModel(
        alphas=alphas,
        labels=y,
        bias=bias,
        C=C,
        kernel_descriptor=kind,
        provenance={
            "trainer": "smo",
            "seed": int(cfg.seed),
            "tol": float(cfg.tol),
            "max_passes": int(cfg.max_passes),
            "full_sweeps": full_sweeps,
            "updates": n_updates,
        },
    )


def train_sgd(K, y, cfg: TrainConfig) -> SvmModel:
    """Kernelised hinge-loss SGD with a fixed learning rate.

    Each step visits one sample ``i`` (seeded shuffle per epoch), shrinks all
    coefficients by ``1 - learning_rate * lam`` with ``lam = 1 / (C m)``, and on
    a margin violation ``y_i f(x_i) < 1`` adds ``learning_rate`` to ``beta_i``
    and ``learning_rate * y_i`` to the unregularised bias.
    """
    if not cfg.learning_rate > 0:
        raise InvalidArgumentError(f"learning_rate must be > 0, got {cfg.learning_rate}")
    # subgradient steps are defined for indefinite kernels too (sigmoid)
    values, y, kind = _check_binary(K, y, check_psd=False)
    m = values.shape[0]
    lr = float(cfg.learning_rate)
    lam = 1.0 / (cfg.C * m)
    decay = 1.0 - lr * lam
    if decay <= 0:
        raise InvalidArgumentError("learning_rate * lambda must be < 1")
    rng = np.random.default_rng(cfg.seed)
    yf = y.astype(float)

    beta = np.zeros(m)
    b = 0.0
    for _ in range(cfg.epochs):
        for i in rng.permutation(m):
            margin = yf[i] * (values[i] @ (beta * yf) + b)
            beta *= decay
            if margin < 1.0:
                beta[i] += lr
                b += lr * yf[i]
    return SvmModel(
        alphas=beta,
        labels=y,
        bias=b,
        C=float(cfg.C),
        kernel_descriptor=kind,
        provenance={
            "trainer": "sgd",
            "seed": int(cfg.seed),
            "learning_rate": lr,
            "epochs": int(cfg.epochs),
        },
    )


def train(K, y, cfg: TrainConfig) -> SvmModel:
    return train_sgd(K, y, cfg) if cfg.trainer == "sgd" else train_smo(K, y, cfg)


def decision_value(model: SvmModel, k_row) -> float:
    k_row = np.asarray(k_row, dtype=float)
    if k_row.shape != (model.n_train,):
        raise InvalidArgumentError(
            f"kernel row has shape {k_row.shape}, model has {model.n_train} training points"
        )
    return float(np.dot(model.alphas * model.labels, k_row) + model.bias)


def decision_values(model: SvmModel, K_rows) -> np.ndarray:
    K_rows = np.asarray(K_rows, dtype=float)
    if K_rows.ndim == 1:
        K_rows = K_rows[None, :]
    if K_rows.ndim != 2 or K_rows.shape[1] != model.n_train:
        raise InvalidArgumentError(
            f"kernel rows have shape {K_rows.shape}, model has {model.n_train} training points"
        )
    return K_rows @ (model.alphas * model.labels) + model.bias


def predict(model: SvmModel, K_rows) -> np.ndarray:
    """Labels in {-1, +1}; a decision value of exactly zero maps to +1."""
    return np.where(decision_values(model, K_rows) >= 0.0, 1, -1)


class KktReport(NamedTuple):
    violations: int
    max_violation: float


def kkt_report(model: SvmModel, K, y, cfg: TrainConfig | None = None, tol: float | None = None) -> KktReport:
    """Count points breaking the dual optimality conditions at ``tol``."""
    values, _ = _gram_values(K)
    y = np.asarray(y, dtype=float)
    if tol is None:
        tol = cfg.tol if cfg is not None else 1e-3
    C = model.C
    r = y * (values @ (model.alphas * y) + model.bias)
    eps = SUPPORT_THRESHOLD
    at_zero = model.alphas <= eps
    at_c = model.alphas >= C - eps
    free = ~at_zero & ~at_c
    gap = np.zeros_like(r)
    gap[at_zero] = np.maximum(0.0, (1.0 - tol) - r[at_zero])
    gap[free] = np.maximum(0.0, np.abs(r[free] - 1.0) - tol)
    gap[at_c] = np.maximum(0.0, r[at_c] - (1.0 + tol))
    # raw distance from the condition, excluding the tolerance band
    raw = np.zeros_like(r)
    raw[at_zero] = np.maximum(0.0, 1.0 - r[at_zero])
    raw[free] = np.abs(r[free] - 1.0)
    raw[at_c] = np.maximum(0.0, r[at_c] - 1.0)
    return KktReport(int(np.count_nonzero(gap > 0)), float(raw.max(initial=0.0)))


@dataclass
class MulticlassModel:
    classes: np.ndarray
    models: list
    strategy: str = "one-vs-rest"

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "classes": self.classes.tolist(),
            "models": [m.to_dict() for m in self.models],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "MulticlassModel":
        return cls(np.asarray(d["classes"]), [SvmModel.from_dict(m) for m in d["models"]], d.get("strategy", "one-vs-rest"))


def train_multiclass(K, y, cfg: TrainConfig) -> MulticlassModel:
    y = np.asarray(y)
    classes, counts = np.unique(y, return_counts=True)
    if classes.size < 2:
        raise InvalidArgumentError("need at least two classes")
    if counts.min() < 2:
        raise InvalidArgumentError(
            f"class {classes[np.argmin(counts)]!r} has fewer than 2 samples"
        )
    if classes.size == 2:
        # reduction: one binary model, the larger label playing +1
        binary = np.where(y == classes[1], 1, -1)
        return MulticlassModel(classes, [train(K, binary, cfg)], strategy="binary")
    models = [train(K, np.where(y == c, 1, -1), cfg) for c in classes]
    return MulticlassModel(classes, models)


def multiclass_decision_values(model: MulticlassModel, K_rows) -> np.ndarray:
    return np.column_stack([decision_values(m, K_rows) for m in model.models])


def predict_multiclass(model: MulticlassModel, K_rows) -> np.ndarray:
    if model.strategy == "binary":
        return np.where(predict(model.models[0], K_rows) == 1, model.classes[1], model.classes[0])
    scores = multiclass_decision_values(model, K_rows)
    # argmax returns the first maximum: ties go to the lowest class index
    return model.classes[np.argmax(scores, axis=1)]
