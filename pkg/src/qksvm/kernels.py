"""Quantum fidelity kernels, classical kernels and Gram-matrix utilities."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidArgumentError
from .featuremap import FeatureMapConfig, encode
from .statevec import fidelity

CLASSICAL_KINDS = ("linear", "poly", "rbf", "sigmoid")

SYMMETRY_TOL = 1e-12
DIAGONAL_TOL = 1e-10
PSD_TOL = 1e-9


@dataclass(frozen=True)
class ClassicalKernelParams:
    """Classical kernel selector.

    ``gamma=None`` resolves to ``1 / n_features`` at evaluation time.
    """

    kind: str = "rbf"
    gamma: float | None = None
    degree: int = 3
    coef0: float = 0.0

    def __post_init__(self):
        if self.kind not in CLASSICAL_KINDS:
            raise InvalidArgumentError(
                f"kernel kind must be one of {CLASSICAL_KINDS}, got {self.kind!r}"
            )
        if self.gamma is not None and not self.gamma > 0:
            raise InvalidArgumentError(f"gamma must be > 0, got {self.gamma}")
        if int(self.degree) != self.degree or self.degree < 1:
            raise InvalidArgumentError(f"degree must be an integer >= 1, got {self.degree}")

    def resolved_gamma(self, n_features: int) -> float:
        return float(self.gamma) if self.gamma is not None else 1.0 / n_features

    def describe(self, n_features: int | None = None) -> dict:
        gamma = self.gamma
        if gamma is None and n_features is not None:
            gamma = 1.0 / n_features
        return {
            "kind": self.kind,
            "gamma": gamma,
            "degree": int(self.degree),
            "coef0": float(self.coef0),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassicalKernelParams":
        return cls(
            kind=d.get("kind", "rbf"),
            gamma=d.get("gamma"),
            degree=int(d.get("degree", 3)),
            coef0=float(d.get("coef0", 0.0)),
        )


@dataclass
class KernelMatrix:
    """Square Gram matrix plus a JSON-serialisable descriptor of its kernel."""

    values: np.ndarray
    kind: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 1:
            raise InvalidArgumentError(f"Gram matrix must be square and nonempty, got {values.shape}")
        self.values = values

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def is_quantum(self) -> bool:
        return self.kind.get("family") == "quantum"

    def to_json(self) -> str:
        return json.dumps(
            {"kind": self.kind, "size": self.size, "values": self.values.tolist()},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "KernelMatrix":
        d = json.loads(text)
        return cls(np.array(d["values"], dtype=float), d.get("kind", {}))

    def to_csv(self) -> str:
        """Row-major CSV; the first line is ``# `` followed by the kind as JSON."""
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.kind, sort_keys=True) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"k{j}" for j in range(self.size)])
        for row in self.values:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "KernelMatrix":
        lines = text.splitlines()
        kind = {}
        if lines and lines[0].startswith("#"):
            kind = json.loads(lines[0][1:].strip())
            lines = lines[1:]
        rows = list(csv.reader(lines))
        if len(rows) < 2:
            raise InvalidArgumentError("Gram CSV has no data rows")
        return cls(np.array([[float(v) for v in r] for r in rows[1:]]), kind)

    def save(self, path) -> None:
        path = Path(path)
        text = self.to_json() if path.suffix == ".json" else self.to_csv()
        path.write_text(text)

    @classmethod
    def load(cls, path) -> "KernelMatrix":
        path = Path(path)
        text = path.read_text()
        return cls.from_json(text) if path.suffix == ".json" else cls.from_csv(text)


def _as_matrix(X, name="X") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidArgumentError(f"{name} must be a nonempty 2-D array, got shape {X.shape}")
    return X


def quantum_descriptor(config: FeatureMapConfig) -> dict:
    return {"family": "quantum", **config.to_dict()}


def quantum_kernel(xi, xj, config: FeatureMapConfig) -> float:
    xi = np.asarray(xi, dtype=float)
    xj = np.asarray(xj, dtype=float)
    if xi.shape != xj.shape:
        raise InvalidArgumentError(f"dimension mismatch: {xi.shape} vs {xj.shape}")
    return fidelity(encode(xi, config), encode(xj, config))


def encode_all(X, config: FeatureMapConfig) -> np.ndarray:
    """Stack the encoded states of every row of ``X`` into an ``(m, 2**n)`` array."""
    X = _as_matrix(X)
    return np.stack([encode(row, config).amplitudes for row in X])


def _fidelity_block(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    overlaps = A.conj() @ B.T
    values = overlaps.real**2 + overlaps.imag**2
    # roundoff clamp, matching fidelity()
    values[(values < 0) & (values > -1e-9)] = 0.0
    values[(values > 1) & (values < 1 + 1e-9)] = 1.0
    return values


def quantum_gram(X, config: FeatureMapConfig) -> KernelMatrix:
    """Fidelity Gram matrix of ``X`` under the encoding ``config``.

    Every row is simulated exactly once; the upper triangle is mirrored
    into the lower one and the diagonal pinned to 1.
    """
    states = encode_all(X, config)
    values = _fidelity_block(states, states)
    upper = np.triu(values, 1)
    values = upper + upper.T
    np.fill_diagonal(values, 1.0)
    return KernelMatrix(values, quantum_descriptor(config))


def quantum_cross_gram(X_rows, X_train, config: FeatureMapConfig) -> np.ndarray:
    """``(t, m)`` matrix of fidelities between query rows and training rows."""
    return _fidelity_block(encode_all(X_rows, config), encode_all(X_train, config))


def classical_kernel(xi, xj, params: ClassicalKernelParams) -> float:
    xi = np.asarray(xi, dtype=float)
    xj = np.asarray(xj, dtype=float)
    if xi.shape != xj.shape or xi.ndim != 1:
        raise InvalidArgumentError(f"dimension mismatch: {xi.shape} vs {xj.shape}")
    return float(_classical_block(xi[None, :], xj[None, :], params)[0, 0])


def _classical_block(A: np.ndarray, B: np.ndarray, params: ClassicalKernelParams) -> np.ndarray:
    if A.shape[1] != B.shape[1]:
        raise InvalidArgumentError(f"feature count mismatch: {A.shape[1]} vs {B.shape[1]}")
    gamma = params.resolved_gamma(A.shape[1])
    if params.kind == "rbf":
        sq = (
            np.sum(A**2, axis=1)[:, None]
            + np.sum(B**2, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        return np.exp(-gamma * np.maximum(sq, 0.0))
    dots = A @ B.T
    if params.kind == "linear":
        return dots
    if params.kind == "poly":
        return (gamma * dots + params.coef0) ** int(params.degree)
    return np.tanh(gamma * dots + params.coef0)


def classical_gram(X, params: ClassicalKernelParams) -> KernelMatrix:
    X = _as_matrix(X)
    values = _classical_block(X, X, params)
    values = np.triu(values) + np.triu(values, 1).T
    if params.kind == "rbf":
        np.fill_diagonal(values, 1.0)
    return KernelMatrix(values, {"family": "classical", **params.describe(X.shape[1])})


def classical_cross_gram(X_rows, X_train, params: ClassicalKernelParams) -> np.ndarray:
    return _classical_block(_as_matrix(X_rows), _as_matrix(X_train, "X_train"), params)


class PsdReport(NamedTuple):
    min_eigenvalue: float
    is_psd: bool


def psd_report(K) -> PsdReport:
    values = K.values if isinstance(K, KernelMatrix) else np.asarray(K, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {values.shape}")
    asym = np.max(np.abs(values - values.T)) if values.size else 0.0
    if asym > 1e-9:
        raise InvalidArgumentError(f"matrix is not symmetric (max deviation {asym:.3g})")
    m = values.shape[0]
    lam = float(np.linalg.eigvalsh(values)[0])
    return PsdReport(lam, lam >= -PSD_TOL * m)


def check_quantum_gram(K: KernelMatrix) -> None:
    """Raise if ``K`` breaks the fidelity-Gram invariants."""
    v = K.values
    if np.max(np.abs(v - v.T)) > SYMMETRY_TOL:
        raise InvalidArgumentError("quantum Gram is not symmetric")
    if np.max(np.abs(np.diag(v) - 1.0)) > DIAGONAL_TOL:
        raise InvalidArgumentError("quantum Gram diagonal deviates from 1")
    if v.min() < 0.0 or v.max() > 1.0 + DIAGONAL_TOL:
        raise InvalidArgumentError("quantum Gram entries leave [0, 1]")
    if not psd_report(K).is_psd:
        raise InvalidArgumentError("quantum Gram is not positive semidefinite")

