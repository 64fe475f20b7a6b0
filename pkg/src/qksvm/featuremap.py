"""Second-order ZZ-style encoding circuits.

One repetition of the map on ``d`` qubits is::

    H on every qubit
    P(2 * x_i) on qubit i
    for each entangled pair (i, j):
        CNOT(i -> j); P(2 * (pi - x_i) * (pi - x_j)) on j; CNOT(i -> j)

``entanglement="none"`` drops the pair block, leaving a product-state
encoder; ``"linear"`` uses nearest neighbours ``(0,1), (1,2), ...`` and
``"full"`` every pair ``i < j``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from .exceptions import InvalidArgumentError
from .statevec import Circuit, Gate, Statevector, apply_circuit, new_zero_state

ENTANGLEMENT_KINDS = ("none", "linear", "full")
PAIR_PHASES = ("zz_standard",)
MAX_REPS = 8


def _zz_standard(xi: float, xj: float) -> float:
    return (np.pi - xi) * (np.pi - xj)


_PAIR_PHASE_FUNCS = {"zz_standard": _zz_standard}


@dataclass(frozen=True)
class FeatureMapConfig:
    """Immutable description of an encoding circuit family.

    ``reps`` is the circuit depth knob swept in the depth experiments.
    """

    n_qubits: int
    reps: int = 1
    entanglement: str = "linear"
    pair_phase: str = "zz_standard"

    def __post_init__(self):
        if isinstance(self.n_qubits, bool) or int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise InvalidArgumentError(f"n_qubits must be a positive integer, got {self.n_qubits!r}")
        if isinstance(self.reps, bool) or int(self.reps) != self.reps or not 1 <= self.reps <= MAX_REPS:
            raise InvalidArgumentError(f"reps must be an integer in [1, {MAX_REPS}], got {self.reps!r}")
        if self.entanglement not in ENTANGLEMENT_KINDS:
            raise InvalidArgumentError(
                f"entanglement must be one of {ENTANGLEMENT_KINDS}, got {self.entanglement!r}"
            )
        if self.pair_phase not in PAIR_PHASES:
            raise InvalidArgumentError(f"unknown pair_phase {self.pair_phase!r}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "reps", int(self.reps))

    def pairs(self) -> list[tuple[int, int]]:
        if self.entanglement == "none":
            return []
        if self.entanglement == "linear":
            return [(i, i + 1) for i in range(self.n_qubits - 1)]
        return list(combinations(range(self.n_qubits), 2))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureMapConfig":
        keys = ("n_qubits", "reps", "entanglement", "pair_phase")
        unknown = set(d) - set(keys)
        if unknown:
            raise InvalidArgumentError(f"unknown feature map keys: {sorted(unknown)}")
        return cls(**{k: d[k] for k in keys if k in d})


def _check_features(x, config: FeatureMapConfig) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != config.n_qubits:
        raise InvalidArgumentError(
            f"feature vector of shape {x.shape} does not match {config.n_qubits} qubits"
        )
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("feature vector contains non-finite values")
    return x


def build_feature_circuit(x, config: FeatureMapConfig) -> Circuit:
    x = _check_features(x, config)
    phase = _PAIR_PHASE_FUNCS[config.pair_phase]
    pairs = config.pairs()
    circuit = Circuit(config.n_qubits)
    for _ in range(config.reps):
        for q in range(config.n_qubits):
            circuit.append(Gate("H", (q,)))
        for q in range(config.n_qubits):
            circuit.append(Gate("P", (q,), 2.0 * x[q]))
        for i, j in pairs:
            circuit.append(Gate("CNOT", (i, j)))
            circuit.append(Gate("P", (j,), 2.0 * phase(x[i], x[j])))
            circuit.append(Gate("CNOT", (i, j)))
    return circuit


def encode(x, config: FeatureMapConfig) -> Statevector:
    return apply_circuit(new_zero_state(config.n_qubits), build_feature_circuit(x, config))


def bell_circuit() -> Circuit:
    """``[H(0), CNOT(0 -> 1)]``; maps ``|00>`` to ``(|00> + |11>)/sqrt(2)``."""
    return Circuit(2, [Gate("H", (0,)), Gate("CNOT", (0, 1))])


def schmidt_rank(state: Statevector, cut: int = 1, tol: float = 1e-9) -> int:
    """Number of singular values above ``tol`` across the split after ``cut`` low qubits."""
    if not 1 <= cut < state.n_qubits:
        raise InvalidArgumentError(f"cut must lie in [1, {state.n_qubits - 1}]")
    # rows index the high qubits, columns the low ones
    mat = state.amplitudes.reshape(2 ** (state.n_qubits - cut), 2**cut)
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(sv > tol))
