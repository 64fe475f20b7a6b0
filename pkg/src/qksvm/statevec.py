"""Dense statevector simulator.

Basis index ``k`` encodes qubit 0 as the least-significant bit, so for two
qubits the amplitude order is ``|q1 q0> = 00, 01, 10, 11``.

Gate conventions::

    RX(t) = [[cos t/2, -i sin t/2], [-i sin t/2, cos t/2]]
    RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
    RZ(t) = diag(exp(-i t/2), exp(i t/2))
    P(t)  = diag(1, exp(i t))

Two-qubit gates list the control first. Gates are applied by strided
views over the amplitude array; no full 2^n x 2^n matrix is ever built.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import InvalidArgumentError

MAX_QUBITS = 16

SINGLE_QUBIT_KINDS = ("H", "RX", "RY", "RZ", "P")
TWO_QUBIT_KINDS = ("CNOT", "CZ")
PARAMETRIC_KINDS = ("RX", "RY", "RZ", "P")
GATE_KINDS = SINGLE_QUBIT_KINDS + TWO_QUBIT_KINDS

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise InvalidArgumentError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        arity = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.qubits) != arity:
            raise InvalidArgumentError(
                f"{self.kind} acts on {arity} qubit(s), got {self.qubits}"
            )
        if len(set(self.qubits)) != arity:
            raise InvalidArgumentError(f"repeated qubit index in {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise InvalidArgumentError(f"negative qubit index in {self.qubits}")
        if self.kind in PARAMETRIC_KINDS:
            if self.angle is None or not np.isfinite(self.angle):
                raise InvalidArgumentError(f"{self.kind} needs a finite angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise InvalidArgumentError(f"{self.kind} takes no angle")

    def matrix(self) -> np.ndarray:
        """Unitary of the gate: 2x2, or 4x4 in the ``|control, target>`` basis."""
        return gate_matrix(self.kind, self.angle)

    def __str__(self):
        args = ",".join(str(q) for q in self.qubits)
        if self.angle is None:
            return f"{self.kind}({args})"
        return f"{self.kind}[{self.angle:.4f}]({args})"


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    if kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2
    if kind == "RX":
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "RY":
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
    if kind == "P":
        return np.diag([1.0, np.exp(1j * angle)]).astype(complex)
    if kind == "CNOT":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if kind == "CZ":
        return np.diag([1, 1, 1, -1]).astype(complex)
    raise InvalidArgumentError(f"unknown gate kind {kind!r}")


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        _check_qubit_count(self.n_qubits)
        self.gates = list(self.gates)
        for gate in self.gates:
            _check_gate_fits(gate, self.n_qubits)

    def append(self, gate: Gate) -> "Circuit":
        _check_gate_fits(gate, self.n_qubits)
        self.gates.append(gate)
        return self

    def h(self, q):
        return self.append(Gate("H", (q,)))

    def p(self, angle, q):
        return self.append(Gate("P", (q,), angle))

    def cx(self, control, target):
        return self.append(Gate("CNOT", (control, target)))

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def draw(self) -> str:
        return draw_circuit(self)


@dataclass
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_qubit_count(self.n_qubits)
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.n_qubits,):
            raise InvalidArgumentError(
                f"expected {2**self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        self.amplitudes = amps

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())

    def to_json(self) -> str:
        """Debug dump as a JSON array of ``[re, im]`` pairs."""
        return json.dumps([[float(a.real), float(a.imag)] for a in self.amplitudes])

    @classmethod
    def from_json(cls, text: str) -> "Statevector":
        pairs = np.asarray(json.loads(text), dtype=float)
        n = int(round(np.log2(len(pairs))))
        return cls(n, pairs[:, 0] + 1j * pairs[:, 1])


def _check_qubit_count(n_qubits):
    if isinstance(n_qubits, bool) or not isinstance(n_qubits, (int, np.integer)):
        raise InvalidArgumentError(f"n_qubits must be an integer, got {n_qubits!r}")
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise InvalidArgumentError(
            f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}"
        )


def _check_gate_fits(gate: Gate, n_qubits: int):
    if max(gate.qubits) >= n_qubits:
        raise InvalidArgumentError(
            f"{gate} addresses qubit {max(gate.qubits)} on a {n_qubits}-qubit register"
        )


def new_zero_state(n_qubits: int) -> Statevector:
    _check_qubit_count(n_qubits)
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


def _apply_single(amps: np.ndarray, u: np.ndarray, q: int):
    # axis 1 of the view is the bit of qubit q
    view = amps.reshape(-1, 2, 1 << q)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    if u[0, 1] == 0 and u[1, 0] == 0:
        if u[0, 0] != 1:
            view[:, 0, :] *= u[0, 0]
        view[:, 1, :] *= u[1, 1]
        return
    view[:, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    view[:, 1, :] = u[1, 0] * a0 + u[1, 1] * a1


def _apply_two(amps: np.ndarray, kind: str, control: int, target: int):
    hi, lo = max(control, target), min(control, target)
    view = amps.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    if control == hi:
        sel = lambda c, t: (slice(None), c, slice(None), t, slice(None))  # noqa: E731
    else:
        sel = lambda c, t: (slice(None), t, slice(None), c, slice(None))  # noqa: E731
    if kind == "CNOT":
        tmp = view[sel(1, 0)].copy()
        view[sel(1, 0)] = view[sel(1, 1)]
        view[sel(1, 1)] = tmp
    elif kind == "CZ":
        view[sel(1, 1)] *= -1.0
    else:
        raise InvalidArgumentError(f"unknown two-qubit gate {kind!r}")


def _apply_inplace(amps: np.ndarray, gate: Gate):
    if gate.kind in TWO_QUBIT_KINDS:
        _apply_two(amps, gate.kind, *gate.qubits)
    else:
        _apply_single(amps, gate.matrix(), gate.qubits[0])


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    _check_gate_fits(gate, state.n_qubits)
    out = state.copy()
    _apply_inplace(out.amplitudes, gate)
    return out


def apply_circuit(state: Statevector, circuit: Circuit) -> Statevector:
    if circuit.n_qubits != state.n_qubits:
        raise InvalidArgumentError(
            f"circuit has {circuit.n_qubits} qubits, state has {state.n_qubits}"
        )
    out = state.copy()
    for gate in circuit.gates:
        _apply_inplace(out.amplitudes, gate)
    return out


def inner_product(a: Statevector, b: Statevector) -> complex:
    """Return ``<a|b>``, conjugating the first argument."""
    if a.n_qubits != b.n_qubits:
        raise InvalidArgumentError(
            f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def clamp_unit(value: float) -> float:
    # only absorbs roundoff; larger excursions are left visible
    if -1e-9 < value < 0.0:
        return 0.0
    if 1.0 < value < 1.0 + 1e-9:
        return 1.0
    return value


def fidelity(a: Statevector, b: Statevector) -> float:
    return clamp_unit(abs(inner_product(a, b)) ** 2)


def draw_circuit(circuit: Circuit) -> str:
    """Text diagram, one wire per qubit, one column per gate."""
    cols = []
    for gate in circuit.gates:
        cells = ["-"] * circuit.n_qubits
        if gate.kind == "CNOT":
            c, t = gate.qubits
            cells[c], cells[t] = "*", "X"
            for q in range(min(c, t) + 1, max(c, t)):
                cells[q] = "|"
        elif gate.kind == "CZ":
            c, t = gate.qubits
            cells[c], cells[t] = "*", "*"
            for q in range(min(c, t) + 1, max(c, t)):
                cells[q] = "|"
        elif gate.angle is None:
            cells[gate.qubits[0]] = gate.kind
        else:
            cells[gate.qubits[0]] = f"{gate.kind}({gate.angle:.3f})"
        width = max(len(s) for s in cells)
        cols.append([s.center(width, "-") for s in cells])
    lines = []
    for q in range(circuit.n_qubits):
        body = "-".join(col[q] for col in cols)
        lines.append(f"q{q}: -{body}-")
    return "\n".join(lines)


def random_circuit(
    n_qubits: int,
    n_gates: int,
    rng: np.random.Generator,
    kinds: Sequence[str] = GATE_KINDS,
) -> Circuit:
    """Random gate sequence, used for property checks and benchmarks."""
    circuit = Circuit(n_qubits)
    kinds = [k for k in kinds if n_qubits >= 2 or k not in TWO_QUBIT_KINDS]
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind in TWO_QUBIT_KINDS:
            qubits = tuple(int(q) for q in rng.choice(n_qubits, size=2, replace=False))
        else:
            qubits = (int(rng.integers(n_qubits)),)
        angle = float(rng.uniform(-2 * np.pi, 2 * np.pi)) if kind in PARAMETRIC_KINDS else None
        circuit.append(Gate(kind, qubits, angle))
    return circuit
