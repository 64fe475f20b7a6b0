"""Reference implementations that share no code with the package.

Dense gate matrices are assembled from Kronecker products of 2x2 blocks,
with qubit 0 as the least-significant bit (rightmost Kronecker factor).
"""

import cmath
import math

import numpy as np

I2 = np.eye(2, dtype=complex)
KET = [np.array([[1, 0], [0, 0]], dtype=complex), np.array([[0, 1], [0, 0]], dtype=complex),
       np.array([[0, 0], [1, 0]], dtype=complex), np.array([[0, 0], [0, 1]], dtype=complex)]


def ketbra(a, b):
    """|a><b| for single bits."""
    m = np.zeros((2, 2), dtype=complex)
    m[a, b] = 1.0
    return m


def small_matrix(kind, angle=None):
    s = 1 / math.sqrt(2)
    if kind == "H":
        return np.array([[s, s], [s, -s]], dtype=complex)
    if kind == "RX":
        return np.array([[math.cos(angle / 2), -1j * math.sin(angle / 2)],
                         [-1j * math.sin(angle / 2), math.cos(angle / 2)]])
    if kind == "RY":
        return np.array([[math.cos(angle / 2), -math.sin(angle / 2)],
                         [math.sin(angle / 2), math.cos(angle / 2)]], dtype=complex)
    if kind == "RZ":
        return np.array([[cmath.exp(-0.5j * angle), 0], [0, cmath.exp(0.5j * angle)]])
    if kind == "P":
        return np.array([[1, 0], [0, cmath.exp(1j * angle)]])
    if kind == "CNOT":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if kind == "CZ":
        return np.diag([1, 1, 1, -1]).astype(complex)
    raise ValueError(kind)


def _kron_all(ops_by_qubit):
    out = np.array([[1.0 + 0j]])
    for op in reversed(ops_by_qubit):  # qubit n-1 leftmost
        out = np.kron(out, op)
    return out


def full_matrix(kind, qubits, n, angle=None):
    u = small_matrix(kind, angle)
    if len(qubits) == 1:
        ops = [I2] * n
        ops[qubits[0]] = u
        return _kron_all(ops)
    c, t = qubits
    total = np.zeros((2**n, 2**n), dtype=complex)
    for a in range(2):
        for b in range(2):
            for cc in range(2):
                for d in range(2):
                    coef = u[2 * a + b, 2 * cc + d]
                    if coef == 0:
                        continue
                    ops = [I2] * n
                    ops[c] = ketbra(a, cc)
                    ops[t] = ketbra(b, d)
                    total += coef * _kron_all(ops)
    return total


def run_dense(gates, n):
    """gates: iterable of (kind, qubits, angle)."""
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    for kind, qubits, angle in gates:
        psi = full_matrix(kind, qubits, n, angle) @ psi
    return psi


def zz_gates(x, reps, entanglement):
    """Gate list of the second-order feature map, written out by hand."""
    n = len(x)
    if entanglement == "none":
        pairs = []
    elif entanglement == "linear":
        pairs = [(i, i + 1) for i in range(n - 1)]
    else:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    gates = []
    for _ in range(reps):
        gates += [("H", (q,), None) for q in range(n)]
        gates += [("P", (q,), 2 * x[q]) for q in range(n)]
        for i, j in pairs:
            gates.append(("CNOT", (i, j), None))
            gates.append(("P", (j,), 2 * (math.pi - x[i]) * (math.pi - x[j])))
            gates.append(("CNOT", (i, j), None))
    return gates


def dense_kernel(xi, xj, reps, entanglement):
    a = run_dense(zz_gates(xi, reps, entanglement), len(xi))
    b = run_dense(zz_gates(xj, reps, entanglement), len(xj))
    return abs(np.vdot(a, b)) ** 2


def count_confusion(y_true, y_pred, n_classes):
    """Plain-loop confusion matrix."""
    table = [[0] * n_classes for _ in range(n_classes)]
    for t, p in zip(y_true, y_pred):
        table[t][p] += 1
    return table


def kkt_violations(alphas, y, K, b, C, tol):
    """Independent KKT audit by explicit per-point loops."""
    m = len(y)
    count = 0
    for i in range(m):
        f = sum(alphas[j] * y[j] * K[i][j] for j in range(m)) + b
        r = y[i] * f
        a = alphas[i]
        if a <= 1e-8:
            ok = r >= 1 - tol
        elif a >= C - 1e-8:
            ok = r <= 1 + tol
        else:
            ok = abs(r - 1) <= tol
        count += not ok
    return count
