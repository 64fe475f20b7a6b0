"""Quantum-kernel SVMs on a dense statevector simulator."""

from .exceptions import IngestionError, InvalidArgumentError
from .featuremap import FeatureMapConfig, bell_circuit, build_feature_circuit, encode
from .kernels import (
    ClassicalKernelParams,
    KernelMatrix,
    classical_gram,
    classical_kernel,
    psd_report,
    quantum_gram,
    quantum_kernel,
)
from .statevec import Circuit, Gate, Statevector, apply_circuit, apply_gate, fidelity, inner_product, new_zero_state
from .svm import SvmModel, TrainConfig, decision_value, kkt_report, predict, train_sgd, train_smo

__version__ = "0.1.0"
