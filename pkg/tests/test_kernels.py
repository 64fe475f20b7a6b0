import json
from pathlib import Path

import numpy as np
import pytest

import oracle
from qksvm.exceptions import InvalidArgumentError
from qksvm.featuremap import FeatureMapConfig
from qksvm.kernels import (
    ClassicalKernelParams,
    KernelMatrix,
    check_quantum_gram,
    classical_cross_gram,
    classical_gram,
    classical_kernel,
    psd_report,
    quantum_cross_gram,
    quantum_gram,
    quantum_kernel,
)

GOLDEN = json.loads((Path(__file__).parent / "golden.json").read_text())


class TestQuantumKernel:
    def test_self_kernel_is_one(self):
        rng = np.random.default_rng(0)
        for ent in ("none", "linear", "full"):
            cfg = FeatureMapConfig(3, 2, ent)
            x = rng.uniform(0, np.pi, 3)
            assert quantum_kernel(x, x, cfg) == pytest.approx(1.0, abs=1e-12)

    def test_zero_inputs(self):
        assert quantum_kernel([0, 0], [0, 0], FeatureMapConfig(2, 1)) == pytest.approx(1.0, abs=1e-15)

    def test_golden_value(self):
        g = GOLDEN["quantum_kernel_v_star"]
        cfg = FeatureMapConfig(2, g["reps"], g["entanglement"])
        value = quantum_kernel(g["xi"], g["xj"], cfg)
        assert value == pytest.approx(g["value"], abs=1e-12)
        assert value == pytest.approx(oracle.dense_kernel(g["xi"], g["xj"], 2, "linear"), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            quantum_kernel([0.1, 0.2], [0.1, 0.2, 0.3], FeatureMapConfig(2))
        with pytest.raises(InvalidArgumentError):
            quantum_kernel([0.1, 0.2, 0.3], [0.1, 0.2, 0.3], FeatureMapConfig(2))


class TestQuantumGram:
    def test_single_row(self):
        K = quantum_gram([[0.4, 0.2]], FeatureMapConfig(2))
        np.testing.assert_array_equal(K.values, [[1.0]])

    def test_identical_rows(self):
        K = quantum_gram([[0.4, 0.2], [0.4, 0.2]], FeatureMapConfig(2))
        np.testing.assert_allclose(K.values, np.ones((2, 2)), atol=1e-12)

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(1)
        X = rng.uniform(0, np.pi, (4, 2))
        cfg = FeatureMapConfig(2, 2, "linear")
        K = quantum_gram(X, cfg)
        for i in range(4):
            for j in range(4):
                assert abs(K.values[i, j] - quantum_kernel(X[i], X[j], cfg)) <= 1e-12
                assert abs(K.values[i, j] - oracle.dense_kernel(X[i], X[j], 2, "linear")) <= 1e-12

    def test_cross_gram_consistent(self):
        rng = np.random.default_rng(2)
        X = rng.uniform(0, np.pi, (6, 3))
        cfg = FeatureMapConfig(3, 2, "full")
        K = quantum_gram(X, cfg)
        cross = quantum_cross_gram(X[:2], X, cfg)
        np.testing.assert_allclose(cross, K.values[:2], atol=1e-12)

    def test_invariants(self):
        rng = np.random.default_rng(4)
        for d in (2, 3, 4):
            X = rng.uniform(0, np.pi, (12, d))
            K = quantum_gram(X, FeatureMapConfig(d, 2, "linear"))
            check_quantum_gram(K)
            assert np.array_equal(np.diag(K.values), np.ones(12))
            assert np.array_equal(K.values, K.values.T)

    def test_empty_dataset(self):
        with pytest.raises(InvalidArgumentError):
            quantum_gram(np.zeros((0, 2)), FeatureMapConfig(2))

    def test_entanglement_changes_kernel(self):
        rng = np.random.default_rng(10)
        X = rng.uniform(0, np.pi, (10, 2))
        plain = quantum_gram(X, FeatureMapConfig(2, 2, "none")).values
        ent = quantum_gram(X, FeatureMapConfig(2, 2, "linear")).values
        assert np.max(np.abs(ent - plain)) > 1e-3

    def test_descriptor(self):
        K = quantum_gram([[0.1, 0.2]], FeatureMapConfig(2, 3, "full"))
        assert K.kind == {"family": "quantum", "n_qubits": 2, "reps": 3, "entanglement": "full",
                          "pair_phase": "zz_standard"}
        assert K.is_quantum


class TestClassical:
    def test_linear(self):
        assert classical_kernel([1, 2], [3, 4], ClassicalKernelParams("linear")) == 11

    @pytest.mark.parametrize("gamma", [0.01, 1.0, 50.0])
    def test_rbf_self(self, gamma):
        assert classical_kernel([0.3, -2], [0.3, -2], ClassicalKernelParams("rbf", gamma)) == 1.0

    def test_poly(self):
        p = ClassicalKernelParams("poly", gamma=1.0, degree=2, coef0=0.0)
        assert classical_kernel([1, 1], [1, 1], p) == 4

    def test_sigmoid(self):
        p = ClassicalKernelParams("sigmoid", gamma=0.5, coef0=-1.0)
        assert classical_kernel([1, 2], [3, 4], p) == pytest.approx(np.tanh(0.5 * 11 - 1.0))

    def test_default_gamma_is_inverse_feature_count(self):
        p = ClassicalKernelParams("rbf")
        assert classical_kernel([0, 0, 0, 0], [1, 1, 0, 0], p) == pytest.approx(np.exp(-0.25 * 2))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            classical_kernel([1, 2], [1, 2, 3], ClassicalKernelParams("linear"))

    @pytest.mark.parametrize("kwargs", [dict(kind="cubic"), dict(gamma=0.0), dict(gamma=-1.0), dict(degree=0)])
    def test_param_validation(self, kwargs):
        with pytest.raises(InvalidArgumentError):
            ClassicalKernelParams(**kwargs)

    def test_linear_gram_orthogonal_rows(self):
        K = classical_gram([[1, 0], [0, 1]], ClassicalKernelParams("linear"))
        np.testing.assert_array_equal(K.values, np.eye(2))

    def test_rbf_gram(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(8, 3))
        for gamma in (0.1, 1.0, 10.0):
            K = classical_gram(X, ClassicalKernelParams("rbf", gamma))
            np.testing.assert_array_equal(np.diag(K.values), np.ones(8))
            assert psd_report(K).is_psd

    def test_sigmoid_gram_symmetric(self):
        X = np.random.default_rng(1).normal(size=(5, 3))
        K = classical_gram(X, ClassicalKernelParams("sigmoid", 0.7, coef0=0.3))
        assert np.max(np.abs(K.values - K.values.T)) <= 1e-12

    def test_gram_matches_pointwise(self):
        X = np.random.default_rng(2).normal(size=(5, 3))
        for kind in ("linear", "poly", "rbf", "sigmoid"):
            p = ClassicalKernelParams(kind, 0.4, 2, 0.5)
            K = classical_gram(X, p).values
            ref = [[classical_kernel(a, b, p) for b in X] for a in X]
            np.testing.assert_allclose(K, ref, atol=1e-12)
            np.testing.assert_allclose(classical_cross_gram(X[:2], X, p), K[:2], atol=1e-12)


class TestPsdReport:
    def test_identity(self):
        rep = psd_report(np.eye(3))
        assert rep.min_eigenvalue == pytest.approx(1.0)
        assert rep.is_psd

    def test_indefinite(self):
        rep = psd_report(np.array([[1.0, 2.0], [2.0, 1.0]]))
        assert rep.min_eigenvalue == pytest.approx(-1.0)
        assert not rep.is_psd

    def test_asymmetric_rejected(self):
        with pytest.raises(InvalidArgumentError):
            psd_report(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_quantum_grams_psd(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            d = int(rng.integers(2, 5))
            X = rng.uniform(0, np.pi, (int(rng.integers(2, 15)), d))
            assert psd_report(quantum_gram(X, FeatureMapConfig(d, int(rng.integers(1, 4))))).is_psd


class TestSerialisation:
    @pytest.fixture
    def gram(self):
        X = np.random.default_rng(3).uniform(0, np.pi, (4, 2))
        return quantum_gram(X, FeatureMapConfig(2, 2))

    def test_csv_round_trip(self, gram, tmp_path):
        path = tmp_path / "k.csv"
        gram.save(path)
        text = path.read_text()
        assert text.startswith("# {")
        assert text.splitlines()[1] == "k0,k1,k2,k3"
        back = KernelMatrix.load(path)
        np.testing.assert_array_equal(back.values, gram.values)
        assert back.kind == gram.kind

    def test_json_round_trip(self, gram, tmp_path):
        path = tmp_path / "k.json"
        gram.save(path)
        back = KernelMatrix.load(path)
        np.testing.assert_array_equal(back.values, gram.values)
        assert json.loads(path.read_text())["size"] == 4

    def test_non_square_rejected(self):
        with pytest.raises(InvalidArgumentError):
            KernelMatrix(np.zeros((2, 3)))
