"""scikit-learn compatible wrappers around the functional API."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import data as _data
from .exceptions import InvalidArgumentError
from .featuremap import FeatureMapConfig
from .kernels import (
    CLASSICAL_KINDS,
    ClassicalKernelParams,
    classical_cross_gram,
    classical_gram,
    quantum_cross_gram,
    quantum_gram,
)
from .svm import TrainConfig, multiclass_decision_values, predict_multiclass, train_multiclass


class AngleScaler(TransformerMixin, BaseEstimator):
    """Per-feature min-max (to ``[lo, hi]``) or standard scaling.

    The default range ``[0, pi]`` puts phase-gate angles ``2 x`` in ``[0, 2 pi]``.
    """

    def __init__(self, kind="minmax", lo=0.0, hi=np.pi):
        self.kind = kind
        self.lo = lo
        self.hi = hi

    def fit(self, X, y=None):
        X = check_array(X)
        self.params_ = _data.fit_scaler(X, self.kind, self.lo, self.hi)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise InvalidArgumentError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return _data.apply_scaler(self.params_, X)


class PCAReducer(TransformerMixin, BaseEstimator):
    def __init__(self, n_components=2):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_array(X)
        self.params_ = _data.fit_pca(X, self.n_components)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        return _data.apply_pca(self.params_, check_array(X))


class KernelSVC(ClassifierMixin, BaseEstimator):
    """Kernel SVM classifier over quantum fidelity or classical kernels.

    Parameters
    ----------
    kernel : {"quantum", "linear", "poly", "rbf", "sigmoid", "precomputed"}
        With ``"quantum"`` the feature map uses one qubit per input feature.
    reps, entanglement, pair_phase
        Feature-map settings, used only by the quantum kernel.
    gamma, degree, coef0
        Classical kernel settings. ``gamma=None`` means ``1 / n_features``.
    C, tol, max_passes, trainer, learning_rate, epochs, random_state
        Trainer settings; ``trainer`` is ``"smo"`` or ``"sgd"``.

    Multiclass targets are handled one-vs-rest. ``predict`` maps a decision
    value of exactly zero to the positive (larger) class.
    """

    def __init__(
        self,
        kernel="quantum",
        reps=2,
        entanglement="linear",
        pair_phase="zz_standard",
        gamma=None,
        degree=3,
        coef0=0.0,
        C=1.0,
        tol=1e-3,
        max_passes=50,
        trainer="smo",
        learning_rate=0.1,
        epochs=100,
        random_state=0,
    ):
        self.kernel = kernel
        self.reps = reps
        self.entanglement = entanglement
        self.pair_phase = pair_phase
        self.gamma = gamma
        self.degree = degree
        self.coef0 = coef0
        self.C = C
        self.tol = tol
        self.max_passes = max_passes
        self.trainer = trainer
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.random_state = random_state

    def _train_config(self):
        return TrainConfig(
            C=self.C,
            tol=self.tol,
            max_passes=self.max_passes,
            seed=self.random_state,
            trainer=self.trainer,
            learning_rate=self.learning_rate,
            epochs=self.epochs,
        )

    def _gram(self, X):
        if self.kernel == "precomputed":
            return X
        if self.kernel == "quantum":
            self.feature_map_ = FeatureMapConfig(X.shape[1], self.reps, self.entanglement, self.pair_phase)
            return quantum_gram(X, self.feature_map_)
        if self.kernel in CLASSICAL_KINDS:
            self.kernel_params_ = ClassicalKernelParams(self.kernel, self.gamma, self.degree, self.coef0)
            return classical_gram(X, self.kernel_params_)
        raise InvalidArgumentError(f"unknown kernel {self.kernel!r}")

    def _cross(self, X):
        if self.kernel == "precomputed":
            return X
        if self.kernel == "quantum":
            return quantum_cross_gram(X, self.X_fit_, self.feature_map_)
        return classical_cross_gram(X, self.X_fit_, self.kernel_params_)

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        check_classification_targets(y)
        if self.kernel == "precomputed" and X.shape[0] != X.shape[1]:
            raise InvalidArgumentError("precomputed kernel must be a square Gram matrix")
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        self.n_features_in_ = X.shape[1]
        self.X_fit_ = X
        self.gram_ = self._gram(X)
        self.model_ = train_multiclass(self.gram_, y_idx, self._train_config())
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise InvalidArgumentError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        scores = multiclass_decision_values(self.model_, self._cross(X))
        return scores[:, 0] if self.model_.strategy == "binary" else scores

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        return self.classes_[predict_multiclass(self.model_, self._cross(X))]
