"""Config-driven experiments: train/evaluate, depth sweeps and kernel sweeps.

Every result embeds the fully resolved config, so a result file is enough
to replay the run. Wall-clock timings are kept out of the deterministic
outputs and reported separately.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import data as _data
from .exceptions import InvalidArgumentError
from .featuremap import FeatureMapConfig
from .kernels import (
    CLASSICAL_KINDS,
    ClassicalKernelParams,
    KernelMatrix,
    classical_cross_gram,
    classical_gram,
    psd_report,
    quantum_cross_gram,
    quantum_gram,
)
from .metrics import EvalReport, evaluate
from .svm import TrainConfig, kkt_report, predict_multiclass, train_multiclass

DEFAULT_CONFIG = {
    "tag": "",
    "dataset": {"generator": "hard", "kind": "xor", "n_per_class": 100, "noise": 0.0, "seed": 42},
    "preprocess": {"scaler": "minmax", "lo": 0.0, "hi": float(np.pi), "pca_k": None},
    "split": {"train_fraction": 0.8, "seed": 42},
    "kernel": {"family": "quantum", "reps": 2, "entanglement": "linear", "pair_phase": "zz_standard"},
    "trainer": TrainConfig().to_dict(),
}

_CLASSICAL_DEFAULTS = {"family": "classical", "kind": "rbf", "gamma": None, "degree": 3, "coef0": 0.0}
_QUANTUM_DEFAULTS = dict(DEFAULT_CONFIG["kernel"], n_qubits=None)


def resolve_config(config: dict | None = None) -> dict:
    """Fill defaults into a (possibly partial) experiment config."""
    config = copy.deepcopy(config or {})
    unknown = set(config) - set(DEFAULT_CONFIG)
    if unknown:
        raise InvalidArgumentError(f"unknown config sections: {sorted(unknown)}")
    out = copy.deepcopy(DEFAULT_CONFIG)
    out["tag"] = str(config.get("tag", ""))
    if "dataset" in config:
        out["dataset"] = dict(config["dataset"])
    for section in ("preprocess", "split", "trainer"):
        out[section].update(config.get(section, {}))
    kernel = dict(config.get("kernel", {}))
    family = kernel.get("family", "quantum")
    if family == "quantum":
        out["kernel"] = {**_QUANTUM_DEFAULTS, **kernel}
    elif family == "classical":
        out["kernel"] = {**_CLASSICAL_DEFAULTS, **kernel}
    else:
        raise InvalidArgumentError(f"kernel family must be quantum or classical, got {family!r}")
    # validate eagerly so errors surface before any work
    TrainConfig.from_dict(out["trainer"])
    if family == "classical":
        ClassicalKernelParams.from_dict(out["kernel"])
    return out


def load_dataset(spec: dict) -> _data.Dataset:
    if "path" in spec:
        return _data.load_csv(spec["path"], spec.get("label_column", "label"))
    if "builtin" in spec:
        return _data.load_builtin(spec["builtin"])
    if "generator" in spec:
        return _data.generate(spec)
    raise InvalidArgumentError(f"dataset config needs path, builtin or generator: {spec}")


@dataclass
class Prepared:
    train: _data.Dataset
    test: _data.Dataset
    X_train: np.ndarray
    X_test: np.ndarray
    n_classes: int


def prepare(config: dict) -> Prepared:
    """Load, split, then fit PCA and scaling on the training rows only."""
    ds = load_dataset(config["dataset"])
    split = config["split"]
    train, test = _data.stratified_split(ds, split["train_fraction"], split["seed"])
    Xtr, Xte = train.X, test.X
    pre = config["preprocess"]
    if pre.get("pca_k"):
        pca = _data.fit_pca(Xtr, int(pre["pca_k"]))
        Xtr, Xte = _data.apply_pca(pca, Xtr), _data.apply_pca(pca, Xte)
    if pre.get("scaler"):
        scaler = _data.fit_scaler(Xtr, pre["scaler"], pre.get("lo", 0.0), pre.get("hi", np.pi))
        Xtr, Xte = _data.apply_scaler(scaler, Xtr), _data.apply_scaler(scaler, Xte)
    return Prepared(train, test, Xtr, Xte, int(np.unique(ds.y).size))


def preprocess_all(config: dict) -> tuple[_data.Dataset, np.ndarray]:
    """Preprocess every row of a dataset (for Gram export).

    PCA and scaling are fitted on the configured training split, exactly as
    in :func:`prepare`, so slicing the exported Gram by the split indices
    reproduces the train/test kernels of a direct run.
    """
    ds = load_dataset(config["dataset"])
    prep = prepare(config)
    X = np.empty((ds.n_samples, prep.X_train.shape[1]))
    X[prep.train.provenance["indices"]] = prep.X_train
    X[prep.test.provenance["indices"]] = prep.X_test
    return ds, X


def feature_map_for(kernel: dict, n_features: int) -> FeatureMapConfig:
    n_qubits = kernel.get("n_qubits") or n_features
    if n_qubits != n_features:
        raise InvalidArgumentError(
            f"feature map has {n_qubits} qubits but the data has {n_features} features"
        )
    return FeatureMapConfig(n_qubits, kernel["reps"], kernel["entanglement"], kernel["pair_phase"])


def gram_pair(kernel: dict, X_train, X_test) -> tuple[KernelMatrix, np.ndarray]:
    """Training Gram matrix and test-vs-train kernel rows."""
    if kernel["family"] == "quantum":
        fmap = feature_map_for(kernel, X_train.shape[1])
        return quantum_gram(X_train, fmap), quantum_cross_gram(X_test, X_train, fmap)
    params = ClassicalKernelParams.from_dict(kernel)
    return classical_gram(X_train, params), classical_cross_gram(X_test, X_train, params)


def full_gram(kernel: dict, X) -> KernelMatrix:
    if kernel["family"] == "quantum":
        return quantum_gram(X, feature_map_for(kernel, X.shape[1]))
    return classical_gram(X, ClassicalKernelParams.from_dict(kernel))


@dataclass
class TrainEvalResult:
    config: dict
    train_report: EvalReport
    test_report: EvalReport
    model: object
    psd: dict
    kkt: list
    seconds: float = field(default=0.0, compare=False)

    @property
    def train_accuracy(self) -> float:
        return self.train_report.accuracy

    @property
    def test_accuracy(self) -> float:
        return self.test_report.accuracy

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "train": self.train_report.to_dict(),
            "test": self.test_report.to_dict(),
            "psd": self.psd,
            "kkt": self.kkt,
        }


def train_eval_on_grams(config, K_train, K_test, y_train, y_test, n_classes) -> TrainEvalResult:
    cfg = TrainConfig.from_dict(config["trainer"])
    t0 = time.perf_counter()
    model = train_multiclass(K_train, y_train, cfg)
    pred_train = predict_multiclass(model, K_train.values)
    pred_test = predict_multiclass(model, K_test)
    kkt = []
    if cfg.trainer == "smo":
        positives = model.classes[1:] if model.strategy == "binary" else model.classes
        for c, sub in zip(positives, model.models):
            binary = np.where(y_train == c, 1, -1)
            rep = kkt_report(sub, K_train, binary, cfg)
            kkt.append({"class": int(c), "violations": rep.violations, "max_violation": rep.max_violation})
    report = psd_report(K_train)
    seconds = time.perf_counter() - t0
    return TrainEvalResult(
        config=config,
        train_report=evaluate(y_train, pred_train, n_classes),
        test_report=evaluate(y_test, pred_test, n_classes),
        model=model,
        psd={"min_eigenvalue": report.min_eigenvalue, "is_psd": report.is_psd},
        kkt=kkt,
        seconds=seconds,
    )


def run_train_eval(config: dict) -> TrainEvalResult:
    config = resolve_config(config)
    t0 = time.perf_counter()
    prep = prepare(config)
    K_train, K_test = gram_pair(config["kernel"], prep.X_train, prep.X_test)
    result = train_eval_on_grams(config, K_train, K_test, prep.train.y, prep.test.y, prep.n_classes)
    result.seconds = time.perf_counter() - t0
    return result


def run_train_eval_precomputed(config: dict, gram: KernelMatrix) -> TrainEvalResult:
    """Train/evaluate from a Gram matrix over the whole dataset (``kernel`` output)."""
    config = resolve_config(config)
    ds = load_dataset(config["dataset"])
    if gram.size != ds.n_samples:
        raise InvalidArgumentError(f"Gram matrix is {gram.size}x{gram.size}, dataset has {ds.n_samples} rows")
    split = config["split"]
    train, test = _data.stratified_split(ds, split["train_fraction"], split["seed"])
    tr = np.asarray(train.provenance["indices"])
    te = np.asarray(test.provenance["indices"])
    K_train = KernelMatrix(gram.values[np.ix_(tr, tr)], gram.kind)
    K_test = gram.values[np.ix_(te, tr)]
    config["kernel"] = {"family": "precomputed", "descriptor": gram.kind}
    return train_eval_on_grams(config, K_train, K_test, train.y, test.y, int(np.unique(ds.y).size))


# -- sweeps ------------------------------------------------------------------


@dataclass
class SweepResult:
    columns: list
    rows: list  # dicts keyed by columns, plus "report"
    config: dict
    seconds: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(row[c]) for c in self.columns])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "columns": self.columns,
            "rows": [{k: v for k, v in row.items()} for row in self.rows],
        }

    def timing_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([*self.columns[:-2], "seconds"])
        for row, sec in zip(self.rows, self.seconds):
            writer.writerow([*(_fmt(row[c]) for c in self.columns[:-2]), f"{sec:.6f}"])
        return buf.getvalue()


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def sweep_depth(config: dict, reps_list) -> SweepResult:
    """Train/evaluate the quantum kernel once per circuit depth on a fixed split."""
    reps_list = [int(r) for r in reps_list]
    if not reps_list:
        raise InvalidArgumentError("reps list is empty")
    if len(set(reps_list)) != len(reps_list):
        raise InvalidArgumentError(f"duplicate reps values in {reps_list}")
    config = resolve_config(config)
    if config["kernel"]["family"] != "quantum":
        raise InvalidArgumentError("depth sweep needs a quantum kernel")
    prep = prepare(config)
    rows, seconds = [], []
    for reps in reps_list:
        t0 = time.perf_counter()
        kernel = dict(config["kernel"], reps=reps)
        K_train, K_test = gram_pair(kernel, prep.X_train, prep.X_test)
        point = dict(config, kernel=kernel)
        res = train_eval_on_grams(point, K_train, K_test, prep.train.y, prep.test.y, prep.n_classes)
        rows.append({
            "reps": reps,
            "train_acc": res.train_accuracy,
            "test_acc": res.test_accuracy,
            "train_report": res.train_report.to_dict(),
            "test_report": res.test_report.to_dict(),
        })
        seconds.append(time.perf_counter() - t0)
    return SweepResult(["reps", "train_acc", "test_acc"], rows, dict(config, reps_list=reps_list), seconds)


def kernel_spec(name: str, base: dict) -> dict:
    """Kernel section for a sweep entry: ``quantum`` or a classical kind."""
    if name == "quantum":
        quantum = base if base.get("family") == "quantum" else _QUANTUM_DEFAULTS
        return dict(quantum)
    if name in CLASSICAL_KINDS:
        out = dict(_CLASSICAL_DEFAULTS, kind=name)
        if base.get("family") == "classical":
            out.update({k: base[k] for k in ("gamma", "degree", "coef0") if k in base})
        return out
    raise InvalidArgumentError(f"unknown kernel {name!r}")


def sweep_kernels(config: dict, kernels, learning_rates) -> SweepResult:
    """One SGD train/evaluate per (kernel, learning rate) grid point, in grid order."""
    kernels = list(kernels)
    learning_rates = [float(lr) for lr in learning_rates]
    if not kernels or not learning_rates:
        raise InvalidArgumentError("kernel and learning-rate lists must be nonempty")
    if len(set(kernels)) != len(kernels) or len(set(learning_rates)) != len(learning_rates):
        raise InvalidArgumentError("duplicate grid values")
    config = resolve_config(config)
    config["trainer"]["trainer"] = "sgd"
    prep = prepare(config)
    grams = {}
    rows, seconds = [], []
    for name in kernels:
        kernel = kernel_spec(name, config["kernel"])
        t_gram = time.perf_counter()
        grams[name] = gram_pair(kernel, prep.X_train, prep.X_test)
        t_gram = time.perf_counter() - t_gram
        for lr in learning_rates:
            t0 = time.perf_counter()
            point = dict(config, kernel=kernel, trainer=dict(config["trainer"], learning_rate=lr))
            res = train_eval_on_grams(point, *grams[name], prep.train.y, prep.test.y, prep.n_classes)
            rows.append({
                "kernel": name,
                "learning_rate": lr,
                "train_acc": res.train_accuracy,
                "test_acc": res.test_accuracy,
                "train_report": res.train_report.to_dict(),
                "test_report": res.test_report.to_dict(),
            })
            seconds.append(time.perf_counter() - t0 + t_gram / len(learning_rates))
    return SweepResult(
        ["kernel", "learning_rate", "train_acc", "test_acc"],
        rows,
        dict(config, kernels=kernels, learning_rates=learning_rates),
        seconds,
    )


# -- default suite -----------------------------------------------------------

SUMMARY_COLUMNS = ["tag", "model", "train_acc", "test_acc", "precision", "recall", "f1"]


def summary_rows(tag: str, results: dict) -> list:
    rows = []
    for model_name, res in results.items():
        rows.append({
            "tag": tag,
            "model": model_name,
            "train_acc": res.train_accuracy,
            "test_acc": res.test_accuracy,
            "precision": res.test_report.precision,
            "recall": res.test_report.recall,
            "f1": res.test_report.f1,
        })
    return rows


def rows_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def load_suite(path=None) -> dict:
    if path is None:
        from importlib import resources

        text = (resources.files("qksvm") / "experiments" / "default_suite.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")
