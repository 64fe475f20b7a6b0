"""Dataset loading, synthetic generators, scaling, PCA and stratified splits."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .exceptions import IngestionError, InvalidArgumentError

HARD_KINDS = ("xor", "rings", "noisy_labels")
BUILTIN_DATASETS = ("breast_cancer", "iris")


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str] | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        if self.X.ndim != 2 or self.X.shape[0] < 1:
            raise InvalidArgumentError(f"X must be a nonempty 2-D array, got shape {self.X.shape}")
        if self.y.shape != (self.X.shape[0],):
            raise InvalidArgumentError(f"{self.y.shape} labels for {self.X.shape[0]} rows")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.y)

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        prov = dict(self.provenance, subset_size=int(indices.size))
        return Dataset(self.X[indices], self.y[indices], self.feature_names, prov)

    def with_features(self, X, feature_names=None) -> "Dataset":
        return Dataset(X, self.y, feature_names, dict(self.provenance))

    def to_csv(self, path, label_column: str = "label") -> None:
        names = self.feature_names or [f"f{j + 1}" for j in range(self.n_features)]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([*names, label_column])
            for row, label in zip(self.X, self.y):
                writer.writerow([*(repr(float(v)) for v in row), int(label)])


def load_csv(path, label_column: str = "label") -> Dataset:
    """Read a headed CSV; labels become a contiguous 0-based catalog.

    Label values are sorted (numerically when every value parses as a
    number, else lexically) before numbering, so ``{B, M}`` maps to
    ``{B: 0, M: 1}``.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"{path}: no such file")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise IngestionError(f"{path}: file is empty")
    header = [h.strip() for h in rows[0]]
    if label_column not in header:
        raise IngestionError(f"{path}: label column {label_column!r} not in header {header}")
    label_idx = header.index(label_column)
    feature_idx = [j for j in range(len(header)) if j != label_idx]
    data_rows = [r for r in rows[1:] if any(cell.strip() for cell in r)]
    if not data_rows:
        raise IngestionError(f"{path}: no data rows")

    X = np.empty((len(data_rows), len(feature_idx)))
    raw_labels = []
    for i, row in enumerate(data_rows):
        line = i + 2
        if len(row) != len(header):
            raise IngestionError(f"{path}: line {line} has {len(row)} cells, expected {len(header)}")
        for k, j in enumerate(feature_idx):
            cell = row[j].strip()
            try:
                value = float(cell)
            except ValueError:
                raise IngestionError(
                    f"{path}: line {line}, column {header[j]!r}: non-numeric cell {cell!r}"
                ) from None
            if not np.isfinite(value):
                raise IngestionError(f"{path}: line {line}, column {header[j]!r}: non-finite value")
            X[i, k] = value
        label = row[label_idx].strip()
        if not label:
            raise IngestionError(f"{path}: line {line}, column {label_column!r}: blank label")
        raw_labels.append(label)

    catalog = _label_catalog(raw_labels)
    y = np.array([catalog[v] for v in raw_labels])
    return Dataset(
        X,
        y,
        [header[j] for j in feature_idx],
        {"source": str(path), "label_column": label_column, "catalog": catalog},
    )


def _label_catalog(values) -> dict:
    distinct = set(values)
    try:
        ordered = sorted(distinct, key=float)
    except ValueError:
        ordered = sorted(distinct)
    return {v: i for i, v in enumerate(ordered)}


def load_builtin(name: str) -> Dataset:
    """Load one of the CSV fixtures bundled with the package."""
    if name not in BUILTIN_DATASETS:
        raise InvalidArgumentError(f"unknown builtin dataset {name!r}; choose from {BUILTIN_DATASETS}")
    ref = resources.files("qksvm") / "datasets" / f"{name}.csv"
    with resources.as_file(ref) as path:
        ds = load_csv(path, "label")
    ds.provenance = {"builtin": name, "catalog": ds.provenance["catalog"]}
    return ds


# -- preprocessing ---------------------------------------------------------


@dataclass(frozen=True)
class ScalerParams:
    kind: str
    stat_a: np.ndarray  # min (minmax) or mean (standard)
    stat_b: np.ndarray  # max (minmax) or stddev (standard)
    lo: float = 0.0
    hi: float = 1.0


def _features(data) -> np.ndarray:
    X = data.X if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidArgumentError("cannot fit on an empty dataset")
    return X


def fit_scaler(train, kind: str = "minmax", lo: float = 0.0, hi: float = np.pi) -> ScalerParams:
    X = _features(train)
    if kind == "minmax":
        if not hi > lo:
            raise InvalidArgumentError(f"need hi > lo, got [{lo}, {hi}]")
        return ScalerParams("minmax", X.min(axis=0), X.max(axis=0), float(lo), float(hi))
    if kind == "standard":
        return ScalerParams("standard", X.mean(axis=0), X.std(axis=0), float(lo), float(hi))
    raise InvalidArgumentError(f"unknown scaler kind {kind!r}")


def apply_scaler(params: ScalerParams, X) -> np.ndarray:
    """Affine per-feature map; values outside the fitted range are not clipped."""
    X = np.asarray(X, dtype=float)
    if params.kind == "minmax":
        span = params.stat_b - params.stat_a
        const = span == 0
        scale = np.where(const, 0.0, (params.hi - params.lo) / np.where(const, 1.0, span))
        out = params.lo + (X - params.stat_a) * scale
        out[:, const] = params.lo
        return out
    std = params.stat_b
    const = std == 0
    out = (X - params.stat_a) / np.where(const, 1.0, std)
    out[:, const] = 0.0
    return out


@dataclass(frozen=True)
class PcaParams:
    k: int
    mean: np.ndarray
    components: np.ndarray  # (k, d), orthonormal rows
    explained_variance: np.ndarray


def fit_pca(train, k: int) -> PcaParams:
    """Top-``k`` principal axes of the training covariance.

    Each component is sign-fixed so its largest-magnitude entry is positive.
    """
    X = _features(train)
    m, d = X.shape
    if not 1 <= k <= d:
        raise InvalidArgumentError(f"k must lie in [1, {d}], got {k}")
    if m < 2:
        raise InvalidArgumentError("PCA needs at least 2 samples")
    mean = X.mean(axis=0)
    cov = np.cov(X - mean, rowvar=False).reshape(d, d)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals, kind="stable")[::-1][:k]
    comps = evecs[:, order].T.copy()
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaParams(int(k), mean, comps, evals[order])


def apply_pca(params: PcaParams, X) -> np.ndarray:
    return (np.asarray(X, dtype=float) - params.mean) @ params.components.T


# -- splitting ---------------------------------------------------------------


def stratified_split(ds: Dataset, train_fraction: float = 0.8, seed: int = 0):
    """Per-class shuffled split.

    Each class contributes ``round(train_fraction * count)`` training rows,
    adjusted so both sides keep at least one row of every class. Returns
    ``(train, test)`` datasets whose provenance carries the sorted indices.
    """
    if not 0 < train_fraction < 1:
        raise InvalidArgumentError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for c in np.unique(ds.y):
        members = np.flatnonzero(ds.y == c)
        if members.size < 2:
            raise InvalidArgumentError(f"class {c} has {members.size} sample(s); need at least 2")
        members = rng.permutation(members)
        n_train = int(np.floor(train_fraction * members.size + 0.5))
        n_train = min(max(n_train, 1), members.size - 1)
        train_idx.extend(members[:n_train])
        test_idx.extend(members[n_train:])
    train_idx = np.sort(np.array(train_idx, dtype=int))
    test_idx = np.sort(np.array(test_idx, dtype=int))
    train = ds.subset(train_idx)
    test = ds.subset(test_idx)
    train.provenance["indices"] = train_idx.tolist()
    test.provenance["indices"] = test_idx.tolist()
    return train, test


# -- generators --------------------------------------------------------------


def _flip_labels(y: np.ndarray, fraction: float, rng: np.random.Generator) -> np.ndarray:
    if not 0 <= fraction <= 1:
        raise InvalidArgumentError(f"noise must lie in [0, 1], got {fraction}")
    y = y.copy()
    n_flip = int(round(fraction * y.size))
    if n_flip:
        idx = rng.choice(y.size, size=n_flip, replace=False)
        y[idx] = 1 - y[idx]
    return y


def gen_blobs(n_per_class: int, centers, spread: float, seed: int = 0) -> Dataset:
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if centers.shape[0] < 2:
        raise InvalidArgumentError("need at least two centers")
    if not spread > 0:
        raise InvalidArgumentError(f"spread must be > 0, got {spread}")
    if n_per_class < 1:
        raise InvalidArgumentError(f"n_per_class must be >= 1, got {n_per_class}")
    rng = np.random.default_rng(seed)
    X = np.concatenate([c + spread * rng.standard_normal((n_per_class, centers.shape[1])) for c in centers])
    y = np.repeat(np.arange(centers.shape[0]), n_per_class)
    prov = {
        "generator": "blobs",
        "n_per_class": int(n_per_class),
        "centers": centers.tolist(),
        "spread": float(spread),
        "seed": int(seed),
    }
    return Dataset(X, y, None, prov)


def gen_hard(n_per_class: int, kind: str = "xor", noise: float = 0.0, seed: int = 0) -> Dataset:
    """Non-linearly separable binary surrogates.

    xor
        Points uniform in ``[-1, 1]^2``, class 1 where ``x1 * x2 > 0``.
    rings
        Inner disc of radius 1 (class 0) and annulus ``2 <= r <= 3`` (class 1).
    noisy_labels
        Two overlapping Gaussian blobs at ``(+-1, 0)``.

    ``noise`` is the fraction of labels flipped after generation.
    """
    if kind not in HARD_KINDS:
        raise InvalidArgumentError(f"kind must be one of {HARD_KINDS}, got {kind!r}")
    if n_per_class < 10:
        raise InvalidArgumentError(f"n_per_class must be >= 10, got {n_per_class}")
    rng = np.random.default_rng(seed)
    if kind == "xor":
        X = np.empty((2 * n_per_class, 2))
        counts = [0, 0]
        filled = 0
        while filled < 2 * n_per_class:
            p = rng.uniform(-1.0, 1.0, size=2)
            label = int(p[0] * p[1] > 0)
            if counts[label] < n_per_class and p[0] * p[1] != 0:
                X[label * n_per_class + counts[label]] = p
                counts[label] += 1
                filled += 1
    elif kind == "rings":
        radii = np.concatenate([
            np.sqrt(rng.uniform(0.0, 1.0, n_per_class)),
            np.sqrt(rng.uniform(4.0, 9.0, n_per_class)),
        ])
        theta = rng.uniform(0.0, 2 * np.pi, 2 * n_per_class)
        X = np.column_stack([radii * np.cos(theta), radii * np.sin(theta)])
    else:
        centers = np.array([[-1.0, 0.0], [1.0, 0.0]])
        X = np.concatenate([c + rng.standard_normal((n_per_class, 2)) for c in centers])
    y = _flip_labels(np.repeat([0, 1], n_per_class), noise, rng)
    prov = {
        "generator": "hard",
        "kind": kind,
        "n_per_class": int(n_per_class),
        "noise": float(noise),
        "seed": int(seed),
    }
    return Dataset(X, y, None, prov)


def generate(descriptor: dict) -> Dataset:
    """Rebuild a dataset from a provenance descriptor."""
    desc = dict(descriptor)
    gen = desc.pop("generator", None)
    if gen == "blobs":
        return gen_blobs(desc["n_per_class"], desc["centers"], desc["spread"], desc.get("seed", 0))
    if gen == "hard":
        return gen_hard(desc["n_per_class"], desc.get("kind", "xor"), desc.get("noise", 0.0), desc.get("seed", 0))
    raise InvalidArgumentError(f"unknown generator descriptor {json.dumps(descriptor, sort_keys=True)}")
