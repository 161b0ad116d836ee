"""Evaluation harness: 1-NN accuracy curves, angles, convergence traces.

The accuracy protocol per repeat: stratified split, corrupt the training
images with block noise, fit on the corrupted training samples, project
both sets, classify test samples by the nearest training projection.
Test samples stay clean and labels are never touched by the corruption.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .datasets import LabeledDataset, SplitSpec, block_noise, make_splits
from .errors import ConfigError, DataError
from .estimators import METHOD_NAMES, build_estimator
from .ioutils import atomic_write, fmt17
from .solver import SolverConfig, SolverTrace

#: Default parameter search grids for the robustness benchmark.
DEFAULT_A_GRID = (100.0, 50.0, 10.0, 1.0, 0.5, 0.1, 0.05, 0.01, 0.001)
DEFAULT_P_GRID = (1.0, 0.9, 0.7, 0.5, 0.3, 0.1, 0.01, 0.001)

#: Seed namespace for per-repeat block-noise streams, kept disjoint from
#: the solver's per-component streams which spawn directly off the seed.
_NOISE_SPAWN_ROOT = 7001

_TEST_CHUNK = 256


def knn1(train_proj, train_labels, test_proj) -> np.ndarray:
    """Nearest-neighbor labels for column-sample projected data.

    Ties in distance resolve to the smallest training index.
    """
    train_proj = np.asarray(train_proj, dtype=np.float64)
    test_proj = np.asarray(test_proj, dtype=np.float64)
    train_labels = np.asarray(train_labels, dtype=np.int64)
    if train_proj.ndim != 2 or test_proj.ndim != 2:
        raise DataError("projected data must be 2-D (m, n) arrays")
    if train_proj.shape[0] != test_proj.shape[0]:
        raise DataError(
            f"dimension mismatch: train m={train_proj.shape[0]}, "
            f"test m={test_proj.shape[0]}"
        )
    if train_proj.shape[1] == 0:
        raise DataError("empty training set")
    if train_labels.shape != (train_proj.shape[1],):
        raise DataError("train_labels length must match training columns")

    n_test = test_proj.shape[1]
    out = np.empty(n_test, dtype=np.int64)
    for start in range(0, n_test, _TEST_CHUNK):
        chunk = test_proj[:, start:start + _TEST_CHUNK]
        diff = chunk[:, :, None] - train_proj[:, None, :]
        dist2 = np.einsum("mij,mij->ij", diff, diff)
        out[start:start + _TEST_CHUNK] = train_labels[np.argmin(dist2, axis=1)]
    return out


def angle_to(w, ref) -> float:
    """Unsigned angle between two directions in degrees, in [0, 90]."""
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    ref = np.asarray(ref, dtype=np.float64).reshape(-1)
    if w.shape != ref.shape:
        raise DataError(f"shape mismatch: {w.shape} vs {ref.shape}")
    denom = np.linalg.norm(w) * np.linalg.norm(ref)
    if denom == 0.0:
        raise DataError("angle undefined for a zero vector")
    cosine = np.clip(abs(float(w @ ref)) / denom, 0.0, 1.0)
    return float(np.degrees(np.arccos(cosine)))


@dataclass(frozen=True)
class EvalReport:
    """Accuracy-vs-dimension results for one method/parameter setting."""

    method: str
    param: float | None
    dims: tuple
    mean_accuracies: tuple
    per_repeat: tuple
    angles: tuple | None = None
    traces: tuple | None = None

    def __post_init__(self):
        dims = tuple(int(k) for k in self.dims)
        if any(b <= a for a, b in zip(dims, dims[1:])):
            raise ConfigError(f"dims must be strictly increasing, got {dims}")
        object.__setattr__(self, "dims", dims)
        means = tuple(float(v) for v in self.mean_accuracies)
        if len(means) != len(dims):
            raise DataError("one mean accuracy required per dimension")
        if any(not 0.0 <= v <= 1.0 for v in means):
            raise DataError(f"accuracies must lie in [0,1], got {means}")
        object.__setattr__(self, "mean_accuracies", means)
        object.__setattr__(
            self, "per_repeat",
            tuple(tuple(float(v) for v in row) for row in self.per_repeat),
        )

    @property
    def label(self) -> str:
        if self.param is None:
            return self.method
        return f"{self.method}({fmt17(self.param)})"

    def best(self) -> dict:
        """Peak mean accuracy over the evaluated dimensions (test-set peak)."""
        i = int(np.argmax(self.mean_accuracies))
        return {
            "dimension": self.dims[i],
            "mean_accuracy": self.mean_accuracies[i],
            "selection": "test-set-peak",
        }

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "param": self.param,
            "dims": list(self.dims),
            "mean_accuracies": list(self.mean_accuracies),
            "per_repeat": [list(row) for row in self.per_repeat],
            "best": self.best(),
        }
        if self.angles is not None:
            out["angles"] = list(self.angles)
        return out


def accuracy_curve(dataset: LabeledDataset, method, dims, split_spec: SplitSpec,
                   *, a=None, p=None, config: SolverConfig | None = None,
                   block_size=0, fill="random", refit_per_dim=False,
                   noise_seed=None) -> EvalReport:
    """Mean 1-NN accuracy at each projection dimension over repeated splits.

    By default components are fitted once at max(dims) and lower
    dimensions reuse the leading columns, matching the greedy solvers'
    nested solutions; ``refit_per_dim`` refits from scratch at every
    dimension instead.
    """
    if method not in METHOD_NAMES:
        raise ConfigError(f"method must be one of {METHOD_NAMES}, got {method!r}")
    dims = tuple(int(k) for k in dims)
    if not dims:
        raise ConfigError("dims must be non-empty")
    if any(b <= a_ for a_, b in zip(dims, dims[1:])):
        raise ConfigError(f"dims must be strictly increasing, got {dims}")
    if dims[0] < 1 or dims[-1] > dataset.data.d:
        raise ConfigError(
            f"dims must lie in [1, {dataset.data.d}], got {dims}"
        )

    if noise_seed is None:
        noise_seed = split_spec.seed
    splits = make_splits(dataset, split_spec)
    values = dataset.data.values
    labels = dataset.labels

    per_repeat = []
    for r, (train_idx, test_idx) in enumerate(splits):
        if block_size:
            seed_r = np.random.SeedSequence(
                entropy=noise_seed, spawn_key=(_NOISE_SPAWN_ROOT, r)
            )
            noisy = block_noise(dataset, block_size, train_idx,
                                seed=seed_r, fill=fill)
            values_r = noisy.data.values
        else:
            values_r = values
        X_train = values_r[:, train_idx].T
        X_test = values[:, test_idx].T
        y_train = labels[train_idx]
        y_test = labels[test_idx]

        try:
            if refit_per_dim:
                accs = []
                for k in dims:
                    est = build_estimator(method, k, a=a, p=p, config=config)
                    est.fit(X_train)
                    accs.append(_accuracy(est, X_train, y_train, X_test,
                                          y_test, k))
            else:
                est = build_estimator(method, dims[-1], a=a, p=p, config=config)
                est.fit(X_train)
                accs = [
                    _accuracy(est, X_train, y_train, X_test, y_test, k)
                    for k in dims
                ]
        except (DataError, ConfigError) as exc:
            raise DataError(f"repeat {r}: {exc}") from exc
        per_repeat.append(tuple(accs))

    means = tuple(float(np.mean([row[i] for row in per_repeat]))
                  for i in range(len(dims)))
    param = a if method == "tl1" else p if method == "lp" else None
    return EvalReport(method=method, param=param, dims=dims,
                      mean_accuracies=means, per_repeat=tuple(per_repeat))


def _accuracy(est, X_train, y_train, X_test, y_test, k) -> float:
    if est.n_components_ < k:
        raise DataError(
            f"only {est.n_components_} components available, need {k}"
        )
    Z_train = est.transform(X_train).T[:k]
    Z_test = est.transform(X_test).T[:k]
    pred = knn1(Z_train, y_train, Z_test)
    return float(np.mean(pred == y_test))


def convergence_curve(dataset: LabeledDataset, method, *, a=None, p=None,
                      config: SolverConfig | None = None) -> SolverTrace:
    """Objective trace of the first component's ascent on centered data."""
    if method == "l2":
        raise ConfigError("convergence traces apply to the iterative methods only")
    est = build_estimator(method, 1, a=a, p=p, config=config)
    est.fit(dataset.data.values.T)
    return est.traces_[0]


def write_report_json(reports, path) -> None:
    """Serialize a list of EvalReports with all per-repeat detail."""
    payload = {"reports": [r.to_dict() for r in reports]}
    atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def write_curves_csv(reports, path) -> None:
    """Wide CSV of mean accuracy per dimension, one column per method."""
    reports = list(reports)
    if not reports:
        raise ConfigError("no reports to write")
    dims = reports[0].dims
    for r in reports[1:]:
        if r.dims != dims:
            raise ConfigError("all reports must share the same dims")
    lines = ["dimension," + ",".join(r.label for r in reports)]
    for i, k in enumerate(dims):
        row = ",".join(fmt17(r.mean_accuracies[i]) for r in reports)
        lines.append(f"{k},{row}")
    atomic_write(path, "\n".join(lines) + "\n")
