"""Scikit-learn style estimators wrapping the sphere-ascent solvers.

All estimators take row-sample arrays at the API boundary (n_samples,
n_features), store fitted components as rows of ``components_``, and
center data with the training mean.  Hyperparameters are stored verbatim
in ``__init__`` and validated in ``fit`` so ``get_params`` / ``clone``
round-trip cleanly.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .baselines import pca_l2
from .deflation import fit_components
from .errors import ConfigError, DataError
from .model import DataMatrix, center
from .objectives import make_objective
from .solver import SolverConfig

METHOD_NAMES = ("tl1", "l1", "lp", "l2")


def check_data_array(X) -> np.ndarray:
    """Validate a row-sample array: 2-D, non-empty, finite float64."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise DataError(f"expected a 2-D array, got ndim={X.ndim}")
    if X.size == 0:
        raise DataError(f"empty data array with shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DataError("data contains NaN or infinite entries")
    return X


class _BaseSpherePCA(TransformerMixin, BaseEstimator):
    """Shared fit/transform mechanics for the dispersion-maximizing PCAs.

    Subclasses define ``_make_objective`` and re-declare the full
    parameter list so sklearn's introspection sees every name.
    """

    def __init__(self, n_components=None, theta0=np.pi / 4,
                 random_theta0=False, theta_min=1e-10, rel_tol=1e-8,
                 max_iter=500, perturb_scale=1e-6, zero_margin=1e-12,
                 random_state=0):
        self.n_components = n_components
        self.theta0 = theta0
        self.random_theta0 = random_theta0
        self.theta_min = theta_min
        self.rel_tol = rel_tol
        self.max_iter = max_iter
        self.perturb_scale = perturb_scale
        self.zero_margin = zero_margin
        self.random_state = random_state

    def _make_objective(self):
        raise NotImplementedError

    def _solver_config(self) -> SolverConfig:
        seed = 0 if self.random_state is None else int(self.random_state)
        return SolverConfig(
            theta0=self.theta0,
            theta_min=self.theta_min,
            rel_tol=self.rel_tol,
            max_iter=self.max_iter,
            perturb_scale=self.perturb_scale,
            zero_margin=self.zero_margin,
            seed=seed,
            random_theta0=self.random_theta0,
        )

    def _resolve_n_components(self, d, n) -> int:
        if self.n_components is None:
            return min(d, n)
        m = int(self.n_components)
        if m < 1 or m > d:
            raise ConfigError(
                f"n_components must be in [1, {d}] for {d}-feature data, got {m}"
            )
        return m

    def fit(self, X, y=None):
        X = check_data_array(X)
        n, d = X.shape
        m = self._resolve_n_components(d, n)
        data = center(DataMatrix(X.T))
        result = fit_components(
            data, m, self._make_objective(), self._solver_config()
        )
        self.mean_ = data.feature_means.copy()
        self.components_ = result.components.columns.T.copy()
        self.traces_ = result.traces
        self.truncated_ = result.truncated
        self.n_components_ = self.components_.shape[0]
        self.n_features_in_ = d
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "components_")
        X = check_data_array(X)
        if X.shape[1] != self.n_features_in_:
            raise DataError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Z) -> np.ndarray:
        check_is_fitted(self, "components_")
        Z = np.asarray(Z, dtype=np.float64)
        return Z @ self.components_ + self.mean_


class TL1PCA(_BaseSpherePCA):
    """PCA maximizing the transformed-l1 dispersion of projections.

    The per-sample gain ``(a+1)|t| / (a+|t|)`` saturates for large
    projections, so single far-away samples cannot dominate the fitted
    direction.  Small ``a`` approaches a count of nonzero projections,
    large ``a`` approaches the l1 objective.
    """

    def __init__(self, n_components=None, a=1.0, theta0=np.pi / 4,
                 random_theta0=False, theta_min=1e-10, rel_tol=1e-8,
                 max_iter=500, perturb_scale=1e-6, zero_margin=1e-12,
                 random_state=0):
        super().__init__(
            n_components=n_components, theta0=theta0,
            random_theta0=random_theta0, theta_min=theta_min,
            rel_tol=rel_tol, max_iter=max_iter,
            perturb_scale=perturb_scale, zero_margin=zero_margin,
            random_state=random_state,
        )
        self.a = a

    def _make_objective(self):
        return make_objective("tl1", a=self.a, zero_margin=self.zero_margin)


class L1PCA(_BaseSpherePCA):
    """PCA maximizing the l1 dispersion (sum of absolute projections)."""

    def _make_objective(self):
        return make_objective("l1", zero_margin=self.zero_margin)


class LpPCA(_BaseSpherePCA):
    """PCA maximizing the lp dispersion, sum |t|^p with p in (0,1]."""

    def __init__(self, n_components=None, p=0.5, theta0=np.pi / 4,
                 random_theta0=False, theta_min=1e-10, rel_tol=1e-8,
                 max_iter=500, perturb_scale=1e-6, zero_margin=1e-12,
                 random_state=0):
        super().__init__(
            n_components=n_components, theta0=theta0,
            random_theta0=random_theta0, theta_min=theta_min,
            rel_tol=rel_tol, max_iter=max_iter,
            perturb_scale=perturb_scale, zero_margin=zero_margin,
            random_state=random_state,
        )
        self.p = p

    def _make_objective(self):
        return make_objective("lp", p=self.p, zero_margin=self.zero_margin)


class L2PCA(TransformerMixin, BaseEstimator):
    """Classical PCA via the eigendecomposition of the scatter matrix.

    Deterministic and exact; components come in descending-eigenvalue
    order with the canonical sign convention.  Requested components
    beyond the numerical rank are dropped and ``truncated_`` set.
    """

    def __init__(self, n_components=None):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_data_array(X)
        n, d = X.shape
        if self.n_components is None:
            m = min(d, n)
        else:
            m = int(self.n_components)
            if m < 1 or m > min(d, n):
                raise ConfigError(
                    f"n_components must be in [1, {min(d, n)}], got {m}"
                )
        data = center(DataMatrix(X.T))
        result = pca_l2(data, m)
        self.mean_ = data.feature_means.copy()
        self.components_ = result.components.columns.T.copy()
        self.eigenvalues_ = result.eigenvalues
        self.truncated_ = result.truncated
        self.n_components_ = self.components_.shape[0]
        self.n_features_in_ = d
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "components_")
        X = check_data_array(X)
        if X.shape[1] != self.n_features_in_:
            raise DataError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Z) -> np.ndarray:
        check_is_fitted(self, "components_")
        Z = np.asarray(Z, dtype=np.float64)
        return Z @ self.components_ + self.mean_


def build_estimator(method, n_components=None, *, a=None, p=None,
                    config: SolverConfig | None = None):
    """Construct the estimator for a method name, mapping solver config.

    ``a`` and ``p`` are required for tl1 and lp respectively and
    rejected elsewhere.
    """
    if method not in METHOD_NAMES:
        raise ConfigError(f"method must be one of {METHOD_NAMES}, got {method!r}")
    if a is not None and method != "tl1":
        raise ConfigError(f"parameter a is only valid for tl1, not {method}")
    if p is not None and method != "lp":
        raise ConfigError(f"parameter p is only valid for lp, not {method}")

    if method == "l2":
        return L2PCA(n_components=n_components)

    cfg = config if config is not None else SolverConfig()
    kwargs = dict(
        n_components=n_components,
        theta0=cfg.theta0,
        random_theta0=cfg.random_theta0,
        theta_min=cfg.theta_min,
        rel_tol=cfg.rel_tol,
        max_iter=cfg.max_iter,
        perturb_scale=cfg.perturb_scale,
        zero_margin=cfg.zero_margin,
        random_state=cfg.seed,
    )
    if method == "tl1":
        return TL1PCA(a=1.0 if a is None else a, **kwargs)
    if method == "l1":
        return L1PCA(**kwargs)
    return LpPCA(p=0.5 if p is None else p, **kwargs)
