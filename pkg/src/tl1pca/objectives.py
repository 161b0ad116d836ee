"""Dispersion objectives evaluated on sphere projections, with gradients.

Each objective maps a (d, n) column-sample matrix X and a direction w to
sum_i phi(x_i^T w) for a componentwise penalty phi, together with the
Euclidean gradient of that sum.  The bounded (tl1) objective is

    f(w) = sum_i (a+1) |x_i^T w| / (a + |x_i^T w|),
    grad f(w) = sum_i a (a+1) sign(x_i^T w) x_i / (a + |x_i^T w|)^2,

and the l1 / lp dispersion objectives reuse the same shape so a single
solver engine serves all three.

Value and gradient callables accept any w (not only unit vectors); the
unit-sphere contract is enforced by the public ``tl1_objective`` /
``tl1_gradient`` entry points and by the solver, which keeps its
iterates on the sphere.  sign(0) is taken as +1: the solver resolves
|x_i^T w| ~ 0 kinks by perturbing w first, and any term still at zero
after that falls back to the positive branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, DataError
from .model import as_columns
from .norms import check_p_exponent, check_shape_param, rho_a

OBJECTIVE_NAMES = ("tl1", "l1", "lp")

#: Unit-norm contract tolerance for the public objective entry points.
UNIT_TOL = 1e-10


@dataclass(frozen=True)
class Objective:
    """A pluggable objective/gradient pair for the sphere solver.

    ``value(X, w)`` and ``gradient(X, w)`` take a (d, n) array and a
    d-vector.  ``params`` records the hyperparameters for serialization.
    """

    name: str
    params: dict = field(default_factory=dict)
    value: Callable[[np.ndarray, np.ndarray], float] = None
    gradient: Callable[[np.ndarray, np.ndarray], np.ndarray] = None


def _sign_pos(t):
    # sign with the 0 -> +1 convention used after kink resolution.
    return np.where(t >= 0.0, 1.0, -1.0)


def _tl1_value(X, w, a):
    return float(np.sum(rho_a(X.T @ w, a)))


def _tl1_gradient(X, w, a):
    proj = X.T @ w
    coef = a * (a + 1.0) * _sign_pos(proj) / (a + np.abs(proj)) ** 2
    return X @ coef


def _l1_value(X, w):
    return float(np.sum(np.abs(X.T @ w)))


def _l1_gradient(X, w):
    return X @ _sign_pos(X.T @ w)


def _lp_value(X, w, p):
    return float(np.sum(np.abs(X.T @ w) ** p))


def _lp_gradient(X, w, p, kink_floor):
    # p - 1 < 0 makes the kink singular; clamp |proj| away from zero so
    # the coefficient stays finite (zero columns still contribute 0).
    proj = X.T @ w
    safe = np.maximum(np.abs(proj), kink_floor)
    coef = p * safe ** (p - 1.0) * _sign_pos(proj)
    return X @ coef


def make_objective(name, a=None, p=None, zero_margin=1e-12) -> Objective:
    """Build the named objective ("tl1", "l1" or "lp") with its parameters."""
    if name == "tl1":
        a = check_shape_param(a)
        return Objective(
            name="tl1",
            params={"a": a},
            value=lambda X, w, a=a: _tl1_value(X, w, a),
            gradient=lambda X, w, a=a: _tl1_gradient(X, w, a),
        )
    if name == "l1":
        return Objective(name="l1", params={}, value=_l1_value, gradient=_l1_gradient)
    if name == "lp":
        p = check_p_exponent(p)
        floor = max(float(zero_margin), 1e-300)
        return Objective(
            name="lp",
            params={"p": p},
            value=lambda X, w, p=p: _lp_value(X, w, p),
            gradient=lambda X, w, p=p, f=floor: _lp_gradient(X, w, p, f),
        )
    raise ConfigError(f"unknown objective {name!r}, expected one of {OBJECTIVE_NAMES}")


def _check_unit(w):
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1:
        raise DataError("w must be a 1-D vector")
    nrm = np.linalg.norm(w)
    if abs(nrm - 1.0) > UNIT_TOL:
        raise DataError(f"w must be a unit vector (|norm - 1| = {abs(nrm - 1.0):.3e})")
    return w


def tl1_objective(data, w, a) -> float:
    """Bounded dispersion sum_i rho_a(x_i^T w) for a unit vector w."""
    X = as_columns(data)
    w = _check_unit(w)
    if X.shape[0] != w.shape[0]:
        raise DataError(f"dimension mismatch: d={X.shape[0]}, len(w)={w.shape[0]}")
    return _tl1_value(X, w, check_shape_param(a))


def tl1_gradient(data, w, a) -> np.ndarray:
    """Euclidean gradient of the bounded dispersion at a unit vector w."""
    X = as_columns(data)
    w = _check_unit(w)
    if X.shape[0] != w.shape[0]:
        raise DataError(f"dimension mismatch: d={X.shape[0]}, len(w)={w.shape[0]}")
    return _tl1_gradient(X, w, check_shape_param(a))
