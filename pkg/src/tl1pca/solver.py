"""Gradient ascent on the unit sphere with an adaptive step angle.

The solver maximizes a dispersion objective f(w) subject to ||w|| = 1.
Each iteration projects the Euclidean gradient onto the tangent plane at
w, normalizes it to g0, and rotates

    w_next = w * cos(theta) + g0 * sin(theta),

halving theta until f does not decrease and doubling it (capped at
pi/2) for the next iteration.  The accepted objective sequence is
therefore non-decreasing by construction, and since f is bounded above
the iteration always terminates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, NumericError
from .ioutils import atomic_write, fmt17
from .model import as_columns
from .objectives import Objective

HALT_TOLERANCE = "tolerance"
HALT_THETA_FLOOR = "theta_floor"
HALT_MAX_ITER = "max_iter"

#: Relative threshold declaring the tangent component of the gradient zero.
COLLINEARITY_RTOL = 1e-12

#: Norm of the random shift used to move w off projection kinks.
KINK_SHIFT = 1e-9

_MAX_KINK_RETRIES = 5
_MAX_HALVINGS = 60


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of the sphere-ascent solver.

    theta0 is the initial step angle; set ``random_theta0`` to draw it
    from (0, pi/2] instead (seeded).  ``zero_margin`` scales per-sample:
    |x_i^T w| <= zero_margin * ||x_i|| is treated as a kink.
    """

    theta0: float = math.pi / 4
    theta_min: float = 1e-10
    rel_tol: float = 1e-8
    max_iter: int = 500
    perturb_scale: float = 1e-6
    zero_margin: float = 1e-12
    seed: int | None = 0
    random_theta0: bool = False

    def __post_init__(self):
        if not 0.0 < self.theta0 <= math.pi / 2:
            raise ConfigError(f"theta0 must be in (0, pi/2], got {self.theta0}")
        if self.theta_min <= 0.0:
            raise ConfigError(f"theta_min must be positive, got {self.theta_min}")
        if self.rel_tol < 0.0:
            raise ConfigError(f"rel_tol must be nonnegative, got {self.rel_tol}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.perturb_scale <= 0.0:
            raise ConfigError(
                f"perturb_scale must be positive, got {self.perturb_scale}"
            )
        if self.zero_margin < 0.0:
            raise ConfigError(f"zero_margin must be >= 0, got {self.zero_margin}")


@dataclass(frozen=True)
class SolverTrace:
    """Per-iteration record of one solver run.

    ``objectives[t]`` is f at the t-th accepted iterate (index 0 is the
    initialization); ``thetas[t]`` is the step angle that produced it
    (0.0 for the initial point).  The objective sequence is
    non-decreasing.
    """

    objectives: tuple = field(default_factory=tuple)
    thetas: tuple = field(default_factory=tuple)
    iterations: int = 0
    converged: bool = False
    halt_reason: str = HALT_MAX_ITER


def component_rng(seed, index=0) -> np.random.Generator:
    """Deterministic per-component generator derived from a base seed."""
    if seed is None:
        return np.random.default_rng()
    return np.random.default_rng(
        np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    )


def initialize(data, objective: Objective) -> np.ndarray:
    """Pick the normalized sample column with the largest objective value.

    Ties are broken toward the smallest column index; all-zero data is
    rejected as degenerate.
    """
    X = as_columns(data)
    norms = np.linalg.norm(X, axis=0)
    if not np.any(norms > 0.0):
        raise DataError("degenerate data: all sample columns are zero")
    best_val = -np.inf
    best = None
    for k in np.flatnonzero(norms > 0.0):
        cand = X[:, k] / norms[k]
        val = objective.value(X, cand)
        if val > best_val:
            best_val = val
            best = cand
    if best is None:
        raise NumericError("objective is non-finite at every initial candidate")
    return best


def _resolve_kinks(X, w, margins, active, rng):
    """Shift w off any |x_i^T w| <= margin kink by a tiny seeded perturbation.

    Retries a few times; if kinks persist the caller's sign(0)=+1
    convention takes over.  Zero columns (margin 0) are ignored.
    """
    proj = X.T @ w
    for _ in range(_MAX_KINK_RETRIES):
        if not np.any(active & (np.abs(proj) <= margins)):
            return w, proj
        delta = rng.standard_normal(w.shape[0])
        delta *= KINK_SHIFT / np.linalg.norm(delta)
        w = w + delta
        w = w / np.linalg.norm(w)
        proj = X.T @ w
    return w, proj


def ascend(data, objective: Objective, config: SolverConfig | None = None,
           rng: np.random.Generator | None = None):
    """Maximize ``objective`` over the unit sphere from the best-sample start.

    Returns ``(w, trace)`` with ||w|| = 1.  The trace objectives are
    non-decreasing and the run is deterministic given ``config.seed``
    (or the supplied generator).

    ``data`` may be a DataMatrix (must be centered) or a bare (d, n)
    array trusted to be centered.
    """
    if config is None:
        config = SolverConfig()
    X = as_columns(data, require_centered=True)
    d = X.shape[0]
    if rng is None:
        rng = component_rng(config.seed, 0)

    col_norms = np.linalg.norm(X, axis=0)
    margins = config.zero_margin * col_norms
    active = col_norms > 0.0

    w = initialize(X, objective)
    f_curr = objective.value(X, w)
    if not np.isfinite(f_curr):
        raise NumericError("objective is non-finite at the initial point")

    objectives = [f_curr]
    thetas = [0.0]
    if config.random_theta0:
        theta = math.pi / 2 - rng.uniform(0.0, math.pi / 2)
    else:
        theta = config.theta0

    halt = HALT_MAX_ITER
    converged = False
    for t in range(config.max_iter):
        w_g, _ = _resolve_kinks(X, w, margins, active, rng)
        grad = objective.gradient(X, w_g)
        grad_norm = np.linalg.norm(grad)
        g = grad - (grad @ w_g) * w_g
        if np.linalg.norm(g) <= COLLINEARITY_RTOL * grad_norm:
            if grad_norm == 0.0:
                halt = HALT_TOLERANCE
                converged = True
                break
            # Collinear gradient: add a perturbation xi with grad . xi > 0
            # so an ascent direction off the radial line exists.
            xi = rng.standard_normal(d)
            xi *= config.perturb_scale * grad_norm / np.linalg.norm(xi)
            if grad @ xi < 0.0:
                xi = -xi
            grad = grad + xi
            g = grad - (grad @ w_g) * w_g
            if np.linalg.norm(g) == 0.0:
                halt = HALT_TOLERANCE
                converged = True
                break
        g0 = g / np.linalg.norm(g)

        accepted = False
        th = theta
        for _ in range(_MAX_HALVINGS):
            w_new = w_g * math.cos(th) + g0 * math.sin(th)
            w_new = w_new / np.linalg.norm(w_new)
            f_new = objective.value(X, w_new)
            if not np.isfinite(f_new):
                raise NumericError(f"objective became non-finite at iteration {t}")
            if f_new >= f_curr:
                accepted = True
                break
            th *= 0.5
            if th < config.theta_min:
                break
        if not accepted:
            # No tangent step improves the objective at the resolvable
            # angles: treat the current iterate as final.
            halt = HALT_THETA_FLOOR
            converged = True
            break

        w = w_new
        gain = f_new - f_curr
        f_prev = f_curr
        f_curr = f_new
        objectives.append(f_curr)
        thetas.append(th)
        theta = min(2.0 * th, math.pi / 2)
        if gain <= config.rel_tol * max(1.0, abs(f_prev)):
            halt = HALT_TOLERANCE
            converged = True
            break

    trace = SolverTrace(
        objectives=tuple(objectives),
        thetas=tuple(thetas),
        iterations=len(objectives) - 1,
        converged=converged,
        halt_reason=halt,
    )
    return w, trace


def fd_check(data, objective: Objective, w, h=1e-6) -> float:
    """Max relative error between the analytic gradient and central differences.

    The relative error is measured against the larger of the two
    gradients' max-norms; if both vanish the error is 0.  Meaningful
    only away from projection kinks.
    """
    X = as_columns(data)
    w = np.asarray(w, dtype=np.float64)
    analytic = objective.gradient(X, w)
    fd = np.empty_like(w)
    for j in range(w.shape[0]):
        step = np.zeros_like(w)
        step[j] = h
        fd[j] = (objective.value(X, w + step) - objective.value(X, w - step)) / (2 * h)
    scale = max(np.abs(analytic).max(), np.abs(fd).max())
    if scale == 0.0:
        return 0.0
    return float(np.abs(analytic - fd).max() / scale)


def write_trace_csv(trace: SolverTrace, path) -> None:
    """Serialize a trace as CSV with columns iter, objective, theta."""
    lines = ["iter,objective,theta"]
    for i, (obj, th) in enumerate(zip(trace.objectives, trace.thetas)):
        lines.append(f"{i},{fmt17(obj)},{fmt17(th)}")
    atomic_write(path, "\n".join(lines) + "\n")
