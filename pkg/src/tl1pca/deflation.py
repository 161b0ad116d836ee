"""Greedy extraction of orthonormal projection vectors by deflation.

Component j is found by running the sphere solver on the data projected
into the orthogonal complement of the components already extracted,
then lifting the solution back: with T_{j-1} an orthonormal basis of
that complement, the reduced problem maximizes f on X_j = T_{j-1}^T X
and the lifted vector is T_{j-1} w.  Since x^T (T w) = (T^T x)^T w the
reduced objective value equals the full-space value, and the lifted
columns are orthonormal by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .ioutils import atomic_write, fmt_sci17
from .model import ProjectionMatrix, as_columns
from .objectives import Objective
from .solver import SolverConfig, ascend, component_rng

#: Residual norms below this are treated as linearly dependent in the
#: Gram-Schmidt sweep.
GS_DROP_TOL = 1e-10

#: Reduced data whose largest column norm falls below this fraction of the
#: original scale is considered exhausted (all projected samples zero).
DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class ComplementBasis:
    """Orthonormal basis of the null space of W^T (the unexplored subspace)."""

    basis: np.ndarray


@dataclass(frozen=True)
class DeflationResult:
    """Projection matrix plus per-component solver traces.

    ``truncated`` is set when the data ran out of usable directions
    before the requested number of components.
    """

    components: ProjectionMatrix
    traces: tuple
    truncated: bool = False


def canonical_sign(w: np.ndarray) -> np.ndarray:
    """Flip w so its largest-magnitude entry is positive.

    The dispersion objectives satisfy f(-w) = f(w), so the sign is free;
    fixing it makes outputs comparable across runs.
    """
    idx = int(np.argmax(np.abs(w)))
    if w[idx] < 0.0:
        return -w
    return w


def nullspace_basis(w_stack: ProjectionMatrix) -> ComplementBasis:
    """Orthonormal basis of {v : W^T v = 0} via modified Gram-Schmidt.

    The columns of W are extended by the standard basis vectors; each
    candidate is orthogonalized against everything accepted so far and
    dropped when its residual norm falls below ``GS_DROP_TOL``.  The
    d - m survivors, kept in index order, form the basis.  A second
    orthogonalization pass keeps the result orthonormal to machine
    precision even for barely-surviving candidates.
    """
    W = w_stack.columns
    d, m = W.shape
    if m >= d:
        raise DataError(f"complement is empty: m={m} equals d={d}")

    accepted = [W[:, j] for j in range(m)]
    basis = []
    for k in range(d):
        v = np.zeros(d)
        v[k] = 1.0
        for q in accepted:
            v = v - (q @ v) * q
        norm = np.linalg.norm(v)
        if norm < GS_DROP_TOL:
            continue
        v = v / norm
        for q in accepted:
            v = v - (q @ v) * q
        v = v / np.linalg.norm(v)
        accepted.append(v)
        basis.append(v)
    if len(basis) != d - m:
        raise DataError(
            f"null-space construction found {len(basis)} directions, "
            f"expected {d - m}"
        )
    return ComplementBasis(basis=np.column_stack(basis))


def fit_components(data, m: int, objective: Objective,
                   config: SolverConfig | None = None) -> DeflationResult:
    """Extract ``m`` orthonormal projection vectors greedily.

    Each reduced problem re-runs the full solver, including its
    best-sample initialization, on the deflated data.  Stops early with
    ``truncated=True`` when the reduced samples are all (numerically)
    zero.
    """
    if config is None:
        config = SolverConfig()
    X0 = as_columns(data, require_centered=True)
    d = X0.shape[0]
    if not 1 <= m <= d:
        raise ConfigError(f"need 1 <= m <= d={d}, got m={m}")

    scale0 = np.linalg.norm(X0, axis=0).max()
    columns = []
    traces = []
    truncated = False
    T = None  # complement basis; None means identity (no deflation yet)
    for j in range(m):
        Xj = X0 if T is None else T.T @ X0
        if np.linalg.norm(Xj, axis=0).max() <= DEGENERATE_RTOL * scale0:
            truncated = True
            break
        w_red, trace = ascend(Xj, objective, config,
                              rng=component_rng(config.seed, j))
        w_full = w_red if T is None else T @ w_red
        w_full = canonical_sign(w_full / np.linalg.norm(w_full))
        columns.append(w_full)
        traces.append(trace)
        if j + 1 < m:
            T = nullspace_basis(ProjectionMatrix(np.column_stack(columns))).basis

    if not columns:
        raise DataError("degenerate data: no usable projection direction")
    return DeflationResult(
        components=ProjectionMatrix(np.column_stack(columns)),
        traces=tuple(traces),
        truncated=truncated,
    )


def write_projection_csv(w, path) -> None:
    """Serialize W as plain CSV: d rows, m columns, 17-digit scientific.

    Accepts a ProjectionMatrix or a bare (d, m) array.
    """
    columns = w.columns if isinstance(w, ProjectionMatrix) else np.asarray(w)
    lines = []
    for row in columns:
        lines.append(",".join(fmt_sci17(v) for v in row))
    atomic_write(path, "\n".join(lines) + "\n")
