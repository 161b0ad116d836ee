"""Comparison methods: classical l2 PCA and greedy l1 / lp dispersion PCA.

The l2 baseline is the exact eigendecomposition of the d x d scatter
matrix (no local optima, deterministic); the l1 and lp methods run the
same one-at-a-time deflation engine as the bounded objective, so the
only difference between the four methods is the dispersion measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .deflation import DeflationResult, canonical_sign, fit_components
from .errors import ConfigError
from .model import ProjectionMatrix, as_columns
from .objectives import make_objective
from .solver import SolverConfig

#: Eigenvalues below this fraction of the largest count toward the rank.
RANK_RTOL = 1e-12


@dataclass(frozen=True)
class ScatterPCAResult:
    """Top eigenvectors of the scatter matrix, eigenvalue-descending."""

    components: ProjectionMatrix
    eigenvalues: np.ndarray
    truncated: bool = False


def pca_l2(data, m: int) -> ScatterPCAResult:
    """Classical PCA: top-m eigenvectors of X X^T with canonical signs.

    Requests beyond the numerical rank of the scatter matrix are
    truncated and flagged.
    """
    X = as_columns(data, require_centered=True)
    d, n = X.shape
    if not 1 <= m <= min(d, n):
        raise ConfigError(f"need 1 <= m <= min(d, n)={min(d, n)}, got m={m}")
    scatter = X @ X.T
    eigvals, eigvecs = np.linalg.eigh(scatter)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    rank = int(np.sum(eigvals > RANK_RTOL * max(eigvals[0], 0.0)))
    rank = max(rank, 1)
    truncated = m > rank
    keep = min(m, rank)
    cols = np.column_stack([canonical_sign(eigvecs[:, j]) for j in range(keep)])
    return ScatterPCAResult(
        components=ProjectionMatrix(cols),
        eigenvalues=eigvals[:keep].copy(),
        truncated=truncated,
    )


def pca_l1_greedy(data, m: int, config: SolverConfig | None = None) -> DeflationResult:
    """Greedy l1-dispersion PCA through the sphere solver."""
    return fit_components(data, m, make_objective("l1"), config)


def pca_lp(data, m: int, p, config: SolverConfig | None = None) -> DeflationResult:
    """Greedy lp-dispersion PCA (0 < p <= 1) through the sphere solver."""
    if config is None:
        config = SolverConfig()
    objective = make_objective("lp", p=p, zero_margin=config.zero_margin)
    return fit_components(data, m, objective, config)
