"""Robust PCA by maximizing bounded dispersion on the unit sphere.

The flagship estimator, :class:`TL1PCA`, maximizes a saturating
transformed-l1 criterion so far-away samples have bounded influence on
the fitted directions.  Classical l2 PCA and greedy l1/lp variants share
the same API for comparison, and an evaluation harness reproduces
accuracy-vs-dimension benchmarks under occlusion-style corruption.
"""

from .baselines import ScatterPCAResult, pca_l1_greedy, pca_l2, pca_lp
from .datasets import (LabeledDataset, SplitSpec, block_noise, load_csv,
                       make_splits, save_csv, synthetic_classes, toy_generate)
from .deflation import (DeflationResult, canonical_sign, fit_components,
                        nullspace_basis)
from .errors import ConfigError, DataError, NumericError
from .estimators import L1PCA, L2PCA, LpPCA, TL1PCA, build_estimator
from .evaluation import (DEFAULT_A_GRID, DEFAULT_P_GRID, EvalReport,
                         accuracy_curve, angle_to, convergence_curve, knn1)
from .model import DataMatrix, ProjectionMatrix, center, project
from .norms import lp_dispersion, lp_norm, rho_a, tl1_norm
from .objectives import make_objective, tl1_gradient, tl1_objective
from .solver import SolverConfig, SolverTrace, ascend, fd_check, initialize

__version__ = "0.1.0"

__all__ = [
    "TL1PCA", "L1PCA", "LpPCA", "L2PCA", "build_estimator",
    "DataMatrix", "ProjectionMatrix", "center", "project",
    "rho_a", "tl1_norm", "lp_norm", "lp_dispersion",
    "make_objective", "tl1_objective", "tl1_gradient",
    "SolverConfig", "SolverTrace", "ascend", "initialize", "fd_check",
    "DeflationResult", "fit_components", "nullspace_basis", "canonical_sign",
    "ScatterPCAResult", "pca_l2", "pca_l1_greedy", "pca_lp",
    "LabeledDataset", "SplitSpec", "toy_generate", "block_noise",
    "load_csv", "save_csv", "make_splits", "synthetic_classes",
    "EvalReport", "accuracy_curve", "angle_to", "convergence_curve", "knn1",
    "DEFAULT_A_GRID", "DEFAULT_P_GRID",
    "ConfigError", "DataError", "NumericError",
    "__version__",
]
