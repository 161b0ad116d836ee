"""Baseline PCA variants: exact l2 solutions and solver-based l1/lp."""

import numpy as np
import pytest

from tl1pca.baselines import pca_l1_greedy, pca_l2, pca_lp
from tl1pca.datasets import toy_generate
from tl1pca.errors import ConfigError
from tl1pca.evaluation import angle_to
from tl1pca.model import DataMatrix, center
from tl1pca.solver import SolverConfig


def centered_data(seed, d=5, n=40):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((d, n))
    return X - X.mean(axis=1, keepdims=True)


def test_l2_recovers_known_axes():
    # scatter diag(2, 8): dominant axis e2, then e1
    X = np.array([[1.0, -1.0, 0.0, 0.0], [0.0, 0.0, 2.0, -2.0]])
    res = pca_l2(X, 2)
    np.testing.assert_allclose(res.eigenvalues, [8.0, 2.0], atol=1e-12)
    np.testing.assert_allclose(res.components.columns[:, 0], [0.0, 1.0],
                               atol=1e-12)
    np.testing.assert_allclose(res.components.columns[:, 1], [1.0, 0.0],
                               atol=1e-12)


def test_l2_rank_one_case():
    u = np.array([0.6, 0.0, 0.8])
    c = np.array([1.0, -1.0, 2.0, -2.0])
    X = np.outer(u, c)
    res = pca_l2(X, 2)
    assert res.truncated
    assert res.components.columns.shape == (3, 1)
    np.testing.assert_allclose(np.abs(res.components.columns[:, 0] @ u), 1.0,
                               atol=1e-12)
    np.testing.assert_allclose(res.eigenvalues, [float(c @ c)], atol=1e-10)


def test_l2_rotation_equivariance():
    X = centered_data(0, d=4)
    rng = np.random.default_rng(1)
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    W0 = pca_l2(X, 3).components.columns
    W1 = pca_l2(Q @ X, 3).components.columns
    # rotated components must span the rotated subspace, up to signs
    overlap = np.abs(W1.T @ (Q @ W0))
    np.testing.assert_allclose(overlap, np.eye(3), atol=1e-8)


def test_l2_eigenvalues_sorted_and_bounds():
    X = centered_data(3, d=6)
    res = pca_l2(X, 6)
    ev = res.eigenvalues
    assert all(a >= b for a, b in zip(ev, ev[1:]))
    assert all(v >= 0.0 for v in ev)
    with pytest.raises(ConfigError):
        pca_l2(X, 0)
    with pytest.raises(ConfigError):
        pca_l2(X, 7)


def test_l2_matches_total_scatter():
    X = centered_data(4, d=5)
    res = pca_l2(X, 5)
    assert sum(res.eigenvalues) == pytest.approx(float((X * X).sum()), rel=1e-12)


def test_lp_with_p_one_matches_l1_exactly():
    X = centered_data(5, d=4)
    cfg = SolverConfig(seed=0)
    W_l1 = pca_l1_greedy(X, 3, cfg).components.columns
    W_lp = pca_lp(X, 3, 1.0, cfg).components.columns
    np.testing.assert_array_equal(W_l1, W_lp)


def test_l1_greedy_on_duplicated_samples():
    # duplicating every sample doubles the objective but not the argmax
    X = centered_data(6, d=3)
    cfg = SolverConfig(seed=0)
    W_once = pca_l1_greedy(X, 2, cfg).components.columns
    W_twice = pca_l1_greedy(np.hstack([X, X]), 2, cfg).components.columns
    overlap = np.abs(W_once.T @ W_twice)
    np.testing.assert_allclose(overlap, np.eye(2), atol=1e-6)


def test_l1_reaches_2d_grid_maximum():
    for seed in range(5):
        X = centered_data(seed, d=2, n=30)
        res = pca_l1_greedy(X, 1, SolverConfig(seed=seed))
        solved = res.traces[0].objectives[-1]
        best = -np.inf
        for th in np.arange(0.0, np.pi, 1e-4):
            w = np.array([np.cos(th), np.sin(th)])
            best = max(best, float(np.abs(X.T @ w).sum()))
        assert solved >= 0.999 * best, f"seed {seed}"


def test_clean_diagonal_data_recovers_diagonal_direction():
    # inliers without the outliers hug the 45-degree line
    toy = toy_generate()
    inliers = toy.data.values[:, toy.labels == 0]
    dm = center(DataMatrix(inliers))
    ref = np.array([1.0, 1.0]) / np.sqrt(2.0)
    for W in (pca_l2(dm, 1).components.columns,
              pca_l1_greedy(dm, 1).components.columns):
        assert angle_to(W[:, 0], ref) < 5.0


def test_tl1_large_a_agrees_with_l1_direction():
    from tl1pca.deflation import fit_components
    from tl1pca.objectives import make_objective

    X = centered_data(8, d=4)
    cfg = SolverConfig(seed=0)
    w_l1 = pca_l1_greedy(X, 1, cfg).components.columns[:, 0]
    w_t = fit_components(X, 1, make_objective("tl1", a=1e8),
                         cfg).components.columns[:, 0]
    assert abs(w_l1 @ w_t) >= 0.999
