"""Greedy deflation: null-space bases, lifting, and orthonormal stacks."""

import numpy as np
import pytest

from tl1pca.deflation import (DeflationResult, canonical_sign, fit_components,
                              nullspace_basis, write_projection_csv)
from tl1pca.errors import ConfigError, DataError
from tl1pca.model import ProjectionMatrix
from tl1pca.objectives import make_objective
from tl1pca.solver import SolverConfig, ascend, component_rng


def centered_data(seed, d=6, n=40):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((d, n))
    return X - X.mean(axis=1, keepdims=True)


def test_canonical_sign_flips_to_positive_peak():
    np.testing.assert_array_equal(
        canonical_sign(np.array([-0.8, 0.6])), [0.8, -0.6]
    )
    np.testing.assert_array_equal(
        canonical_sign(np.array([0.8, -0.6])), [0.8, -0.6]
    )


def test_nullspace_hand_case():
    # complement of span{(1,1)/sqrt(2)} is spanned by (1,-1)/sqrt(2)
    W = ProjectionMatrix(np.array([[1.0], [1.0]]) / np.sqrt(2.0))
    basis = nullspace_basis(W).basis
    np.testing.assert_allclose(basis[:, 0], [1 / np.sqrt(2), -1 / np.sqrt(2)],
                               atol=1e-14)


def test_nullspace_invariants_random():
    rng = np.random.default_rng(0)
    for d, m in ((4, 1), (6, 3), (10, 5)):
        Q, _ = np.linalg.qr(rng.standard_normal((d, m)))
        basis = nullspace_basis(ProjectionMatrix(Q)).basis
        assert basis.shape == (d, d - m)
        assert np.abs(Q.T @ basis).max() < 1e-12
        gram = basis.T @ basis
        assert np.abs(gram - np.eye(d - m)).max() < 1e-12


def test_nullspace_empty_complement_rejected():
    with pytest.raises(DataError):
        nullspace_basis(ProjectionMatrix(np.eye(3)))


def test_single_component_equals_plain_ascent():
    X = centered_data(1)
    obj = make_objective("tl1", a=1.0)
    cfg = SolverConfig(seed=5)
    res = fit_components(X, 1, obj, cfg)
    w_direct, _ = ascend(X, obj, cfg, rng=component_rng(5, 0))
    np.testing.assert_array_equal(res.components.columns[:, 0],
                                  canonical_sign(w_direct))


def test_components_are_orthonormal():
    X = centered_data(2, d=8)
    for name, kw in (("tl1", {"a": 0.5}), ("l1", {}), ("lp", {"p": 0.5})):
        res = fit_components(X, 4, make_objective(name, **kw),
                             SolverConfig(seed=0))
        W = res.components.columns
        assert np.abs(W.T @ W - np.eye(4)).max() <= 1e-10
        assert len(res.traces) == 4
        assert not res.truncated


def test_reduced_objective_equals_lifted_value():
    # the solved objective on deflated data must match the full-space
    # objective at the lifted component
    X = centered_data(3, d=7)
    obj = make_objective("tl1", a=2.0)
    res = fit_components(X, 3, obj, SolverConfig(seed=2))
    for j in range(3):
        w = res.components.columns[:, j]
        lifted_val = obj.value(X, w)
        solved_val = res.traces[j].objectives[-1]
        assert abs(lifted_val - solved_val) <= 1e-9 * max(1.0, abs(solved_val))


def test_later_components_roughly_decrease():
    # each solve is local, so this is a sanity band, not a hard contract
    X = centered_data(4, d=6)
    res = fit_components(X, 4, make_objective("l1"), SolverConfig(seed=0))
    finals = [t.objectives[-1] for t in res.traces]
    assert all(b <= a * 1.05 for a, b in zip(finals, finals[1:]))


def test_rank_deficient_data_truncates():
    # rank-1 data: one real direction.  The solver stops at rel_tol, so
    # the first component can miss u by ~1e-4 and leave that much energy
    # for one more round; the contract is truncation before m, a first
    # component on the data line, and negligible dispersion after it.
    u = np.array([3.0, 4.0, 0.0]) / 5.0
    c = np.array([1.0, -2.0, 3.0, -2.0])
    X = np.outer(u, c)
    res = fit_components(X, 3, make_objective("l1"), SolverConfig(seed=0))
    assert res.truncated
    W = res.components.columns
    assert W.shape[1] < 3
    assert abs(W[:, 0] @ u) > 1.0 - 1e-6
    finals = [t.objectives[-1] for t in res.traces]
    assert all(f <= 1e-3 * finals[0] for f in finals[1:])


def test_invalid_component_count():
    X = centered_data(5, d=4)
    with pytest.raises(ConfigError):
        fit_components(X, 0, make_objective("l1"))
    with pytest.raises(ConfigError):
        fit_components(X, 5, make_objective("l1"))


def test_deterministic_across_runs():
    X = centered_data(6)
    obj = make_objective("tl1", a=0.1)
    r1 = fit_components(X, 3, obj, SolverConfig(seed=9))
    r2 = fit_components(X, 3, obj, SolverConfig(seed=9))
    np.testing.assert_array_equal(r1.components.columns, r2.components.columns)


def test_projection_csv_layout(tmp_path):
    X = centered_data(7, d=5)
    res = fit_components(X, 2, make_objective("l1"), SolverConfig(seed=0))
    path = tmp_path / "W.csv"
    write_projection_csv(res.components, path)
    rows = path.read_text().splitlines()
    assert len(rows) == 5
    parsed = np.array([[float(v) for v in r.split(",")] for r in rows])
    np.testing.assert_array_equal(parsed, res.components.columns)
