"""Nearest-neighbor evaluation, angle metric, and accuracy curves."""

import json

import numpy as np
import pytest

from tl1pca.datasets import (LabeledDataset, SplitSpec, synthetic_classes,
                             toy_generate)
from tl1pca.errors import ConfigError, DataError
from tl1pca.evaluation import (EvalReport, accuracy_curve, angle_to,
                               convergence_curve, knn1, write_curves_csv,
                               write_report_json)
from tl1pca.model import DataMatrix
from tl1pca.solver import SolverConfig


# --- 1-NN classifier ---

def test_knn_hand_fixture():
    train = np.array([[0.0, 1.0]])
    labels = np.array([0, 1])
    test = np.array([[0.4, 0.6]])
    np.testing.assert_array_equal(knn1(train, labels, test), [0, 1])


def test_knn_tie_goes_to_smallest_index():
    train = np.array([[0.0, 1.0]])
    labels = np.array([3, 7])
    test = np.array([[0.5]])  # exactly between both
    np.testing.assert_array_equal(knn1(train, labels, test), [3])


def test_knn_three_class_fixture_in_2d():
    train = np.array([[0.0, 10.0, 0.0],
                      [0.0, 0.0, 10.0]])
    labels = np.array([0, 1, 2])
    test = np.array([[1.0, 9.0, 2.0],
                     [1.0, 1.0, 9.0]])
    np.testing.assert_array_equal(knn1(train, labels, test), [0, 1, 2])


def test_knn_invariant_under_rotation_of_projection_space():
    rng = np.random.default_rng(0)
    train = rng.standard_normal((3, 20))
    test = rng.standard_normal((3, 10))
    labels = rng.integers(0, 3, size=20)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    np.testing.assert_array_equal(knn1(train, labels, test),
                                  knn1(Q @ train, labels, Q @ test))


def test_knn_validation():
    with pytest.raises(DataError):
        knn1(np.ones((2, 3)), np.zeros(3), np.ones((3, 2)))  # dim mismatch
    with pytest.raises(DataError):
        knn1(np.ones((2, 0)), np.zeros(0), np.ones((2, 2)))
    with pytest.raises(DataError):
        knn1(np.ones((2, 3)), np.zeros(4), np.ones((2, 2)))


def test_knn_handles_more_test_samples_than_chunk():
    rng = np.random.default_rng(1)
    train = rng.standard_normal((2, 5))
    labels = np.arange(5)
    test = np.repeat(train[:, 2:3], 600, axis=1)
    assert np.all(knn1(train, labels, test) == 2)


# --- angle metric ---

def test_angle_hand_values():
    assert angle_to([1.0, 0.0], [0.0, 1.0]) == pytest.approx(90.0)
    assert angle_to([1.0, 1.0], [1.0, 0.0]) == pytest.approx(45.0)
    assert angle_to([2.0, 0.0], [1.0, 0.0]) == 0.0


def test_angle_ignores_sign_and_scale():
    w = np.array([0.3, -0.4])
    assert angle_to(w, -w) == 0.0
    assert angle_to(5.0 * w, w) == 0.0


def test_angle_validation():
    with pytest.raises(DataError):
        angle_to([1.0, 0.0], [1.0, 0.0, 0.0])
    with pytest.raises(DataError):
        angle_to([0.0, 0.0], [1.0, 0.0])


# --- accuracy curves ---

def separable_dataset():
    # three unit-noise clusters around 12*e_k: the centered means span a
    # plane, so any 2-D-or-wider fit keeps them far apart and 1-NN must
    # be perfect (not true of synthetic_classes, whose clusters overlap)
    rng = np.random.default_rng(0)
    blocks, labels = [], []
    for k in range(3):
        mean = np.zeros(8)
        mean[k] = 12.0
        blocks.append(mean[:, None] + rng.standard_normal((8, 10)))
        labels.extend([k] * 10)
    return LabeledDataset(data=DataMatrix(np.hstack(blocks)),
                          labels=np.array(labels))


def test_accuracy_is_perfect_on_clean_separable_data():
    rep = accuracy_curve(separable_dataset(), "l2", (2, 3),
                         SplitSpec(train_fraction=0.7, n_repeats=3, seed=0))
    assert rep.mean_accuracies == (1.0, 1.0)
    assert len(rep.per_repeat) == 3
    assert rep.method == "l2" and rep.param is None


def test_prefix_evaluation_matches_refit_for_greedy_methods():
    ds = separable_dataset()
    spec = SplitSpec(train_fraction=0.7, n_repeats=2, seed=1)
    nested = accuracy_curve(ds, "tl1", (1, 2, 3), spec, a=0.5)
    refit = accuracy_curve(ds, "tl1", (1, 2, 3), spec, a=0.5,
                           refit_per_dim=True)
    assert nested.mean_accuracies == refit.mean_accuracies


def test_accuracy_curve_deterministic():
    ds = separable_dataset()
    spec = SplitSpec(train_fraction=0.6, n_repeats=2, seed=3)
    a = accuracy_curve(ds, "l1", (1, 2), spec)
    b = accuracy_curve(ds, "l1", (1, 2), spec)
    assert a.mean_accuracies == b.mean_accuracies
    assert a.per_repeat == b.per_repeat


def test_accuracy_curve_validates_dims():
    ds = separable_dataset()
    spec = SplitSpec(train_fraction=0.7, seed=0)
    with pytest.raises(ConfigError):
        accuracy_curve(ds, "l2", (2, 2), spec)
    with pytest.raises(ConfigError):
        accuracy_curve(ds, "l2", (0, 1), spec)
    with pytest.raises(ConfigError):
        accuracy_curve(ds, "l2", (1, 99), spec)
    with pytest.raises(ConfigError):
        accuracy_curve(ds, "l2", (), spec)
    with pytest.raises(ConfigError):
        accuracy_curve(ds, "pca9000", (1,), spec)


def test_accuracy_curve_block_noise_requires_images():
    ds = separable_dataset()
    spec = SplitSpec(train_fraction=0.7, seed=0)
    with pytest.raises(ConfigError):
        accuracy_curve(ds, "l2", (1, 2), spec, block_size=2)


def test_accuracy_curve_with_block_noise_on_images():
    base = synthetic_classes(2, 8, 9, 0.0, seed=2)
    ds = LabeledDataset(data=base.data, labels=base.labels, image_shape=(3, 3))
    spec = SplitSpec(train_fraction=0.6, n_repeats=2, seed=0)
    rep = accuracy_curve(ds, "l2", (1, 2), spec, block_size=1, fill="zero")
    assert all(0.0 <= v <= 1.0 for v in rep.mean_accuracies)


def test_convergence_curve_on_toy_data():
    trace = convergence_curve(toy_generate(), "tl1", a=1.0,
                              config=SolverConfig(seed=0))
    assert np.all(np.diff(trace.objectives) >= 0.0)
    with pytest.raises(ConfigError):
        convergence_curve(toy_generate(), "l2")


# --- reports ---

def make_report(method="tl1", param=1.0):
    return EvalReport(method=method, param=param, dims=(1, 2),
                      mean_accuracies=(0.5, 0.75),
                      per_repeat=((0.5, 0.7), (0.5, 0.8)))


def test_report_invariants():
    with pytest.raises(ConfigError):
        EvalReport(method="l1", param=None, dims=(2, 1),
                   mean_accuracies=(0.5, 0.5), per_repeat=())
    with pytest.raises(DataError):
        EvalReport(method="l1", param=None, dims=(1, 2),
                   mean_accuracies=(0.5, 1.5), per_repeat=())
    with pytest.raises(DataError):
        EvalReport(method="l1", param=None, dims=(1, 2),
                   mean_accuracies=(0.5,), per_repeat=())


def test_report_best_is_labeled_test_set_peak():
    best = make_report().best()
    assert best == {"dimension": 2, "mean_accuracy": 0.75,
                    "selection": "test-set-peak"}


def test_report_json_and_csv_outputs(tmp_path):
    reports = [make_report("tl1", 1.0), make_report("l2", None)]
    jpath = tmp_path / "report.json"
    write_report_json(reports, jpath)
    payload = json.loads(jpath.read_text())
    assert len(payload["reports"]) == 2
    assert payload["reports"][0]["per_repeat"] == [[0.5, 0.7], [0.5, 0.8]]
    assert payload["reports"][0]["best"]["selection"] == "test-set-peak"

    cpath = tmp_path / "curves.csv"
    write_curves_csv(reports, cpath)
    lines = cpath.read_text().splitlines()
    assert lines[0] == "dimension,tl1(1),l2"
    assert len(lines) == 3
    assert lines[1].startswith("1,0.5,")


def test_curves_csv_requires_matching_dims(tmp_path):
    other = EvalReport(method="l1", param=None, dims=(1, 3),
                       mean_accuracies=(0.5, 0.5), per_repeat=())
    with pytest.raises(ConfigError):
        write_curves_csv([make_report(), other], tmp_path / "x.csv")
    with pytest.raises(ConfigError):
        write_curves_csv([], tmp_path / "y.csv")
