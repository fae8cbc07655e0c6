import numpy as np
import pandas as pd
import pytest
import toml

from config.settings import BatchConfig, OnlineConfig
from data.generators import DATASET1_HALFSPACES, gen_dataset1
from evaluation.cross_validation import check_stratifiable, k_fold_cv, resolve_trainer, stratified_folds
from evaluation.metrics import accuracy
from evaluation.reports import fold_frame, mistake_curve_export, save_fold_csv, save_report, save_trace
from models.batch import train_batch
from models.online import MistakeCurve, train_online
from models.polyhedral import Dataset, PolyhedralModel
from utils.exceptions import InputError, StratificationError


@pytest.fixture
def polyhedron_data():
    return DATASET1_HALFSPACES, gen_dataset1(120, seed=51)


def test_accuracy_of_zero_model_is_positive_fraction():
    data = Dataset([[1.0], [2.0], [3.0], [4.0]], [1, -1, -1, -1])
    assert accuracy(PolyhedralModel(np.zeros((2, 2))), data) == 0.25


def test_accuracy_hand_count():
    # Threshold at x = 0: predicts +1 for x >= 0
    model = PolyhedralModel([[1.0, 0.0]])
    features = [[-3.0], [-2.0], [-1.0], [0.0], [1.0], [2.0], [3.0], [4.0], [-0.5], [0.5]]
    labels = [-1, -1, 1, -1, 1, 1, -1, 1, -1, 1]
    # Wrong: x=-1 (pred -1), x=0 (pred +1), x=3 (pred +1)
    assert accuracy(model, Dataset(features, labels)) == pytest.approx(0.7)


def test_accuracy_of_generating_polyhedron(polyhedron_data):
    halfspaces, data = polyhedron_data
    assert accuracy(PolyhedralModel.from_halfspaces(halfspaces), data) == 1.0


def test_accuracy_rejects_empty_data(two_plane_model):
    with pytest.raises(InputError):
        accuracy(two_plane_model, Dataset(np.empty((0, 1)), []))


def test_cv_with_generating_polyhedron_is_perfect(polyhedron_data):
    halfspaces, data = polyhedron_data
    truth = PolyhedralModel.from_halfspaces(halfspaces)

    def oracle_trainer(train, cfg):
        return truth

    report = k_fold_cv(data, oracle_trainer, None, folds=4, repeats=3, seed=1)
    assert report.accuracies.shape == (3, 4)
    assert report.mean_accuracy == 1.0
    assert report.std_accuracy == 0.0
    assert report.config["trainer"] == "oracle_trainer"


def test_leave_one_out_on_two_points_needs_both_classes_in_training(separable_pair):
    with pytest.raises(StratificationError):
        k_fold_cv(separable_pair, "batch", BatchConfig(K=1, gamma=1e-9), folds=2, repeats=1)


@pytest.mark.parametrize(
    "labels, folds",
    [([1, 1, -1], 5), ([1, 1, 1, 1], 2), ([1, -1, -1, -1, -1], 2)],
)
def test_check_stratifiable_rejects(labels, folds):
    with pytest.raises(StratificationError):
        check_stratifiable(np.array(labels), folds)


def test_folds_partition_every_sample_with_stratification():
    rng = np.random.default_rng(52)
    for folds in (2, 3, 5, 10):
        labels = np.where(rng.uniform(size=97) < 0.3, 1, -1)
        test_sets = stratified_folds(labels, folds, seed=int(rng.integers(2**32)))
        assert len(test_sets) == folds
        merged = np.concatenate(test_sets)
        assert sorted(merged.tolist()) == list(range(labels.shape[0]))
        for cls in (-1, 1):
            expected = np.mean(labels == cls) * labels.shape[0] / folds
            for test_idx in test_sets:
                assert abs(np.sum(labels[test_idx] == cls) - expected) < 1


def test_more_folds_than_either_class_still_splits():
    labels = np.array([1] * 10 + [-1] * 10)
    test_sets = stratified_folds(labels, 15, seed=3)
    assert len(test_sets) == 15
    assert all(test_idx.size >= 1 for test_idx in test_sets)
    assert sorted(np.concatenate(test_sets).tolist()) == list(range(20))
    for test_idx in test_sets:
        train = np.setdiff1d(np.arange(20), test_idx)
        assert set(labels[train].tolist()) == {-1, 1}


def test_cv_with_more_folds_than_class_members():
    data = Dataset(np.linspace(-1, 1, 20)[:, None], [-1] * 10 + [1] * 10)
    report = k_fold_cv(data, "online", OnlineConfig(K=1, passes=5), folds=15, repeats=1)
    assert report.accuracies.shape == (1, 15)


def test_batch_cv_report_is_consistent_and_reproducible(polyhedron_data):
    _, data = polyhedron_data
    cfg = BatchConfig(K=2, gamma=1e-3, max_outer_iters=50)
    report = k_fold_cv(data, "batch", cfg, folds=4, repeats=2, seed=9)
    again = k_fold_cv(data, "batch", cfg, folds=4, repeats=2, seed=9)

    assert np.all((report.accuracies >= 0) & (report.accuracies <= 1))
    assert np.all(report.train_seconds >= 0)
    assert report.mean_accuracy == pytest.approx(report.accuracies.mean(axis=1).mean())
    assert report.std_accuracy == pytest.approx(np.std(report.accuracies.mean(axis=1)))
    assert np.array_equal(report.accuracies, again.accuracies)
    assert report.config["K"] == 2
    assert report.config["cv_seed"] == 9


def test_parallel_folds_match_sequential(polyhedron_data):
    _, data = polyhedron_data
    cfg = OnlineConfig(K=2, passes=20, shuffle_each_pass=True)
    sequential = k_fold_cv(data, "online", cfg, folds=3, repeats=2, seed=4, n_jobs=1)
    parallel = k_fold_cv(data, "online", cfg, folds=3, repeats=2, seed=4, n_jobs=2)
    assert np.array_equal(sequential.accuracies, parallel.accuracies)


def test_different_seeds_reshuffle(polyhedron_data):
    _, data = polyhedron_data
    labels = data.labels
    a = stratified_folds(labels, 4, seed=1)
    b = stratified_folds(labels, 4, seed=2)
    assert any(not np.array_equal(x, y) for x, y in zip(a, b))


def test_resolve_trainer_checks_name_and_config():
    assert callable(resolve_trainer("batch", BatchConfig()))
    with pytest.raises(InputError):
        resolve_trainer("svm", BatchConfig())
    with pytest.raises(InputError):
        resolve_trainer("online", BatchConfig())


def test_cv_argument_validation(polyhedron_data):
    _, data = polyhedron_data
    with pytest.raises(InputError):
        k_fold_cv(data, "batch", BatchConfig(), folds=1)
    with pytest.raises(InputError):
        k_fold_cv(data, "batch", BatchConfig(), repeats=0)


def test_report_files(polyhedron_data, tmp_path):
    _, data = polyhedron_data
    report = k_fold_cv(data, "batch", BatchConfig(K=2, gamma=1e-3, max_outer_iters=20), folds=3, repeats=2)

    save_report(report, tmp_path / "report.toml")
    loaded = toml.load(tmp_path / "report.toml")
    assert loaded["repeats"] == 2 and loaded["folds"] == 3
    assert loaded["mean_accuracy"] == pytest.approx(report.mean_accuracy)
    assert loaded["config_trainer"] == "batch"
    assert loaded["timestamp"] == report.timestamp

    save_fold_csv(report, tmp_path / "folds.csv")
    frame = pd.read_csv(tmp_path / "folds.csv")
    assert list(frame.columns) == ["repeat", "fold", "accuracy", "train_seconds"]
    assert frame["repeat"].tolist() == [1, 1, 1, 2, 2, 2]
    assert frame["fold"].tolist() == [1, 2, 3, 1, 2, 3]
    assert np.allclose(frame["accuracy"].to_numpy(), report.accuracies.reshape(-1))
    assert fold_frame(report).shape == (6, 4)


def test_mistake_curve_export(tmp_path):
    path = tmp_path / "curve.csv"
    mistake_curve_export(MistakeCurve((5, 2, 0)), path)
    assert path.read_text().splitlines() == ["pass_index,mistakes", "1,5", "2,2", "3,0"]


def test_empty_mistake_curve_rejected(tmp_path):
    with pytest.raises(InputError):
        mistake_curve_export(MistakeCurve(()), tmp_path / "curve.csv")


def test_exported_curve_ends_with_last_pass(polyhedron_data, tmp_path):
    _, data = polyhedron_data
    _, curve = train_online(data, OnlineConfig(K=2, passes=50, seed=2))
    mistake_curve_export(curve, tmp_path / "curve.csv")
    frame = pd.read_csv(tmp_path / "curve.csv")
    assert len(frame) == len(curve)
    assert frame["mistakes"].iloc[-1] == curve.final()


def test_trace_export(polyhedron_data, tmp_path):
    _, data = polyhedron_data
    _, trace = train_batch(data, BatchConfig(K=2, gamma=1e-3, max_outer_iters=15, seed=1))
    save_trace(trace, tmp_path / "trace.csv")
    frame = pd.read_csv(tmp_path / "trace.csv")
    assert len(frame) == len(trace)
    assert np.allclose(frame["criterion"].to_numpy(), trace.criteria())
    assert (frame[["size_1", "size_2"]].sum(axis=1) == len(data)).all()
