import numpy as np
import pandas as pd
import pytest
import toml
from click.testing import CliRunner

from app import cli
from data.generators import gen_dataset1
from models.polyhedral import decision_values
from utils.data_loader import load_csv, save_csv
from utils.model_io import load_model


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def d1_csv(tmp_path):
    path = tmp_path / "d1.csv"
    save_csv(gen_dataset1(1000, seed=7), path)
    return path


def invoke(runner, *args):
    return runner.invoke(cli, [str(a) for a in args])


def test_gen_is_deterministic(runner, tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        result = invoke(runner, "gen", "--dataset", "d1", "--n", 1000, "--seed", 7, "--out", out)
        assert result.exit_code == 0, result.output
    assert first.read_bytes() == second.read_bytes()
    assert len(load_csv(first)) == 1000


def test_gen_random_with_halfspaces(runner, tmp_path):
    out, hs_out = tmp_path / "r.csv", tmp_path / "hs.txt"
    result = invoke(
        runner, "gen", "--dataset", "random", "--n", 50, "--seed", 3,
        "--dim", 3, "--k", 2, "--margin", 0.05, "--out", out, "--halfspaces-out", hs_out,
    )
    assert result.exit_code == 0, result.output
    model = load_model(hs_out)
    data = load_csv(out)
    assert model.weights.shape == (2, 4)
    assert np.array_equal(np.where(decision_values(model, data.augmented()) >= 0, 1, -1), data.labels)


@pytest.mark.parametrize(
    "args",
    [
        ["--dataset", "random", "--n", "10", "--seed", "1", "--k", "2"],
        ["--dataset", "d1", "--n", "10", "--seed", "1", "--dim", "3"],
        ["--dataset", "d2", "--n", "10", "--seed", "1", "--margin", "0.1"],
    ],
)
def test_gen_usage_errors(runner, tmp_path, args):
    result = invoke(runner, "gen", *args, "--out", tmp_path / "x.csv")
    assert result.exit_code == 2


def test_train_then_predict(runner, tmp_path, d1_csv):
    model_path, pred_path, trace_path = tmp_path / "m.txt", tmp_path / "pred.csv", tmp_path / "trace.csv"
    result = invoke(
        runner, "train", "--algo", "batch", "--data", d1_csv, "--k", 3, "--seed", 1,
        "--model-out", model_path, "--trace-out", trace_path,
    )
    assert result.exit_code == 0, result.output
    assert "training accuracy" in result.output
    assert trace_path.exists()

    result = invoke(runner, "predict", "--model", model_path, "--data", d1_csv, "--out", pred_path)
    assert result.exit_code == 0, result.output

    data = load_csv(d1_csv)
    predictions = pd.read_csv(pred_path)
    assert list(predictions.columns) == ["label", "h"]
    assert np.mean(predictions["label"].to_numpy() == data.labels) >= 0.9

    h = decision_values(load_model(model_path), data.augmented())
    np.testing.assert_allclose(predictions["h"].to_numpy(), h, rtol=1e-15, atol=1e-15)
    assert np.array_equal(predictions["label"].to_numpy(), np.where(h >= 0, 1, -1))


def test_train_is_reproducible(runner, tmp_path, d1_csv):
    outputs = []
    for name in ("m1.txt", "m2.txt"):
        result = invoke(
            runner, "train", "--algo", "online", "--data", d1_csv, "--k", 3, "--seed", 4,
            "--passes", 20, "--shuffle", "true", "--model-out", tmp_path / name,
            "--curve-out", tmp_path / f"{name}.curve.csv",
        )
        assert result.exit_code == 0, result.output
        outputs.append((tmp_path / name).read_bytes())
    assert outputs[0] == outputs[1]
    assert len(pd.read_csv(tmp_path / "m1.txt.curve.csv")) <= 20


@pytest.mark.parametrize(
    "extra",
    [
        ["--algo", "online", "--eta", "0.1"],
        ["--algo", "online", "--trace-out", "t.csv"],
        ["--algo", "online", "--no-backtrack"],
        ["--algo", "online", "--keep-best"],
        ["--algo", "batch", "--passes", "10"],
        ["--algo", "batch", "--shuffle", "true"],
        ["--algo", "batch", "--bogus"],
        ["--algo", "perceptron"],
    ],
)
def test_train_usage_errors(runner, tmp_path, d1_csv, extra):
    result = invoke(runner, "train", "--data", d1_csv, "--k", 2, "--seed", 0, "--model-out", tmp_path / "m.txt", *extra)
    assert result.exit_code == 2
    assert not (tmp_path / "m.txt").exists()


def test_missing_data_file_is_a_usage_error(runner, tmp_path):
    result = invoke(
        runner, "train", "--algo", "batch", "--data", tmp_path / "nope.csv", "--k", 1,
        "--seed", 0, "--model-out", tmp_path / "m.txt",
    )
    assert result.exit_code == 2


def test_parse_error_is_one_line(runner, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,1\n1,2,0\n")
    result = invoke(runner, "train", "--algo", "batch", "--data", bad, "--k", 1, "--seed", 0, "--model-out", tmp_path / "m.txt")
    assert result.exit_code == 1
    assert "line 2: label must be -1 or +1" in result.output


def test_cv_on_two_points_reports_stratification_error(runner, tmp_path):
    tiny = tmp_path / "tiny.csv"
    tiny.write_text("-1,-1\n1,1\n")
    result = invoke(
        runner, "cv", "--algo", "batch", "--data", tiny, "--k", 1, "--folds", 2,
        "--repeats", 1, "--report-out", tmp_path / "r.toml",
    )
    assert result.exit_code == 1
    assert "Error:" in result.output
    assert not (tmp_path / "r.toml").exists()


def test_cv_with_more_folds_than_class_members(runner, tmp_path):
    data_path = tmp_path / "line.csv"
    data_path.write_text("".join(f"{x / 10},{-1 if x < 10 else 1}\n" for x in range(20)))
    result = invoke(
        runner, "cv", "--algo", "online", "--data", data_path, "--k", 1, "--passes", 5,
        "--folds", 15, "--repeats", 1, "--report-out", tmp_path / "r.toml",
    )
    assert result.exit_code == 0, result.output
    assert toml.load(tmp_path / "r.toml")["folds"] == 15


def test_cv_writes_report_and_folds(runner, tmp_path):
    data_path = tmp_path / "d1.csv"
    save_csv(gen_dataset1(150, seed=2), data_path)
    report_path, folds_path = tmp_path / "report.toml", tmp_path / "folds.csv"
    result = invoke(
        runner, "cv", "--algo", "online", "--data", data_path, "--k", 2, "--passes", 5,
        "--folds", 3, "--repeats", 2, "--seed", 6, "--report-out", report_path, "--folds-out", folds_path,
    )
    assert result.exit_code == 0, result.output
    report = toml.load(report_path)
    assert report["repeats"] == 2 and report["folds"] == 3
    assert report["config_passes"] == 5
    assert report["config_cv_seed"] == 6
    assert len(pd.read_csv(folds_path)) == 6


def test_config_file_supplies_defaults(runner, tmp_path):
    data_path = tmp_path / "d1.csv"
    save_csv(gen_dataset1(150, seed=3), data_path)
    config = tmp_path / "settings.toml"
    config.write_text("[cv]\nfolds = 3\nrepeats = 1\n\n[online]\npasses = 4\n")
    result = invoke(
        runner, "--config", config, "cv", "--algo", "online", "--data", data_path, "--k", 2,
        "--report-out", tmp_path / "r.toml",
    )
    assert result.exit_code == 0, result.output
    report = toml.load(tmp_path / "r.toml")
    assert (report["folds"], report["repeats"], report["config_passes"]) == (3, 1, 4)


def test_bad_config_file(runner, tmp_path, d1_csv):
    config = tmp_path / "settings.toml"
    config.write_text("[batch]\nlearning_rate = 0.1\n")
    result = invoke(
        runner, "--config", config, "train", "--algo", "batch", "--data", d1_csv, "--k", 1,
        "--seed", 0, "--model-out", tmp_path / "m.txt",
    )
    assert result.exit_code == 1
    assert "learning_rate" in result.output


def test_check_separable_on_xor(runner, tmp_path):
    xor = tmp_path / "xor.csv"
    xor.write_text("0,0,1\n1,1,1\n0,1,-1\n1,0,-1\n")

    result = invoke(runner, "check-separable", "--data", xor, "--k", 1, "--cap", 1000)
    assert result.exit_code == 0, result.output
    assert result.stdout.splitlines()[0] == "not separable"
    assert "undecided 1" in result.stdout

    witness_path = tmp_path / "w.txt"
    result = invoke(runner, "check-separable", "--data", xor, "--k", 2, "--method", "lp", "--model-out", witness_path)
    assert result.exit_code == 0, result.output
    assert result.stdout.splitlines()[:2] == ["separable", "assignment 1 2"]
    assert load_model(witness_path).count == 2
