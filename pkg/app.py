"""
Polyceptron toolkit: command-line entry point

    python app.py gen --dataset d1 --n 1000 --seed 7 --out d1.csv
    python app.py train --algo batch --data d1.csv --k 3 --seed 1 --model-out m.txt
    python app.py predict --model m.txt --data d1.csv --out pred.csv
    python app.py cv --algo batch --data d1.csv --k 3 --report-out report.toml
    python app.py check-separable --data tiny.csv --k 2 --cap 100000
"""

import functools
import logging

import click
import pandas as pd

from config.settings import BatchConfig, CvConfig, OnlineConfig, build_config, load_settings
from data.generators import (
    DATASET1_HALFSPACES,
    DATASET2_HALFSPACES,
    gen_dataset1,
    gen_dataset2,
    gen_random_polyhedron,
)
from evaluation.cross_validation import k_fold_cv
from evaluation.metrics import accuracy
from evaluation.reports import mistake_curve_export, save_fold_csv, save_report, save_trace
from models.batch import train_batch
from models.online import train_online
from models.oracle import DEFAULT_CAP, is_polyhedrally_separable
from models.polyhedral import PolyhedralModel, decision_values
from utils.data_loader import load_csv, save_csv
from utils.exceptions import PolyceptronError
from utils.helpers import configure_logging, format_percent
from utils.model_io import load_model, save_model

logger = logging.getLogger(__name__)

BATCH_FLAGS = {
    "eta": "--eta",
    "gamma": "--gamma",
    "max_iters": "--max-iters",
    "inner_steps": "--inner-steps",
    "backtrack": "--backtrack",
    "keep_best": "--keep-best",
    "trace_out": "--trace-out",
}
ONLINE_FLAGS = {
    "passes": "--passes",
    "step": "--step",
    "shuffle": "--shuffle",
    "curve_out": "--curve-out",
}
RANDOM_FLAGS = {"dim": "--dim", "k": "--k", "margin": "--margin"}

INPUT_FILE = click.Path(exists=True, dir_okay=False)
OUTPUT_FILE = click.Path(dir_okay=False, writable=True)


def handle_errors(command):
    """Turn toolkit and IO errors into single-line CLI diagnostics"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (PolyceptronError, OSError) as e:
            logger.debug("command failed", exc_info=True)
            raise click.ClickException(str(e).splitlines()[0] if str(e) else type(e).__name__) from e

    return wrapper


def reject_flags(params, flags, context):
    """Usage error when any of `flags` was given"""
    given = [flag for name, flag in flags.items() if params.get(name) is not None]
    if given:
        raise click.UsageError(f"{', '.join(given)} cannot be used with {context}")


def trainer_options(command):
    """Flags shared by train and cv"""
    options = [
        click.option("--algo", type=click.Choice(["batch", "online"]), required=True),
        click.option("--data", "data_path", type=INPUT_FILE, required=True, help="DataFile CSV"),
        click.option("--has-header", is_flag=True, help="Data file starts with a header row"),
        click.option("--k", type=int, required=True, help="Number of hyperplanes"),
        click.option("--eta", type=float, help="Batch step size [default: 0.1]"),
        click.option("--gamma", type=float, help="Batch gradient-norm threshold [default: 50]"),
        click.option("--max-iters", type=int, help="Batch outer-iteration cap [default: 1000]"),
        click.option("--inner-steps", type=int, help="Gradient steps per frozen partition [default: 1]"),
        click.option("--backtrack/--no-backtrack", default=None, help="Halve steps that raise the criterion [default: on]"),
        click.option("--keep-best/--no-keep-best", default=None, help="Return the fewest-error iterate [default: on]"),
        click.option("--passes", type=int, help="Online passes over the data [default: 300]"),
        click.option("--step", type=float, help="Online step size [default: 1]"),
        click.option("--shuffle", type=click.BOOL, help="Reshuffle every online pass [default: false]"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def build_trainer_config(settings, params, seed):
    """BatchConfig or OnlineConfig from flags, config file and defaults"""
    if params["algo"] == "batch":
        reject_flags(params, ONLINE_FLAGS, "--algo batch")
        return build_config(
            BatchConfig,
            settings["batch"],
            K=params["k"],
            eta=params["eta"],
            gamma=params["gamma"],
            max_outer_iters=params["max_iters"],
            inner_steps=params["inner_steps"],
            backtrack=params["backtrack"],
            keep_best=params["keep_best"],
            seed=seed,
        )
    reject_flags(params, BATCH_FLAGS, "--algo online")
    return build_config(
        OnlineConfig,
        settings["online"],
        K=params["k"],
        passes=params["passes"],
        step=params["step"],
        shuffle_each_pass=params["shuffle"],
        seed=seed,
    )


@click.group()
@click.option("-v", "--verbose", count=True, help="Increase log detail (repeatable)")
@click.option("-q", "--quiet", is_flag=True, help="Only log errors")
@click.option("--config", "config_path", type=INPUT_FILE, help="TOML file with [batch], [online], [cv] tables")
@click.pass_context
@handle_errors
def cli(ctx, verbose, quiet, config_path):
    """Polyhedral classifiers trained with the Polyceptron criterion"""
    configure_logging(verbose, quiet)
    ctx.obj = load_settings(config_path)


@cli.command()
@click.option("--dataset", type=click.Choice(["d1", "d2", "random"]), required=True)
@click.option("--n", type=int, required=True, help="Number of samples")
@click.option("--seed", type=int, required=True)
@click.option("--dim", type=int, help="Feature dimension (random only)")
@click.option("--k", type=int, help="Number of halfspaces (random only)")
@click.option("--margin", type=float, help="Boundary exclusion band (random only) [default: 0]")
@click.option("--out", type=OUTPUT_FILE, required=True)
@click.option("--halfspaces-out", type=OUTPUT_FILE, help="Also save the generating polyhedron as a model file")
@click.pass_context
@handle_errors
def gen(ctx, dataset, n, seed, dim, k, margin, out, halfspaces_out):
    """Generate a synthetic polyhedrally separable dataset"""
    halfspaces = None
    if dataset == "random":
        if dim is None or k is None:
            raise click.UsageError("--dataset random requires --dim and --k")
        halfspaces, data = gen_random_polyhedron(dim, k, n, margin or 0.0, seed)
    else:
        reject_flags(ctx.params, RANDOM_FLAGS, f"--dataset {dataset}")
        generator = gen_dataset1 if dataset == "d1" else gen_dataset2
        data = generator(n, seed)

    save_csv(data, out)
    if halfspaces_out is not None:
        if halfspaces is None:
            halfspaces = DATASET1_HALFSPACES if dataset == "d1" else DATASET2_HALFSPACES
        save_model(PolyhedralModel.from_halfspaces(halfspaces), halfspaces_out)

    positives = int((data.labels == 1).sum())
    click.echo(f"wrote {len(data)} samples ({positives} positive) to {out}")


@cli.command()
@trainer_options
@click.option("--seed", type=int, required=True)
@click.option("--model-out", type=OUTPUT_FILE, required=True)
@click.option("--curve-out", type=OUTPUT_FILE, help="Online mistake curve CSV")
@click.option("--trace-out", type=OUTPUT_FILE, help="Batch trace CSV")
@click.pass_context
@handle_errors
def train(ctx, data_path, has_header, seed, model_out, curve_out, trace_out, **_):
    """Train a polyhedral classifier"""
    cfg = build_trainer_config(ctx.obj, ctx.params, seed)
    data = load_csv(data_path, has_header)

    if isinstance(cfg, BatchConfig):
        model, trace = train_batch(data, cfg)
        if trace_out is not None:
            save_trace(trace, trace_out)
        detail = f"{len(trace)} iterations, stopped on {trace.stop_reason}"
    else:
        model, curve = train_online(data, cfg)
        if curve_out is not None:
            mistake_curve_export(curve, curve_out)
        detail = f"{len(curve)} passes, last pass {curve.final()} mistakes"

    save_model(model, model_out)
    click.echo(f"K={model.count}: {detail}; training accuracy {format_percent(accuracy(model, data))}")


@cli.command()
@click.option("--model", "model_path", type=INPUT_FILE, required=True)
@click.option("--data", "data_path", type=INPUT_FILE, required=True)
@click.option("--has-header", is_flag=True, help="Data file starts with a header row")
@click.option("--out", type=OUTPUT_FILE, required=True)
@handle_errors
def predict(model_path, data_path, has_header, out):
    """Write the predicted label and decision value for every row"""
    model = load_model(model_path)
    data = load_csv(data_path, has_header)
    h = decision_values(model, data.augmented())
    frame = pd.DataFrame({"label": [1 if v >= 0 else -1 for v in h], "h": h})
    frame.to_csv(out, index=False, float_format="%.17g", lineterminator="\n")
    click.echo(f"accuracy {format_percent(accuracy(model, data))} on {len(data)} samples")


@cli.command()
@trainer_options
@click.option("--folds", type=int, help="Folds per repeat [default: 10]")
@click.option("--repeats", type=int, help="Repeats [default: 10]")
@click.option("--seed", type=int, help="Protocol seed [default: 0]")
@click.option("--jobs", type=int, help="Parallel workers [default: 1]")
@click.option("--report-out", type=OUTPUT_FILE, required=True)
@click.option("--folds-out", type=OUTPUT_FILE, help="Per-fold accuracy CSV")
@click.pass_context
@handle_errors
def cv(ctx, data_path, has_header, folds, repeats, seed, jobs, report_out, folds_out, **_):
    """Repeated stratified k-fold cross-validation"""
    protocol = build_config(CvConfig, ctx.obj["cv"], folds=folds, repeats=repeats, seed=seed, n_jobs=jobs)
    cfg = build_trainer_config(ctx.obj, ctx.params, protocol.seed)
    data = load_csv(data_path, has_header)

    report = k_fold_cv(
        data,
        ctx.params["algo"],
        cfg,
        folds=protocol.folds,
        repeats=protocol.repeats,
        seed=protocol.seed,
        n_jobs=protocol.n_jobs,
    )
    save_report(report, report_out)
    if folds_out is not None:
        save_fold_csv(report, folds_out)
    click.echo(
        f"accuracy {format_percent(report.mean_accuracy)} ± {format_percent(report.std_accuracy)} "
        f"over {report.repeats} x {report.folds}-fold CV"
    )


@cli.command("check-separable")
@click.option("--data", "data_path", type=INPUT_FILE, required=True)
@click.option("--has-header", is_flag=True, help="Data file starts with a header row")
@click.option("--k", type=int, required=True)
@click.option("--cap", type=int, default=DEFAULT_CAP, show_default=True, help="Perceptron updates per subproblem")
@click.option("--method", type=click.Choice(["perceptron", "lp"]), default="perceptron", show_default=True)
@click.option("--model-out", type=OUTPUT_FILE, help="Save the witness model")
@handle_errors
def check_separable(data_path, has_header, k, cap, method, model_out):
    """Exhaustive K-polyhedral separability check (small data only)"""
    data = load_csv(data_path, has_header)
    witness = is_polyhedrally_separable(data, k, cap=cap, method=method)

    if not witness.separable:
        click.echo("not separable")
    else:
        click.echo("separable")
        click.echo("assignment " + " ".join(str(a + 1) for a in witness.assignment))
        if model_out is not None:
            save_model(witness.model, model_out)
    click.echo(f"undecided {witness.undecided}")


if __name__ == "__main__":
    cli()
