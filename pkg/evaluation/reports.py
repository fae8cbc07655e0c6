"""
Serialization of evaluation artifacts: CV reports, per-fold tables,
mistake curves and batch traces

Repeat, fold, pass and iteration numbers are 1-based in every output.
"""

import pandas as pd
import toml

from utils.exceptions import InputError


def report_summary(report):
    """Flat key-value view of a CvReport"""
    summary = {
        "timestamp": report.timestamp,
        "repeats": report.repeats,
        "folds": report.folds,
        "mean_accuracy": report.mean_accuracy,
        "std_accuracy": report.std_accuracy,
        "mean_train_seconds": report.mean_seconds,
        "std_train_seconds": report.std_seconds,
    }
    summary.update({f"config_{k}": v for k, v in report.config.items()})
    return summary


def save_report(report, path):
    """Write the key-value text report (TOML)"""
    with open(path, "w", encoding="utf-8") as f:
        toml.dump(report_summary(report), f)


def fold_frame(report):
    """One row per (repeat, fold)"""
    rows = [
        {
            "repeat": r + 1,
            "fold": f + 1,
            "accuracy": report.accuracies[r, f],
            "train_seconds": report.train_seconds[r, f],
        }
        for r in range(report.repeats)
        for f in range(report.folds)
    ]
    return pd.DataFrame(rows, columns=["repeat", "fold", "accuracy", "train_seconds"])


def save_fold_csv(report, path):
    fold_frame(report).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def mistake_curve_export(curve, path):
    """
    Write a MistakeCurve as `pass_index,mistakes` CSV

    Args:
        curve: MistakeCurve with at least one pass
        path: Output path
    """
    if len(curve) == 0:
        raise InputError("cannot export an empty mistake curve")
    frame = pd.DataFrame({"pass_index": range(1, len(curve) + 1), "mistakes": list(curve.counts)})
    frame.to_csv(path, index=False, lineterminator="\n")


def save_trace(trace, path):
    """Write a BatchTrace as CSV"""
    trace.to_frame().to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
