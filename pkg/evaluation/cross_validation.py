"""
Repeated stratified k-fold cross-validation

Each repeat reshuffles with its own derived seed, every fold trains with its
own derived trainer seed, and the reported standard deviation is taken over
the per-repeat mean accuracies.
"""

import logging
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
from joblib import Parallel, delayed

from config.settings import BatchConfig, OnlineConfig, config_echo, with_seed
from evaluation.metrics import accuracy
from models.batch import train_batch
from models.online import train_online
from utils.exceptions import InputError, StratificationError
from utils.helpers import derive_seeds, make_rng

logger = logging.getLogger(__name__)


def _batch_trainer(data, cfg):
    return train_batch(data, cfg)[0]


def _online_trainer(data, cfg):
    return train_online(data, cfg)[0]


TRAINERS = {
    "batch": (_batch_trainer, BatchConfig),
    "online": (_online_trainer, OnlineConfig),
}


def resolve_trainer(trainer, cfg):
    """
    Map a trainer name to its training function, checking the config type

    Callables are passed through unchanged.
    """
    if callable(trainer):
        return trainer
    if trainer not in TRAINERS:
        raise InputError(f"unknown trainer {trainer!r}; expected one of {', '.join(TRAINERS)}")
    fn, cfg_type = TRAINERS[trainer]
    if not isinstance(cfg, cfg_type):
        raise InputError(f"trainer {trainer!r} needs a {cfg_type.__name__}, got {type(cfg).__name__}")
    return fn


@dataclass(frozen=True)
class CvReport:
    """
    Cross-validation results

    Attributes:
        accuracies: (repeats, folds) test accuracies
        train_seconds: (repeats, folds) wall-clock training time per fold
        config: Echo of the trainer and protocol settings
        timestamp: UTC creation time, ISO 8601
    """

    accuracies: np.ndarray
    train_seconds: np.ndarray
    config: dict = field(default_factory=dict)
    timestamp: str = ""

    @property
    def repeats(self):
        return self.accuracies.shape[0]

    @property
    def folds(self):
        return self.accuracies.shape[1]

    def repeat_means(self):
        return self.accuracies.mean(axis=1)

    @property
    def mean_accuracy(self):
        return float(self.repeat_means().mean())

    @property
    def std_accuracy(self):
        return float(self.repeat_means().std())

    @property
    def mean_seconds(self):
        return float(self.train_seconds.mean())

    @property
    def std_seconds(self):
        return float(self.train_seconds.std())


def check_stratifiable(labels, folds):
    """Reject data where some training split would lose a class"""
    n = labels.shape[0]
    if n < folds:
        raise StratificationError(f"{n} samples cannot fill {folds} folds")
    classes, counts = np.unique(labels, return_counts=True)
    if classes.shape[0] < 2:
        raise StratificationError("both classes must be present for cross-validation")
    for cls, count in zip(classes, counts):
        if count < 2:
            raise StratificationError(
                f"class {cls:+d} has {count} sample; its held-out fold would leave training without it"
            )


def stratified_folds(labels, folds, seed):
    """
    Test-index arrays of a shuffled per-class round-robin split

    Each class is shuffled and dealt to folds in turn, continuing the count
    from the previous class, so every fold is non-empty when N >= folds and
    per-fold class counts differ by at most one from the exact proportion.
    """
    check_stratifiable(labels, folds)
    rng = make_rng(seed)
    assignment = np.empty(labels.shape[0], dtype=np.int64)
    dealt = 0
    for cls in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == cls))
        assignment[members] = (dealt + np.arange(members.size)) % folds
        dealt += members.size
    return [np.flatnonzero(assignment == f) for f in range(folds)]


def _run_fold(trainer, data, cfg, train_idx, test_idx, fold_seed):
    train = data.subset(train_idx)
    if np.unique(train.labels).shape[0] < 2:
        raise StratificationError("a training split is missing a class")
    fold_cfg = with_seed(cfg, fold_seed) if cfg is not None else None

    start = time.perf_counter()
    model = trainer(train, fold_cfg)
    elapsed = time.perf_counter() - start

    return accuracy(model, data.subset(test_idx)), elapsed


def k_fold_cv(data, trainer, cfg, folds=10, repeats=10, seed=0, n_jobs=1):
    """
    Repeated stratified k-fold cross-validation

    Args:
        data: Dataset
        trainer: "batch", "online" or a callable (train_data, cfg) -> PolyhedralModel
        cfg: Trainer config; its seed is replaced per fold
        folds: Folds per repeat (>= 2)
        repeats: Number of reshuffled repeats
        seed: Protocol seed
        n_jobs: joblib workers; results are identical for any value

    Returns:
        CvReport
    """
    if folds < 2:
        raise InputError(f"folds must be >= 2, got {folds}")
    if repeats < 1:
        raise InputError(f"repeats must be >= 1, got {repeats}")
    fn = resolve_trainer(trainer, cfg)
    check_stratifiable(data.labels, folds)

    tasks = []
    everything = np.arange(len(data))
    for repeat_seed in derive_seeds(seed, repeats):
        split_seed, *fold_seeds = derive_seeds(repeat_seed, folds + 1)
        for f, test_idx in enumerate(stratified_folds(data.labels, folds, split_seed)):
            train_idx = np.setdiff1d(everything, test_idx)
            tasks.append(delayed(_run_fold)(fn, data, cfg, train_idx, test_idx, fold_seeds[f]))

    results = Parallel(n_jobs=n_jobs)(tasks)
    scores = np.array(results, dtype=np.float64).reshape(repeats, folds, 2)

    echo = {"trainer": trainer if isinstance(trainer, str) else getattr(trainer, "__name__", "custom"),
            "folds": folds, "repeats": repeats, "cv_seed": seed}
    if cfg is not None:
        echo.update(config_echo(cfg))

    report = CvReport(
        accuracies=scores[:, :, 0],
        train_seconds=scores[:, :, 1],
        config=echo,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    logger.info(
        "%d x %d-fold CV: accuracy %.4f ± %.4f",
        repeats, folds, report.mean_accuracy, report.std_accuracy,
    )
    return report
