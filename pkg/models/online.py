"""
Online Polyceptron: mistake-driven updates of the minimum hyperplane only
"""

import logging
from dataclasses import dataclass

import numpy as np

from models.batch import init_weights
from models.polyhedral import PolyhedralModel, augment
from utils.exceptions import DimensionMismatchError, InputError
from utils.helpers import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MistakeCurve:
    """Misclassified presentations per pass"""

    counts: tuple

    def __len__(self):
        return len(self.counts)

    def final(self):
        return self.counts[-1]

    @property
    def converged(self):
        """True when the last pass made no mistakes"""
        return bool(self.counts) and self.counts[-1] == 0


def _update_in_place(weights, x_aug, y, step):
    """
    Apply the online rule to a mutable (K, d+1) weight matrix

    Returns:
        Tuple of (updated, r)
    """
    values = weights @ x_aug
    r = int(np.argmin(values))
    predicted = 1 if values[r] >= 0 else -1
    if predicted == y:
        return False, r
    weights[r] = weights[r] + step * y * x_aug
    return True, r


def online_step(model, sample, step=1.0):
    """
    Present one sample to the online Polyceptron

    Args:
        model: Current PolyhedralModel
        sample: LabeledSample
        step: Positive step size (1 in the classical rule)

    Returns:
        Tuple of (model, updated, r) where r is the 0-based argmin hyperplane;
        the input model is returned unchanged when no update fires
    """
    x_aug = augment(sample)
    if x_aug.shape[0] != model.dim + 1:
        raise DimensionMismatchError(
            f"model expects {model.dim} features, sample has {x_aug.shape[0] - 1}"
        )
    weights = np.array(model.weights)
    updated, r = _update_in_place(weights, x_aug, sample.label, step)
    if not updated:
        return model, False, r
    return PolyhedralModel(weights), True, r


def train_online(data, cfg, initial=None):
    """
    Multi-pass online Polyceptron

    Args:
        data: Dataset with at least one sample
        cfg: OnlineConfig
        initial: Optional starting PolyhedralModel; seeded random otherwise

    Returns:
        Tuple of (PolyhedralModel, MistakeCurve)
    """
    if len(data) == 0:
        raise InputError("cannot train on an empty dataset")

    rng = make_rng(cfg.seed)
    model = initial if initial is not None else init_weights(cfg.K, data.dim, rng)
    if model.dim != data.dim or model.count != cfg.K:
        raise InputError(f"initial model has shape {model.weights.shape}, expected ({cfg.K}, {data.dim + 1})")

    weights = np.array(model.weights)
    X_aug = data.augmented()
    labels = data.labels
    order = np.arange(len(data))
    counts = []

    for pass_index in range(1, cfg.passes + 1):
        if cfg.shuffle_each_pass:
            order = rng.permutation(len(data))

        mistakes = 0
        for n in order:
            updated, _ = _update_in_place(weights, X_aug[n], int(labels[n]), cfg.step)
            mistakes += updated
        counts.append(mistakes)
        logger.debug("pass %d: %d mistakes", pass_index, mistakes)

        if mistakes == 0 and cfg.early_stop:
            logger.info("zero-mistake pass at %d, stopping early", pass_index)
            break
    else:
        logger.info("online training ran all %d passes, last pass had %d mistakes", cfg.passes, counts[-1])

    return PolyhedralModel(weights), MistakeCurve(tuple(counts))
