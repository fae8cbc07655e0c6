"""
Batch Polyceptron: alternating minimization of the Polyceptron criterion

Each outer iteration freezes the partition S_k, takes gradient steps on every
per-set objective f_k and then recomputes the partition.

With step control on, a step that would raise the criterion is halved until
it does not, and the next iteration starts from twice the accepted step,
capped at eta.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from models.polyhedral import PolyhedralModel, criterion, partition, predict
from utils.exceptions import InputError
from utils.helpers import make_rng

logger = logging.getLogger(__name__)

INIT_LOW = -0.5
INIT_HIGH = 0.5

# Per outer iteration; 0.1 / 2**40 is below 1e-13
MAX_HALVINGS = 40


def init_weights(K, dim, rng):
    """
    Independent uniform [-0.5, 0.5] entries for every hyperplane

    Identical starting vectors would keep every sample in S_1 forever under
    the least-k tie-break, so the rows must differ.
    """
    return PolyhedralModel(rng.uniform(INIT_LOW, INIT_HIGH, size=(K, dim + 1)))


@dataclass(frozen=True)
class TraceRecord:
    criterion: float
    gradient_norm_sum: float
    set_sizes: tuple
    step: float = 0.0


@dataclass
class BatchTrace:
    """
    One record per completed outer iteration

    `step` is the step size applied in that iteration, 0 when the update was
    not applied.
    """

    records: list = field(default_factory=list)
    stop_reason: str = "max_iters"

    def __len__(self):
        return len(self.records)

    def criteria(self):
        return np.array([r.criterion for r in self.records])

    def monotone_fraction(self):
        """Share of consecutive iterations where the criterion did not increase"""
        values = self.criteria()
        if values.size < 2:
            return 1.0
        return float(np.mean(np.diff(values) <= 0))

    def to_frame(self):
        """DataFrame with 1-based iteration and hyperplane columns"""
        rows = []
        for i, r in enumerate(self.records, start=1):
            row = {
                "iteration": i,
                "criterion": r.criterion,
                "gradient_norm_sum": r.gradient_norm_sum,
                "step": r.step,
            }
            row.update({f"size_{k}": size for k, size in enumerate(r.set_sizes, start=1)})
            rows.append(row)
        return pd.DataFrame(rows)


def _mistake_mask(w, X_aug, y):
    # Non-strict: zero-margin points still drive updates
    return y * (X_aug @ w) <= 0


def _set_gradient(w, X_aug, y):
    """-Σ y_n x̃_n over the mistakes of a single frozen set"""
    if X_aug.shape[0] == 0:
        return np.zeros(X_aug.shape[1])
    mask = _mistake_mask(w, X_aug, y)
    return -(y[mask][:, None] * X_aug[mask]).sum(axis=0)


def per_set_gradient(model, part, data, k):
    """
    Gradient of f_k with respect to w̃_k, holding the partition frozen

    Args:
        model: Current PolyhedralModel
        part: Partition computed from the same model
        data: Dataset
        k: 0-based hyperplane index

    Returns:
        Vector of length d+1; zero when S_k has no mistakes
    """
    if not 0 <= k < model.count:
        raise InputError(f"hyperplane index {k} outside 0..{model.count - 1}")
    idx = part.members(k)
    X_aug = data.augmented()
    return _set_gradient(model.weights[k], X_aug[idx], data.labels[idx])


def batch_step(model, data, cfg, part=None, eta=None):
    """
    One outer iteration of the alternating minimization

    Args:
        model: Starting PolyhedralModel
        data: Dataset
        cfg: BatchConfig (eta, inner_steps)
        part: The model's partition, computed here when omitted
        eta: Step size overriding cfg.eta

    Returns:
        Tuple of (new model, sum of per-set gradient norms measured at the
        frozen partition before any update)
    """
    if part is None:
        part = partition(model, data)
    eta = cfg.eta if eta is None else eta
    X_aug = data.augmented()
    weights = np.array(model.weights)
    norm_sum = 0.0

    # Fixed k order keeps the norm sum reproducible run to run
    for k in range(model.count):
        idx = part.members(k)
        X_k, y_k = X_aug[idx], data.labels[idx]
        w = weights[k]
        for step in range(cfg.inner_steps):
            grad = _set_gradient(w, X_k, y_k)
            if step == 0:
                norm_sum += float(np.linalg.norm(grad))
            if not grad.any():
                break
            w = w - eta * grad
        weights[k] = w

    return PolyhedralModel(weights), norm_sum


def training_errors(model, data):
    """Number of samples the model misclassifies"""
    return int(np.count_nonzero(predict(model, data.augmented()) != data.labels))


def _controlled_step(model, data, cfg, part, value, step, candidate):
    """
    Halve the step until the criterion does not increase

    Args:
        candidate: Result of batch_step at `step`

    Returns:
        Tuple of (model, criterion, step), or None when MAX_HALVINGS halvings
        all increase the criterion
    """
    for halvings in range(MAX_HALVINGS + 1):
        if halvings:
            step /= 2
            candidate, _ = batch_step(model, data, cfg, part=part, eta=step)
        new_value = criterion(candidate, data)
        if new_value <= value:
            return candidate, new_value, step
    return None


def train_batch(data, cfg, initial=None):
    """
    Batch Polyceptron training loop

    Runs outer iterations while the gradient-norm sum stays at or above gamma,
    up to cfg.max_outer_iters. The update of the iteration whose norm falls
    below gamma is not applied. With cfg.keep_best the iterate with the fewest
    training errors (then the lowest criterion, then the earliest) is
    returned instead of the last one.

    Args:
        data: Dataset with at least one sample
        cfg: BatchConfig
        initial: Optional starting PolyhedralModel; seeded random otherwise

    Returns:
        Tuple of (PolyhedralModel, BatchTrace)
    """
    if len(data) == 0:
        raise InputError("cannot train on an empty dataset")

    model = initial if initial is not None else init_weights(cfg.K, data.dim, make_rng(cfg.seed))
    if model.dim != data.dim or model.count != cfg.K:
        raise InputError(f"initial model has shape {model.weights.shape}, expected ({cfg.K}, {data.dim + 1})")

    trace = BatchTrace()
    value = criterion(model, data)
    part = partition(model, data)
    best_key, best_model = (training_errors(model, data), value), model
    step = cfg.eta

    for iteration in range(1, cfg.max_outer_iters + 1):
        sizes = tuple(int(s) for s in part.sizes())
        updated, norm_sum = batch_step(model, data, cfg, part=part, eta=step)
        logger.debug(
            "iteration %d: criterion=%.6g grad_norm_sum=%.6g sizes=%s",
            iteration, value, norm_sum, sizes,
        )

        if norm_sum < cfg.gamma:
            trace.records.append(TraceRecord(value, norm_sum, sizes))
            trace.stop_reason = "threshold"
            break

        if cfg.backtrack:
            accepted = _controlled_step(model, data, cfg, part, value, step, updated)
            if accepted is None:
                trace.records.append(TraceRecord(value, norm_sum, sizes))
                trace.stop_reason = "stalled"
                break
            updated, new_value, step = accepted
        else:
            new_value = criterion(updated, data)

        trace.records.append(TraceRecord(value, norm_sum, sizes, step))
        if new_value > value:
            logger.warning(
                "criterion increased at iteration %d: %.6g -> %.6g",
                iteration, value, new_value,
            )

        model, value = updated, new_value
        part = partition(model, data)
        key = (training_errors(model, data), value)
        if key < best_key:
            best_key, best_model = key, model
        if cfg.backtrack:
            step = min(cfg.eta, 2 * step)

    logger.info(
        "batch training stopped after %d iterations (%s), criterion=%.6g, best iterate %d errors",
        len(trace), trace.stop_reason, value, best_key[0],
    )
    return (best_model if cfg.keep_best else model), trace
