"""
Brute-force credit assignment oracle for small instances

Every negative sample must be pushed outside the polyhedron by at least one
hyperplane. The oracle enumerates all K^|C_2| ways of blaming a hyperplane for
each negative, and for each assignment solves K independent linear
separability problems: all positives on the non-negative side of w̃_k, the
negatives assigned to k strictly on the negative side.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from models.polyhedral import PolyhedralModel
from utils.exceptions import EnumerationBudgetError, InputError

logger = logging.getLogger(__name__)

ENUMERATION_BUDGET = 10**7
DEFAULT_CAP = 10**5
STRICTNESS = 1e-9


@dataclass(frozen=True)
class SeparabilityWitness:
    """
    Result of a polyhedral separability check

    Attributes:
        separable: Whether a separating polyhedron was found
        model: Witness PolyhedralModel when separable
        assignment: 0-based hyperplane index per negative sample (in data order)
        undecided: Subproblems abandoned at the perceptron cap and counted as
            not separable; 0 means the answer is exact
        assignments_checked: Number of assignments enumerated
    """

    separable: bool
    model: PolyhedralModel = None
    assignment: tuple = None
    undecided: int = 0
    assignments_checked: int = 0


def _strictness(pos, neg):
    vectors = [a for a in (pos, neg) if a.size]
    if not vectors:
        return STRICTNESS
    return STRICTNESS * max(float(np.linalg.norm(a, axis=1).max()) for a in vectors)


def _perceptron_separator(pos, neg, cap):
    """
    Mistake-driven search for w̃ with pos·w̃ >= 0 and neg·w̃ <= -eps

    Returns:
        Tuple of (weight vector or None, cap_exhausted)
    """
    width = pos.shape[1] if pos.size else neg.shape[1]
    eps = _strictness(pos, neg)
    w = np.zeros(width)
    updates = 0

    while True:
        clean = True
        for x in pos:
            if x @ w < 0:
                w = w + x
                updates += 1
                clean = False
                if updates >= cap:
                    return None, True
        for x in neg:
            if x @ w > -eps:
                w = w - x
                updates += 1
                clean = False
                if updates >= cap:
                    return None, True
        if clean:
            return w, False


def _lp_separator(pos, neg):
    """
    Exact feasibility LP with unit margins on both sides

    Equivalent to pos >= 0, neg < 0 for finite point sets.
    """
    width = pos.shape[1] if pos.size else neg.shape[1]
    A_ub = np.vstack([-pos, neg]) if pos.size else neg
    b_ub = -np.ones(len(pos) + len(neg))
    soln = linprog(np.zeros(width), A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * width, method="highs")
    if soln.status == 0:
        return soln.x, False
    return None, False


def _solve(pos, neg, cap, method):
    if neg.shape[0] == 0:
        # Nothing to exclude: the constant-positive hyperplane 0·x + 1
        w = np.zeros(pos.shape[1])
        w[-1] = 1.0
        return w, False
    if method == "lp":
        return _lp_separator(pos, neg)
    return _perceptron_separator(pos, neg, cap)


def _split(data):
    X_aug = data.augmented()
    return X_aug[data.labels == 1], X_aug[data.labels == -1]


def _as_augmented(features, width=None):
    features = np.asarray(features, dtype=np.float64)
    if features.size == 0:
        return np.empty((0, (width or 0) + 1))
    features = features.reshape(features.shape[0], -1) if features.ndim > 1 else features.reshape(-1, 1)
    return np.hstack([features, np.ones((features.shape[0], 1))])


def is_linearly_separable(pos, neg, cap=DEFAULT_CAP, method="perceptron"):
    """
    Single-hyperplane separability with non-negative positives and strictly
    negative negatives

    Args:
        pos: (P, d) positive feature rows
        neg: (M, d) negative feature rows
        cap: Maximum perceptron updates before giving up
        method: "perceptron" (capped, heuristic where the cap binds) or "lp"

    Returns:
        Tuple of (separable, augmented weight vector or None)
    """
    if cap < 1:
        raise InputError(f"cap must be >= 1, got {cap}")
    if method not in ("perceptron", "lp"):
        raise InputError(f"unknown separability method {method!r}")
    pos_aug = _as_augmented(pos)
    neg_aug = _as_augmented(neg, pos_aug.shape[1] - 1 if pos_aug.size else None)
    if not pos_aug.size:
        pos_aug = np.empty((0, neg_aug.shape[1]))
    if pos_aug.shape[1] != neg_aug.shape[1]:
        raise InputError("positive and negative samples have different dimensions")
    w, _ = _solve(pos_aug, neg_aug, cap, method)
    return w is not None, w


def is_polyhedrally_separable(data, K, cap=DEFAULT_CAP, method="perceptron", budget=ENUMERATION_BUDGET):
    """
    Exhaustive search for K hyperplanes separating the data

    Assignments are enumerated in lexicographic order and the first success is
    returned, so the witness is deterministic.

    Args:
        data: Dataset
        K: Number of hyperplanes
        cap: Perceptron update cap per subproblem
        method: Subproblem solver, "perceptron" or "lp"
        budget: Largest K^|C_2| attempted

    Returns:
        SeparabilityWitness
    """
    if K < 1:
        raise InputError(f"K must be >= 1, got {K}")
    pos, neg = _split(data)
    n_neg = neg.shape[0]
    total = K**n_neg
    if total > budget:
        raise EnumerationBudgetError(
            f"{K}^{n_neg} = {total} assignments exceeds the enumeration budget of {budget}"
        )

    # Subproblem k only depends on the set of negatives assigned to it
    cache = {}
    undecided = set()
    checked = 0

    for assignment in itertools.product(range(K), repeat=n_neg):
        checked += 1
        assignment = np.asarray(assignment, dtype=np.int64)
        weights = []
        for k in range(K):
            members = tuple(np.flatnonzero(assignment == k))
            if members not in cache:
                cache[members] = _solve(pos, neg[list(members)], cap, method)
                if cache[members][1]:
                    undecided.add(members)
            w, _ = cache[members]
            if w is None:
                break
            weights.append(w)
        else:
            logger.info("separable with K=%d after %d assignments", K, checked)
            return SeparabilityWitness(
                separable=True,
                model=PolyhedralModel(np.vstack(weights)),
                assignment=tuple(int(a) for a in assignment),
                undecided=len(undecided),
                assignments_checked=checked,
            )

    if undecided:
        logger.warning("%d subproblems hit the perceptron cap and were treated as not separable", len(undecided))
    return SeparabilityWitness(separable=False, undecided=len(undecided), assignments_checked=checked)
