"""
Polyhedral classifier core: samples, models, the decision function and the
Polyceptron criterion

A model is K augmented weight vectors w̃_k = [w_k b_k]. A point is classified
positive when it lies on the non-negative side of every hyperplane, i.e. when
h(x) = min_k w̃_k^T x̃ >= 0.
"""

from dataclasses import dataclass

import numpy as np

from utils.exceptions import DimensionMismatchError, InputError


@dataclass(frozen=True)
class LabeledSample:
    """A feature vector with a label in {-1, +1}"""

    features: np.ndarray
    label: int

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(features)):
            raise InputError("sample features must be finite")
        if self.label not in (-1, 1):
            raise InputError(f"label must be -1 or +1, got {self.label!r}")
        features.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "label", int(self.label))

    @property
    def dim(self):
        return self.features.shape[0]


@dataclass(frozen=True)
class Dataset:
    """
    Labeled samples stored column-wise

    Args:
        features: (N, d) float matrix
        labels: (N,) vector of -1/+1
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64, ndmin=2)
        labels = np.asarray(self.labels).reshape(-1)

        if features.shape[0] != labels.shape[0]:
            raise InputError(
                f"{features.shape[0]} feature rows but {labels.shape[0]} labels"
            )
        if not np.all(np.isfinite(features)):
            raise InputError("sample features must be finite")
        if labels.size and not np.all(np.isin(labels, (-1, 1))):
            raise InputError("labels must be -1 or +1")

        labels = labels.astype(np.int64)
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_samples(cls, samples):
        samples = list(samples)
        if not samples:
            raise InputError("cannot build a dataset from zero samples")
        dims = {s.dim for s in samples}
        if len(dims) > 1:
            raise DimensionMismatchError(f"samples have mixed dimensions {sorted(dims)}")
        return cls(np.vstack([s.features for s in samples]), [s.label for s in samples])

    def __len__(self):
        return self.labels.shape[0]

    def __iter__(self):
        for x, y in zip(self.features, self.labels):
            yield LabeledSample(x, int(y))

    def __getitem__(self, index):
        return LabeledSample(self.features[index], int(self.labels[index]))

    @property
    def dim(self):
        return self.features.shape[1]

    def augmented(self):
        """(N, d+1) matrix of augmented vectors [x 1]"""
        return np.hstack([self.features, np.ones((len(self), 1))])

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[indices], self.labels[indices])

    def positives(self):
        return self.subset(np.flatnonzero(self.labels == 1))

    def negatives(self):
        return self.subset(np.flatnonzero(self.labels == -1))


@dataclass(frozen=True)
class PolyhedralModel:
    """
    K augmented weight vectors, one row per hyperplane

    Args:
        weights: (K, d+1) matrix, row k = [w_k b_k]
    """

    weights: np.ndarray

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64, ndmin=2)
        if weights.ndim != 2 or weights.shape[0] < 1 or weights.shape[1] < 2:
            raise InputError(f"weights must be a (K, d+1) matrix with K >= 1, got {weights.shape}")
        if not np.all(np.isfinite(weights)):
            raise InputError("model weights must be finite")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_halfspaces(cls, halfspaces):
        """Model whose positive region is exactly the given HalfspaceSet"""
        return cls(np.hstack([halfspaces.coefficients, halfspaces.offsets[:, None]]))

    @property
    def dim(self):
        return self.weights.shape[1] - 1

    @property
    def count(self):
        return self.weights.shape[0]

    def with_weight(self, k, vector):
        """Copy of the model with hyperplane k replaced"""
        weights = self.weights.copy()
        weights[k] = vector
        return PolyhedralModel(weights)

    def __eq__(self, other):
        if not isinstance(other, PolyhedralModel):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    __hash__ = None


@dataclass(frozen=True)
class Partition:
    """
    Assignment of every sample to the hyperplane attaining its minimum value

    Indices are 0-based; the induced sets S_k are disjoint and cover the data.
    """

    assignment: np.ndarray
    count: int

    def __post_init__(self):
        assignment = np.asarray(self.assignment, dtype=np.int64).reshape(-1)
        assignment.setflags(write=False)
        object.__setattr__(self, "assignment", assignment)

    def members(self, k):
        """Sample indices in S_k"""
        return np.flatnonzero(self.assignment == k)

    def sizes(self):
        """|S_k| for every k"""
        return np.bincount(self.assignment, minlength=self.count)


def _check_dim(model, width):
    if width != model.dim + 1:
        raise DimensionMismatchError(
            f"model expects augmented vectors of length {model.dim + 1}, got {width}"
        )


def augment(sample):
    """
    Append the constant 1 so the bias folds into the weight vector

    Args:
        sample: LabeledSample or raw feature vector

    Returns:
        Array [x 1] of length d+1
    """
    features = sample.features if isinstance(sample, LabeledSample) else np.asarray(sample, dtype=np.float64)
    if not np.all(np.isfinite(features)):
        raise InputError("sample features must be finite")
    return np.append(features, 1.0)


def hyperplane_values(model, X_aug):
    """(N, K) matrix of w̃_k^T x̃_n"""
    X_aug = np.atleast_2d(X_aug)
    _check_dim(model, X_aug.shape[1])
    return X_aug @ model.weights.T


def decision_values(model, X_aug):
    """h for every row of an augmented matrix"""
    return hyperplane_values(model, X_aug).min(axis=1)


def predict(model, X_aug):
    """Labels for every row; sign(0) is +1"""
    return np.where(decision_values(model, X_aug) >= 0, 1, -1)


def decision_value(model, x_aug):
    """h(x) = min_k w̃_k^T x̃"""
    return float(decision_values(model, x_aug)[0])


def classify(model, x_aug):
    """+1 if h(x) >= 0 else -1"""
    return 1 if decision_value(model, x_aug) >= 0 else -1


def active_index(model, x_aug):
    """Smallest k attaining min_j w̃_j^T x̃ (0-based)"""
    # argmin returns the first occurrence, which is the least-k tie-break
    return int(np.argmin(hyperplane_values(model, x_aug)[0]))


def partition(model, data):
    """Partition of the dataset into the sets S_k"""
    values = hyperplane_values(model, data.augmented())
    return Partition(np.argmin(values, axis=1), model.count)


def margins(model, data):
    """y_n h(x_n) for every sample"""
    return data.labels * decision_values(model, data.augmented())


def criterion(model, data):
    """
    Polyceptron criterion: -Σ y_n h(x_n) over samples with y_n h(x_n) < 0

    Returns 0 for an empty dataset.
    """
    if len(data) == 0:
        return 0.0
    m = margins(model, data)
    return float(-m[m < 0].sum())


def criterion_by_partition(model, data, part=None):
    """
    Criterion evaluated set by set as Σ_k f_k, using the frozen partition

    Equal to criterion(model, data) when part is the model's own partition.
    """
    if part is None:
        part = partition(model, data)
    X_aug = data.augmented()
    total = 0.0
    for k in range(model.count):
        idx = part.members(k)
        m = data.labels[idx] * (X_aug[idx] @ model.weights[k])
        total += -m[m < 0].sum()
    return float(total)
