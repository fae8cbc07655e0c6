"""
Seeded generators for polyhedrally separable benchmark data

All sampling goes through numpy's PCG64 generator, so a (arguments, seed)
pair always yields the same dataset on every platform.
"""

import logging
from dataclasses import dataclass

import numpy as np

from models.polyhedral import Dataset
from utils.exceptions import GenerationError, InputError
from utils.helpers import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HalfspaceSet:
    """
    Polyhedron {x : coefficients[j]·x + offsets[j] >= 0 for all j}

    Args:
        coefficients: (K, d) matrix
        offsets: (K,) vector
    """

    coefficients: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=np.float64, ndmin=2)
        offsets = np.array(self.offsets, dtype=np.float64).reshape(-1)
        if coefficients.shape[0] < 1 or coefficients.shape[0] != offsets.shape[0]:
            raise InputError(
                f"need at least one halfspace and one offset per row, got {coefficients.shape} and {offsets.shape}"
            )
        if not (np.all(np.isfinite(coefficients)) and np.all(np.isfinite(offsets))):
            raise InputError("halfspace coefficients must be finite")
        coefficients.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "offsets", offsets)

    @property
    def dim(self):
        return self.coefficients.shape[1]

    @property
    def count(self):
        return self.coefficients.shape[0]

    def slack(self, points):
        """min_j (w_j·x + b_j) for every point"""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if points.shape[1] != self.dim:
            raise InputError(f"points have {points.shape[1]} features, halfspaces expect {self.dim}")
        return (points @ self.coefficients.T + self.offsets).min(axis=1)


# 10-dimensional benchmark polyhedron: three halfspaces
DATASET1_HALFSPACES = HalfspaceSet(
    coefficients=[
        [1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
        [1, -1, 1, -1, 1, -1, 1, -1, 1, -1],
        [1, 0, 1, 0, 1, 0, 1, 0, 1, 0],
    ],
    offsets=[1, 1, 0.5],
)

# 20-dimensional benchmark polyhedron: four halfspaces
DATASET2_HALFSPACES = HalfspaceSet(
    coefficients=[
        [1, 2, 3, 4, 5, 6, 7, 8, 8, 8, 20, 8, 7, 6, 5, 4, 3, 2, 1, 1],
        [-1, 2, -3, 4, -5, 6, -7, 8, -9, 15, -11, 10, -9, 8, -7, 6, -5, 4, -3, 2],
        [1, 0, 1, 0, 1, 0, 1, 2, 0, 8, 0, 2, 3, 0, 3, 3, 0, 4, 0, 4],
        [1, -1, 0, 0, 2, -2, 0, 0, 6, -3, 0, 0, 4, -4, 0, 0, 5, -5, 0, 0],
    ],
    offsets=[20, 15, 8, 6],
)

MAX_ATTEMPTS_PER_POINT = 100


def label_by_polyhedron(halfspaces, points):
    """
    Label points +1 inside the polyhedron (all inequalities hold), else -1

    Args:
        halfspaces: HalfspaceSet
        points: (N, d) array

    Returns:
        Dataset
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    labels = np.where(halfspaces.slack(points) >= 0, 1, -1)
    return Dataset(points, labels)


def _uniform_cube(rng, n, dim):
    return rng.uniform(-1.0, 1.0, size=(n, dim))


def gen_dataset1(n=1000, seed=0):
    """Uniform points in [-1, 1]^10 labeled by the three-halfspace polyhedron"""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    rng = make_rng(seed)
    return label_by_polyhedron(DATASET1_HALFSPACES, _uniform_cube(rng, n, DATASET1_HALFSPACES.dim))


def gen_dataset2(n=1000, seed=0):
    """Uniform points in [-1, 1]^20 labeled by the four-halfspace polyhedron"""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    rng = make_rng(seed)
    return label_by_polyhedron(DATASET2_HALFSPACES, _uniform_cube(rng, n, DATASET2_HALFSPACES.dim))


def random_halfspaces(dim, K, rng):
    """
    K random halfspaces sharing an interior point

    The interior point c is uniform in [-0.5, 0.5]^d; normals are unit
    vectors and every offset leaves c at a slack between 0.2 and 1.
    """
    center = rng.uniform(-0.5, 0.5, size=dim)
    normals = rng.standard_normal(size=(K, dim))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    slack = rng.uniform(0.2, 1.0, size=K)
    return HalfspaceSet(normals, slack - normals @ center)


def gen_random_polyhedron(dim, K, n, margin=0.0, seed=0):
    """
    Random polyhedron plus uniform samples labeled by it

    Points closer than `margin` to the boundary (|min_j slack| < margin) are
    discarded and redrawn.

    Args:
        dim: Feature dimension d
        K: Number of halfspaces
        n: Number of samples
        margin: Non-negative exclusion band around the boundary
        seed: RNG seed

    Returns:
        Tuple of (HalfspaceSet, Dataset)
    """
    if dim < 1 or K < 1 or n < 1:
        raise InputError(f"dim, K and n must be >= 1, got {dim}, {K}, {n}")
    if margin < 0:
        raise InputError(f"margin must be non-negative, got {margin}")

    rng = make_rng(seed)
    halfspaces = random_halfspaces(dim, K, rng)

    accepted = []
    kept = 0
    drawn = 0
    limit = MAX_ATTEMPTS_PER_POINT * n

    while kept < n:
        if drawn >= limit:
            raise GenerationError(
                f"only {kept} of {n} points cleared margin {margin} after {drawn} draws"
            )
        batch = _uniform_cube(rng, min(n, limit - drawn), dim)
        drawn += batch.shape[0]
        if margin > 0:
            batch = batch[np.abs(halfspaces.slack(batch)) >= margin]
        accepted.append(batch)
        kept += batch.shape[0]

    points = np.vstack(accepted)[:n]
    logger.debug("random polyhedron: %d points kept from %d draws", n, drawn)
    return halfspaces, label_by_polyhedron(halfspaces, points)
