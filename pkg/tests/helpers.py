"""Shared builders for randomized tests"""

import numpy as np

from models.polyhedral import Dataset, PolyhedralModel


def random_instance(rng, n=None, dim=None, K=None):
    """Small random (model, data) pair for property checks"""
    n = n or int(rng.integers(1, 7))
    dim = dim or int(rng.integers(1, 3))
    K = K or int(rng.integers(1, 4))
    model = PolyhedralModel(rng.normal(size=(K, dim + 1)))
    data = Dataset(rng.uniform(-2, 2, size=(n, dim)), rng.choice([-1, 1], size=n))
    return model, data


def planted_linear(rng, n, dim, margin):
    """n points labeled by a random hyperplane, none closer than margin to it"""
    w = rng.normal(size=dim)
    w /= np.linalg.norm(w)
    b = rng.uniform(-0.3, 0.3)
    points = []
    while len(points) < n:
        x = rng.uniform(-1, 1, size=dim)
        if abs(x @ w + b) >= margin:
            points.append(x)
    points = np.array(points)
    return Dataset(points, np.where(points @ w + b >= 0, 1, -1))
