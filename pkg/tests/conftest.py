import pytest

from models.polyhedral import Dataset, PolyhedralModel


@pytest.fixture
def two_plane_model():
    """d=1, K=2: w̃_1 = (1, 0), w̃_2 = (-1, 1)"""
    return PolyhedralModel([[1.0, 0.0], [-1.0, 1.0]])


@pytest.fixture
def separable_pair():
    """1-D pair separable by a single threshold"""
    return Dataset([[-1.0], [1.0]], [-1, 1])


@pytest.fixture
def wedge_data():
    """Four positives in the first quadrant, three negatives left of or below it"""
    features = [
        [0.5, 0.5], [1.0, 0.2], [0.2, 1.0], [1.0, 1.0],
        [-1.0, 0.5], [0.5, -1.0], [-1.0, -1.0],
    ]
    return Dataset(features, [1, 1, 1, 1, -1, -1, -1])


@pytest.fixture
def xor_data():
    return Dataset([[0, 0], [1, 1], [0, 1], [1, 0]], [1, 1, -1, -1])
