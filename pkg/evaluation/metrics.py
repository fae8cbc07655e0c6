"""
Classification metrics
"""

from sklearn.metrics import accuracy_score

from models.polyhedral import predict
from utils.exceptions import InputError


def accuracy(model, data):
    """
    Fraction of samples whose predicted label matches the true label

    Args:
        model: PolyhedralModel
        data: Non-empty Dataset

    Returns:
        Float in [0, 1]
    """
    if len(data) == 0:
        raise InputError("accuracy is undefined on an empty dataset")
    return float(accuracy_score(data.labels, predict(model, data.augmented())))
