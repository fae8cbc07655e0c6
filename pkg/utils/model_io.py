"""
ModelFile reading and writing

Layout: one header line `# polyhedral-model version=1 dim=<d> count=<K>`
followed by K rows of d+1 values (w_1 ... w_d b) at 17 significant digits.
"""

import re

import numpy as np

from models.polyhedral import PolyhedralModel
from utils.exceptions import ParseError

FORMAT_VERSION = 1
HEADER_RE = re.compile(r"^#\s*polyhedral-model\s+version=(\d+)\s+dim=(\d+)\s+count=(\d+)\s*$")


def save_model(model, path):
    """Write a PolyhedralModel as a ModelFile"""
    header = f"polyhedral-model version={FORMAT_VERSION} dim={model.dim} count={model.count}"
    np.savetxt(path, model.weights, fmt="%.17g", header=header, comments="# ")


def _read_header(path):
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline()
    match = HEADER_RE.match(first.strip())
    if match is None:
        raise ParseError("missing or malformed polyhedral-model header", line=1)
    version, dim, count = (int(g) for g in match.groups())
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported model format version {version}", line=1)
    if count < 1:
        raise ParseError("model must contain at least one hyperplane", line=1)
    return dim, count


def load_model(path):
    """
    Read a ModelFile, rejecting version and shape mismatches

    Returns:
        PolyhedralModel
    """
    dim, count = _read_header(path)
    try:
        weights = np.loadtxt(path, comments="#", ndmin=2, dtype=np.float64)
    except ValueError as e:
        raise ParseError(f"malformed weight rows: {e}") from e

    if weights.shape[0] != count:
        raise ParseError(f"header declares {count} hyperplanes, file has {weights.shape[0]}")
    if weights.shape[1] != dim + 1:
        raise ParseError(f"header declares dim={dim}, rows have {weights.shape[1]} values")
    if not np.all(np.isfinite(weights)):
        raise ParseError("weights must be finite")
    return PolyhedralModel(weights)
