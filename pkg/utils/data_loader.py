"""
Data loading and validation module

DataFile format: CSV, one sample per row, d feature columns followed by a
label column holding -1 or +1, with an optional single header row.
"""

import io

import numpy as np
import pandas as pd

from models.polyhedral import Dataset
from utils.exceptions import ParseError


def _parse_float(text):
    """Correctly rounded float of one field, NaN when the field is not a number"""
    if not isinstance(text, str) or "_" in text:
        return np.nan
    try:
        return float(text)
    except ValueError:
        return np.nan


def load_csv(path, has_header=False):
    """
    Load a labeled dataset from CSV

    Args:
        path: File path or text buffer
        has_header: Whether the first line is a header row

    Returns:
        Dataset
    """
    try:
        raw = pd.read_csv(
            path,
            header=0 if has_header else None,
            dtype=str,
            skip_blank_lines=False,
            keep_default_na=False,
        )
    except pd.errors.EmptyDataError as e:
        raise ParseError("file is empty or not valid CSV") from e
    except pd.errors.ParserError as e:
        # pandas reports ragged rows as "Expected N fields in line L, saw M"
        raise ParseError(f"ragged row: {e}") from e

    if raw.empty:
        raise ParseError("file contains no samples")
    if raw.shape[1] < 2:
        raise ParseError("need at least one feature column and a label column", line=1)

    first_line = 2 if has_header else 1
    stripped = raw.apply(lambda col: col.str.strip())
    values = stripped.map(_parse_float).to_numpy(dtype=np.float64)

    # Short rows come back as NaN, empty fields as ""
    missing = (raw.isna() | (stripped == "")).to_numpy().any(axis=1)
    non_numeric = np.isnan(values).any(axis=1) & ~missing
    non_finite = np.isinf(values).any(axis=1)
    bad_label = ~np.isin(values[:, -1], (-1.0, 1.0)) & ~missing & ~non_numeric

    checks = [
        (missing, f"ragged row or empty field: expected {raw.shape[1]} fields"),
        (non_numeric, "non-numeric field"),
        (non_finite, "non-finite feature value"),
        (bad_label, "label must be -1 or +1"),
    ]
    failures = [(int(np.argmax(mask)), message) for mask, message in checks if mask.any()]
    if failures:
        offset, message = min(failures)
        raise ParseError(message, line=first_line + offset)

    return Dataset(values[:, :-1], values[:, -1].astype(np.int64))


def load_csv_text(text, has_header=False):
    """Parse CSV content held in a string"""
    return load_csv(io.StringIO(text), has_header=has_header)


def dataset_frame(data):
    """DataFrame with columns x1..xd, label"""
    frame = pd.DataFrame(data.features, columns=[f"x{i}" for i in range(1, data.dim + 1)])
    frame["label"] = data.labels
    return frame


def save_csv(data, path, header=False):
    """
    Write a dataset as DataFile CSV with 17 significant digits

    Args:
        data: Dataset
        path: Output path
        header: Emit the x1..xd,label header row
    """
    dataset_frame(data).to_csv(path, index=False, header=header, float_format="%.17g", lineterminator="\n")
