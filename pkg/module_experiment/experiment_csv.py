# module_experiment/experiment_csv.py

import logging
import os

import pandas as pd

from module_block_building.errors import InputFormatError

from .experiment import CSV_COLUMNS, records_to_frame

logger = logging.getLogger(__name__)

# 17 significant digits round-trips every float64
FLOAT_FORMAT = '%.17g'

NUMERIC_COLUMNS = tuple(col for col in CSV_COLUMNS if col not in ('distribution', 'condition_holds'))


def format_records_csv(records) -> str:
    """CSV text for trial records: UTF-8, header row, empty fields for missing values."""
    frame = records_to_frame(records)
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep='', lineterminator='\n')


def write_records_csv(records, path):
    """Write the records; OSError propagates so the caller can report an unwritable path."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    text = format_records_csv(records)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    logger.info(f"CSV written: {path} ({len(records)} rows)")
    return path


def read_records_csv(path) -> pd.DataFrame:
    """
    Load an experiment CSV keyed by header names (column order is free).
    Raises InputFormatError when columns are missing, a numeric column holds
    text, or there are no rows.
    """
    try:
        frame = pd.read_csv(path, encoding='utf-8')
    except pd.errors.EmptyDataError:
        raise InputFormatError(path, None, "file is empty (expected a header row)") from None
    except pd.errors.ParserError as e:
        raise InputFormatError(path, None, f"not a valid CSV file: {e}") from None

    missing = [col for col in CSV_COLUMNS if col not in frame.columns]
    if missing:
        raise InputFormatError(path, 1, f"missing column(s): {', '.join(missing)}")
    if frame.empty:
        raise InputFormatError(path, None, "no trial rows after the header")

    frame = frame[list(CSV_COLUMNS)].copy()
    for col in NUMERIC_COLUMNS:
        try:
            frame[col] = pd.to_numeric(frame[col], errors='raise')
        except (ValueError, TypeError) as e:
            raise InputFormatError(path, None, f"column {col!r} must be numeric: {e}") from None
    if frame['condition_holds'].dtype != bool:
        frame = frame.assign(condition_holds=frame['condition_holds'].astype(str).str.lower() == 'true')
    return frame
