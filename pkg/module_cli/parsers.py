"""
parsers.py
Text formats read by the command line.

Instance file: line oriented, `#` comments and blank lines ignored. The first
line holds `b g B- B+` (gas limit, gas price, min and max transaction gas),
then one `q_tilde gas` pair per line in arrival order.

Config file: flat `key = value` lines with the ExperimentConfig keys plus the
output keys `out`, `plot_dir` and `summary_xlsx`. `distribution` may list
several distributions separated by `;`.
"""
import logging
import os
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

from config import GENERATED_DIR, default_exact_limit
from module_block_building.errors import ConfigError, InputFormatError, InstanceError
from module_block_building.model import BlockParams, Transaction
from module_experiment.dists import parse_distribution
from module_experiment.experiment import ExperimentConfig

logger = logging.getLogger(__name__)

EXPERIMENT_KEYS = ('distribution', 'n_transactions', 'gas_lo', 'gas_hi', 'gas_price', 'block_sizes',
                   'trials_per_size', 'master_seed', 'exact_solver_limit', 'fixed_mempool')
OUTPUT_KEYS = ('out', 'plot_dir', 'summary_xlsx')
DEFAULT_CSV_NAME = 'sweep.csv'


def _content_lines(path):
    """Yield (line_no, stripped text) for lines that are not blank or comments."""
    with open(path, 'r', encoding='utf-8') as f:
        for line_no, raw in enumerate(f, start=1):
            text = raw.split('#', 1)[0].strip()
            if text:
                yield line_no, text


def _numbers(path, line_no, text, expected):
    parts = text.split()
    if len(parts) != expected:
        raise InputFormatError(path, line_no, f"expected {expected} numbers, got {len(parts)}: {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise InputFormatError(path, line_no, f"not a number in {text!r}") from None


def parse_instance_file(path) -> Tuple[List[Transaction], BlockParams]:
    lines = list(_content_lines(path))
    if not lines:
        raise InputFormatError(path, None, "missing header line `b g B- B+`")

    header_no, header = lines[0]
    b, g, lo, hi = _numbers(path, header_no, header, 4)
    try:
        params = BlockParams(gas_limit=b, gas_price=g, min_tx_gas=lo, max_tx_gas=hi)
    except InstanceError as e:
        raise InputFormatError(path, header_no, str(e)) from None

    txs = []
    for line_no, text in lines[1:]:
        q_tilde, gas = _numbers(path, line_no, text, 2)
        try:
            tx = Transaction(gross_utility=q_tilde, gas=gas)
        except InstanceError as e:
            raise InputFormatError(path, line_no, str(e)) from None
        if not (lo <= gas <= hi):
            raise InputFormatError(path, line_no, f"gas {gas:g} outside [B-, B+] = [{lo:g}, {hi:g}]")
        txs.append(tx)
    return txs, params


@dataclass(frozen=True)
class CliConfig:
    """File-backed sweep configuration: one ExperimentConfig per distribution plus output paths."""
    experiments: Tuple[ExperimentConfig, ...]
    out: str
    plot_dir: Optional[str] = None
    summary_xlsx: Optional[str] = None


def _parse_bool(path, line_no, value):
    lowered = value.lower()
    if lowered in ('true', 'yes', '1', 'on'):
        return True
    if lowered in ('false', 'no', '0', 'off'):
        return False
    raise InputFormatError(path, line_no, f"expected true/false, got {value!r}")


def _parse_int(path, line_no, key, value):
    try:
        return int(value, 0)
    except ValueError:
        raise InputFormatError(path, line_no, f"{key} must be an integer, got {value!r}") from None


def _parse_float(path, line_no, key, value):
    try:
        return float(value)
    except ValueError:
        raise InputFormatError(path, line_no, f"{key} must be a number, got {value!r}") from None


def _read_key_values(path):
    entries = {}
    for line_no, text in _content_lines(path):
        if '=' not in text:
            raise InputFormatError(path, line_no, f"expected `key = value`, got {text!r}")
        key, value = (part.strip() for part in text.split('=', 1))
        if key not in EXPERIMENT_KEYS and key not in OUTPUT_KEYS:
            raise InputFormatError(path, line_no, f"unknown key {key!r}")
        if key in entries:
            raise InputFormatError(path, line_no, f"duplicate key {key!r} (first set on line {entries[key][0]})")
        entries[key] = (line_no, value)
    return entries


def load_cli_config(path, seed=None, out=None) -> CliConfig:
    """
    Parse and validate a sweep config. `seed` and `out` override the file.
    Every ExperimentConfig is validated before this returns.
    """
    entries = _read_key_values(path)
    if 'distribution' not in entries:
        raise InputFormatError(path, None, "missing required key 'distribution'")

    kwargs = {}
    for key, (line_no, value) in entries.items():
        if key in ('n_transactions', 'trials_per_size', 'master_seed', 'exact_solver_limit'):
            kwargs[key] = _parse_int(path, line_no, key, value)
        elif key in ('gas_lo', 'gas_hi', 'gas_price'):
            kwargs[key] = _parse_float(path, line_no, key, value)
        elif key == 'block_sizes':
            items = [item.strip() for item in value.split(',') if item.strip()]
            kwargs[key] = tuple(_parse_float(path, line_no, key, item) for item in items)
        elif key == 'fixed_mempool':
            kwargs[key] = _parse_bool(path, line_no, value)
    if 'exact_solver_limit' not in kwargs:
        kwargs['exact_solver_limit'] = default_exact_limit()
    if seed is not None:
        kwargs['master_seed'] = seed

    dist_line, dist_value = entries['distribution']
    try:
        distributions = [parse_distribution(item) for item in dist_value.split(';') if item.strip()]
    except ConfigError as e:
        raise InputFormatError(path, dist_line, str(e)) from None
    if not distributions:
        raise InputFormatError(path, dist_line, "no distribution given")

    try:
        base = ExperimentConfig(distribution=distributions[0], **kwargs)
        experiments = tuple(replace(base, distribution=d) for d in distributions)
    except ConfigError as e:
        raise InputFormatError(path, None, str(e)) from None

    outputs = {key: entries[key][1] for key in OUTPUT_KEYS if key in entries}
    cli_config = CliConfig(
        experiments=experiments,
        out=out or outputs.get('out') or os.path.join(GENERATED_DIR, DEFAULT_CSV_NAME),
        plot_dir=outputs.get('plot_dir'),
        summary_xlsx=outputs.get('summary_xlsx'),
    )
    logger.debug(f"Loaded config {path}: {len(experiments)} distribution(s), seed={base.master_seed}")
    return cli_config
