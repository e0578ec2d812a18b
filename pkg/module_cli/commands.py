# module_cli/commands.py

import json
import logging
import math
import os
import sys

from config import default_exact_limit, default_threads
from module_block_building.bounds import compute_gap_bounds
from module_block_building.errors import ConfigError, InstanceError
from module_block_building.model import build_instance
from module_block_building.packing import DEFAULT_EXACT_LIMIT, exact_pack, fifo_pack, greedy_pack, solve_relaxation
from module_experiment.dists import REFERENCE_DISTRIBUTIONS, parse_distribution
from module_experiment.experiment import aggregate, records_to_frame, run_sweep
from module_experiment.experiment_csv import read_records_csv, write_records_csv
from module_experiment.experiment_excel import write_summary_workbook
from module_experiment.experiment_plots import plot_distribution_densities, plot_sweep

from .parsers import load_cli_config, parse_instance_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IO = 3


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    return code


def _finite_or_str(value):
    if isinstance(value, float) and not math.isfinite(value):
        return 'inf' if value > 0 else '-inf'
    return value


def _vector(values):
    return [_finite_or_str(float(v)) for v in values]


def build_pack_report(inst, exact_limit=DEFAULT_EXACT_LIMIT):
    """Every packing of one instance as a plain dict (the JSON form of `pack`)."""
    relaxation = solve_relaxation(inst)
    greedy, certificate = greedy_pack(inst, relaxation)
    fifo = fifo_pack(inst)
    exact = exact_pack(inst, exact_limit) if inst.n <= exact_limit else None
    params = inst.params

    report = {
        'n': inst.n,
        'gas_limit': params.gas_limit,
        'gas_price': params.gas_price,
        'min_tx_gas': params.min_tx_gas,
        'max_tx_gas': params.max_tx_gas,
        'p0': greedy.objective,
        'r_star': relaxation.objective,
        'p_fifo': fifo.objective,
        'p_star': exact.objective if exact is not None else None,
        'certificate': {
            'm': _finite_or_str(certificate.m),
            'upper_bound': _finite_or_str(certificate.upper_bound),
            'applies': certificate.applies,
        },
        'relaxation': {
            'x': _vector(relaxation.x),
            'fractional_index': relaxation.fractional_index,
            'fractional_value': relaxation.fractional_value,
        },
        'included': {
            'greedy': [int(v) for v in greedy.included],
            'fifo': [int(v) for v in fifo.included],
            'exact': [int(v) for v in exact.included] if exact is not None else None,
        },
        'gap_bounds': None,
    }
    if inst.n:
        bounds = compute_gap_bounds(inst, greedy)
        report['gap_bounds'] = {
            'k_bar': bounds.k_bar,
            'q_plus': bounds.q_plus,
            'q_minus': bounds.q_minus,
            'eta': bounds.eta,
            'realized_eta': bounds.realized_eta,
            'L': bounds.L,
            'L_worst': bounds.L_worst,
            'U': bounds.U,
            'gap_lower': bounds.gap_lower,
            'condition_holds': bounds.condition_holds,
            'ratio_bound': bounds.ratio_bound,
        }
    return report


def _fmt(value):
    if value is None:
        return 'n/a'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def format_pack_report(report):
    lines = [
        f"instance    n={report['n']}  b={_fmt(report['gas_limit'])}  g={_fmt(report['gas_price'])}  "
        f"B-={_fmt(report['min_tx_gas'])}  B+={_fmt(report['max_tx_gas'])}",
        f"p0          = {_fmt(report['p0'])}",
        f"r*          = {_fmt(report['r_star'])}",
        f"p_fifo      = {_fmt(report['p_fifo'])}",
        f"p*          = {_fmt(report['p_star'])}",
    ]
    cert = report['certificate']
    if cert['applies']:
        lines.append(f"certificate m={cert['m']}  p* <= {_fmt(cert['upper_bound'])}")
    else:
        lines.append(f"certificate m={cert['m']}  not applicable (m < 2), p* <= r*")

    gap = report['gap_bounds']
    if gap is None:
        lines.append("gap bounds  n/a (empty instance)")
    else:
        lines.append(f"gap bounds  k_bar={gap['k_bar']}  q+={_fmt(gap['q_plus'])}  q-={_fmt(gap['q_minus'])}  "
                     f"eta={_fmt(gap['eta'])}")
        lines.append(f"            L={_fmt(gap['L'])}  U={_fmt(gap['U'])}  L-U={_fmt(gap['gap_lower'])}  "
                     f"condition={_fmt(gap['condition_holds'])}  ratio_bound={_fmt(gap['ratio_bound'])}")

    included = report['included']
    for label in ('greedy', 'fifo', 'exact'):
        vector = included[label]
        lines.append(f"x {label:<9} " + ('n/a' if vector is None else ' '.join(str(v) for v in vector)))
    lines.append("x relaxed   " + ' '.join(_fmt(v) for v in report['relaxation']['x']))
    return '\n'.join(lines)


def cmd_pack(instance_path, as_json=False, exact_limit=None, stream=None):
    """Pack one instance file every way and print the report."""
    stream = stream or sys.stdout
    try:
        if exact_limit is None:
            exact_limit = default_exact_limit()
        txs, params = parse_instance_file(instance_path)
        inst = build_instance(txs, params)
    except (ConfigError, InstanceError) as e:
        return _fail(EXIT_INPUT, str(e))
    except OSError as e:
        return _fail(EXIT_IO, f"cannot read {instance_path}: {e}")

    report = build_pack_report(inst, exact_limit)
    if as_json:
        print(json.dumps(report, indent=2), file=stream)
    else:
        print(format_pack_report(report), file=stream)
    return EXIT_OK


def _ensure_writable(path):
    directory = os.path.dirname(os.path.abspath(path)) or '.'
    os.makedirs(directory, exist_ok=True)
    target = path if os.path.exists(path) else directory
    if not os.access(target, os.W_OK):
        raise PermissionError(f"{target} is not writable")


def cmd_sweep(config_path, seed=None, out=None, threads=None, xlsx=None, plot_dir=None, stream=None):
    """Run the configured sweep, write the CSV and print one summary line per block size."""
    stream = stream or sys.stdout
    try:
        if threads is None:
            threads = default_threads()
        cli_config = load_cli_config(config_path, seed=seed, out=out)
    except ConfigError as e:
        return _fail(EXIT_INPUT, str(e))
    except OSError as e:
        return _fail(EXIT_IO, f"cannot read {config_path}: {e}")
    if threads < 1:
        return _fail(EXIT_INPUT, f"--threads must be >= 1, got {threads}")

    xlsx = xlsx or cli_config.summary_xlsx
    plot_dir = plot_dir or cli_config.plot_dir
    try:
        for path in (cli_config.out, xlsx):
            if path:
                _ensure_writable(path)
    except OSError as e:
        return _fail(EXIT_IO, f"output path is not writable: {e}")

    records = []
    for cfg in cli_config.experiments:
        records.extend(run_sweep(cfg, threads=threads))
    summary = aggregate(records)

    try:
        write_records_csv(records, cli_config.out)
        if xlsx:
            write_summary_workbook(summary, xlsx)
        if plot_dir:
            plot_sweep(records_to_frame(records), plot_dir)
    except OSError as e:
        return _fail(EXIT_IO, f"could not write output: {e}")

    for _, row in summary.iterrows():
        print(f"{row['distribution']:<16} b={row['block_size']:<7g} trials={row['trials']:<4d} "
              f"p0/p_fifo={_fmt(row['ratio_lb_mean'])}  r*/p_fifo={_fmt(row['ratio_ub_mean'])}  "
              f"bound={_fmt(row['bound_ratio_mean'])}  L-U={_fmt(row['gap_lower_mean'])}  "
              f"undefined={row['undefined_ratios']}", file=stream)
    return EXIT_OK


def cmd_plot(csv_path, out_dir, dists=False, stream=None):
    """One SVG pair per distribution found in a sweep CSV; optionally the density figure."""
    stream = stream or sys.stdout
    try:
        frame = read_records_csv(csv_path)
    except ConfigError as e:
        return _fail(EXIT_INPUT, str(e))
    except OSError as e:
        return _fail(EXIT_IO, f"cannot read {csv_path}: {e}")

    try:
        paths = plot_sweep(frame, out_dir)
        if dists:
            present = []
            for name in frame['distribution'].unique():
                try:
                    present.append(parse_distribution(name))
                except ConfigError:
                    logger.warning(f"Skipping density of unrecognised distribution {name!r}")
            paths.append(plot_distribution_densities(present or REFERENCE_DISTRIBUTIONS, out_dir))
    except OSError as e:
        return _fail(EXIT_IO, f"could not write figures: {e}")

    for path in paths:
        print(path, file=stream)
    return EXIT_OK
