"""
experiment.py
Monte Carlo harness comparing greedy, relaxation, exact and FIFO packings over
random mempools.

Each trial draws n utilities from the configured distribution and n gas sizes
uniform on [gas_lo, gas_hi], applies a uniform random arrival order and packs
the block every way. A trial's random stream is keyed by
(master_seed, distribution, block size index, trial), so a sweep is a pure
function of its config regardless of how many worker threads run it.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Optional, Sequence, Tuple

import pandas as pd

from module_block_building.bounds import compute_gap_bounds
from module_block_building.errors import ConfigError, SandwichViolation
from module_block_building.model import BlockParams, Transaction, build_instance
from module_block_building.packing import (DEFAULT_EXACT_LIMIT, exact_pack, fifo_pack, greedy_pack,
                                           permute, solve_relaxation)

from .dists import UtilityDistribution, sample_gas
from .utils.seeding import FIXED_MEMPOOL_PART, derive_sub_seed, make_rng

logger = logging.getLogger(__name__)

REFERENCE_BLOCK_SIZES = (20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0)
SANDWICH_REL_TOL = 1e-9

# Columns summarized per (distribution, block size) by aggregate()
SUMMARY_METRICS = ('ratio_lb', 'ratio_ub', 'bound_ratio', 'gap_lower', 'gap_realized')


@dataclass(frozen=True)
class ExperimentConfig:
    distribution: UtilityDistribution
    n_transactions: int = 1000
    gas_lo: float = 1.0
    gas_hi: float = 3.0
    gas_price: float = 0.0
    block_sizes: Tuple[float, ...] = REFERENCE_BLOCK_SIZES
    trials_per_size: int = 100
    master_seed: int = 0
    exact_solver_limit: int = DEFAULT_EXACT_LIMIT
    fixed_mempool: bool = False

    def __post_init__(self):
        if not isinstance(self.distribution, UtilityDistribution):
            raise ConfigError(f"distribution must be a UtilityDistribution, got {self.distribution!r}")
        if self.distribution.support_lower < 0:
            raise ConfigError(f"{self.distribution.name} can draw negative utilities "
                              f"(support starts at {self.distribution.support_lower:g}); utilities must be >= 0")
        sizes = tuple(float(s) for s in self.block_sizes)
        object.__setattr__(self, 'block_sizes', sizes)
        if self.n_transactions < 1:
            raise ConfigError(f"n_transactions must be >= 1, got {self.n_transactions}")
        if self.trials_per_size < 1:
            raise ConfigError(f"trials_per_size must be >= 1, got {self.trials_per_size}")
        if not sizes:
            raise ConfigError("block_sizes must not be empty")
        if any(not (math.isfinite(s) and s > 0) for s in sizes):
            raise ConfigError(f"block sizes must be positive, got {list(sizes)}")
        if len(set(sizes)) != len(sizes):
            raise ConfigError(f"block sizes must be distinct, got {list(sizes)}")
        if not (0 < self.gas_lo <= self.gas_hi) or not math.isfinite(self.gas_hi):
            raise ConfigError(f"gas range must satisfy 0 < gas_lo <= gas_hi, got [{self.gas_lo}, {self.gas_hi}]")
        if not (math.isfinite(self.gas_price) and self.gas_price >= 0):
            raise ConfigError(f"gas_price must be nonnegative, got {self.gas_price}")
        if self.exact_solver_limit < 0:
            raise ConfigError(f"exact_solver_limit must be >= 0, got {self.exact_solver_limit}")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")


@dataclass(frozen=True)
class TrialRecord:
    distribution: str
    block_size: float
    trial: int
    sub_seed: int
    n: int
    p0: float
    r_star: float
    p_fifo: float
    p_star: Optional[float]
    k_bar: int
    m: float
    gap_lower: float
    ratio_lb: Optional[float]
    ratio_ub: Optional[float]
    bound_ratio: Optional[float]
    condition_holds: bool


CSV_COLUMNS = tuple(f.name for f in fields(TrialRecord))


def _leq(x, y):
    return x <= y or math.isclose(x, y, rel_tol=SANDWICH_REL_TOL, abs_tol=1e-12)


def check_sandwich(record: TrialRecord):
    """Raise SandwichViolation unless p0 <= r_star, p_fifo <= r_star and, when known, p0 <= p_star <= r_star, p_fifo <= p_star."""
    pairs = [('p0', 'r_star'), ('p_fifo', 'r_star')]
    if record.p_star is not None:
        pairs += [('p0', 'p_star'), ('p_star', 'r_star'), ('p_fifo', 'p_star')]
    for low, high in pairs:
        if not _leq(getattr(record, low), getattr(record, high)):
            raise SandwichViolation(
                f"{record.distribution} block_size={record.block_size:g} trial={record.trial}: "
                f"{low}={getattr(record, low)!r} > {high}={getattr(record, high)!r}")


def _size_index(cfg, block_size):
    try:
        return cfg.block_sizes.index(float(block_size))
    except ValueError:
        raise ConfigError(f"block size {block_size} is not part of the configured sweep "
                          f"{list(cfg.block_sizes)}") from None


def build_trial_instance(cfg: ExperimentConfig, block_size: float, trial: int):
    """(sub_seed, arrival-ordered instance) of one trial."""
    size_index = _size_index(cfg, block_size)
    dist = cfg.distribution
    sub_seed = derive_sub_seed(cfg.master_seed, dist.kind_index, size_index, trial)
    rng = make_rng(sub_seed)
    if cfg.fixed_mempool:
        pool_rng = make_rng(derive_sub_seed(cfg.master_seed, dist.kind_index, FIXED_MEMPOOL_PART, 0))
    else:
        pool_rng = rng

    utilities = dist.sample(cfg.n_transactions, pool_rng)
    gas = sample_gas(cfg.gas_lo, cfg.gas_hi, cfg.n_transactions, pool_rng)
    params = BlockParams(float(block_size), cfg.gas_price, cfg.gas_lo, cfg.gas_hi)
    mempool = build_instance([Transaction(float(u), float(g)) for u, g in zip(utilities, gas)], params)
    return sub_seed, permute(mempool, rng)


def run_trial(cfg: ExperimentConfig, block_size: float, trial: int) -> TrialRecord:
    dist = cfg.distribution
    sub_seed, inst = build_trial_instance(cfg, block_size, trial)

    relaxation = solve_relaxation(inst)
    greedy, certificate = greedy_pack(inst, relaxation)
    fifo = fifo_pack(inst)
    p_star = exact_pack(inst, cfg.exact_solver_limit).objective if inst.n <= cfg.exact_solver_limit else None

    if inst.n:
        bounds = compute_gap_bounds(inst, greedy)
        gap_lower, bound_ratio, condition = bounds.gap_lower, bounds.ratio_bound, bounds.condition_holds
    else:
        gap_lower, bound_ratio, condition = 0.0, None, False

    p0, r_star, p_fifo = greedy.objective, relaxation.objective, fifo.objective
    record = TrialRecord(
        distribution=dist.name,
        block_size=float(block_size),
        trial=int(trial),
        sub_seed=sub_seed,
        n=inst.n,
        p0=p0,
        r_star=r_star,
        p_fifo=p_fifo,
        p_star=p_star,
        k_bar=greedy.count,
        m=certificate.m,
        gap_lower=gap_lower,
        ratio_lb=p0 / p_fifo if p_fifo > 0 else None,
        ratio_ub=r_star / p_fifo if p_fifo > 0 else None,
        bound_ratio=bound_ratio,
        condition_holds=bool(condition),
    )
    check_sandwich(record)
    return record


def run_sweep(cfg: ExperimentConfig, threads: int = 1):
    """
    Every (block size, trial) pair, ordered by block size then trial.
    Trials may run on a thread pool; output order does not depend on it.
    """
    tasks = [(size, trial)
             for size in sorted(cfg.block_sizes)
             for trial in range(cfg.trials_per_size)]
    logger.info(f"Sweep {cfg.distribution.name}: {len(cfg.block_sizes)} block sizes x "
                f"{cfg.trials_per_size} trials, n={cfg.n_transactions}, threads={threads}")

    if threads <= 1:
        records = [run_trial(cfg, size, trial) for size, trial in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda task: run_trial(cfg, *task), tasks))

    logger.info(f"Sweep {cfg.distribution.name}: {len(records)} records")
    return records


def records_to_frame(records: Sequence[TrialRecord]) -> pd.DataFrame:
    frame = pd.DataFrame([asdict(r) for r in records], columns=list(CSV_COLUMNS))
    for col in ('p_star', 'ratio_lb', 'ratio_ub', 'bound_ratio', 'm'):
        frame[col] = frame[col].astype('float64')
    return frame


def summarize_frame(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Per (distribution, block size): trial count, count of undefined ratios
    (p_fifo = 0), and mean / sample standard deviation of SUMMARY_METRICS.
    Undefined values are left out of the means.
    """
    if frame.empty:
        raise ConfigError("cannot aggregate an empty set of trial records")
    frame = frame.assign(gap_realized=frame['p0'] - frame['p_fifo'])
    grouped = frame.groupby(['distribution', 'block_size'], sort=False)

    summary = pd.DataFrame({
        'trials': grouped.size(),
        'undefined_ratios': grouped['p_fifo'].agg(lambda s: int((s == 0).sum())),
        'condition_rate': grouped['condition_holds'].mean(),
    })
    for col in SUMMARY_METRICS:
        summary[f'{col}_mean'] = grouped[col].mean()
        std = grouped[col].std(ddof=1)
        summary[f'{col}_std'] = std.mask(grouped[col].count() == 1, 0.0)

    undefined = summary['undefined_ratios']
    if undefined.any():
        logger.warning(f"{int(undefined.sum())} trial(s) had p_fifo = 0; their ratios are excluded from means")
    return summary.reset_index().sort_values(['distribution', 'block_size'], kind='stable',
                                             key=_first_seen_key(frame)).reset_index(drop=True)


def _first_seen_key(frame):
    order = {name: i for i, name in enumerate(pd.unique(frame['distribution']))}

    def key(col):
        return col.map(order) if col.name == 'distribution' else col
    return key


def aggregate(records: Sequence[TrialRecord]) -> pd.DataFrame:
    if not records:
        raise ConfigError("cannot aggregate an empty set of trial records")
    return summarize_frame(records_to_frame(records))
