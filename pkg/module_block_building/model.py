"""
model.py
Domain types for the block building problem: transactions, block parameters,
problem instances (net utilities q = q_tilde - g*a in arrival order) and packings.

All types are frozen; numpy arrays held by them are marked read-only so an
instance can be shared across worker threads.
"""
import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InstanceError

logger = logging.getLogger(__name__)


def _frozen_array(values, dtype=np.float64):
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Transaction:
    """One mempool entry: gross utility (numeraire units) and gas consumption."""
    gross_utility: float
    gas: float

    def __post_init__(self):
        if not math.isfinite(self.gas) or self.gas <= 0:
            raise InstanceError(f"transaction gas must be positive and finite, got {self.gas}")
        if not math.isfinite(self.gross_utility) or self.gross_utility < 0:
            raise InstanceError(f"gross utility must be nonnegative and finite, got {self.gross_utility}")


@dataclass(frozen=True)
class BlockParams:
    gas_limit: float
    gas_price: float
    min_tx_gas: float
    max_tx_gas: float

    def __post_init__(self):
        if not math.isfinite(self.gas_limit) or self.gas_limit <= 0:
            raise InstanceError(f"gas_limit must be positive, got {self.gas_limit}")
        if not math.isfinite(self.gas_price) or self.gas_price < 0:
            raise InstanceError(f"gas_price must be nonnegative, got {self.gas_price}")
        if not (0 < self.min_tx_gas <= self.max_tx_gas) or not math.isfinite(self.max_tx_gas):
            raise InstanceError(f"size bounds must satisfy 0 < B- <= B+, got "
                                f"B-={self.min_tx_gas}, B+={self.max_tx_gas}")

    @property
    def eta(self):
        """Ratio B+/B- of the largest to the smallest permissible transaction."""
        return self.max_tx_gas / self.min_tx_gas


@dataclass(frozen=True)
class ProblemInstance:
    """
    One block building problem. Index order is arrival order (index 0 arrived first).
    """
    net_utilities: np.ndarray
    gas: np.ndarray
    params: BlockParams

    def __post_init__(self):
        q = _frozen_array(self.net_utilities)
        a = _frozen_array(self.gas)
        object.__setattr__(self, 'net_utilities', q)
        object.__setattr__(self, 'gas', a)

        if q.shape != a.shape:
            raise InstanceError(f"net_utilities and gas differ in length ({q.size} vs {a.size})")
        if not np.all(np.isfinite(q)) or np.any(q < 0):
            raise InstanceError("net utilities must be finite and nonnegative")
        lo, hi = self.params.min_tx_gas, self.params.max_tx_gas
        if np.any(a < lo) or np.any(a > hi) or not np.all(np.isfinite(a)):
            bad = int(np.flatnonzero((a < lo) | (a > hi) | ~np.isfinite(a))[0])
            raise InstanceError(f"transaction {bad} has gas {a[bad]} outside [B-, B+] = [{lo}, {hi}]")

    @property
    def n(self):
        return int(self.net_utilities.size)

    @property
    def gas_limit(self):
        return self.params.gas_limit

    def reordered(self, order):
        """Return the instance with q and a jointly permuted by `order`."""
        order = np.asarray(order, dtype=np.intp)
        return ProblemInstance(self.net_utilities[order], self.gas[order], self.params)


def instance_from_arrays(net_utilities, gas, gas_limit, min_tx_gas=None, max_tx_gas=None, gas_price=0.0):
    """
    Build an instance straight from net utilities and gas. Size bounds default
    to the realized min/max gas (1.0 for an empty instance).
    """
    a = np.asarray(gas, dtype=np.float64).reshape(-1)
    if min_tx_gas is None:
        min_tx_gas = float(a.min()) if a.size else 1.0
    if max_tx_gas is None:
        max_tx_gas = float(a.max()) if a.size else max(1.0, min_tx_gas)
    params = BlockParams(float(gas_limit), float(gas_price), float(min_tx_gas), float(max_tx_gas))
    return ProblemInstance(net_utilities, a, params)


def build_instance(txs: Sequence[Transaction], params: BlockParams) -> ProblemInstance:
    """
    Turn a mempool into a problem instance with q_j = q_tilde_j - g*a_j.

    Transactions with negative net utility are dropped before arrival order is
    fixed; survivors keep their relative order.
    """
    lo, hi = params.min_tx_gas, params.max_tx_gas
    for idx, tx in enumerate(txs):
        if not (lo <= tx.gas <= hi):
            raise InstanceError(f"transaction {idx} has gas {tx.gas} outside [B-, B+] = [{lo}, {hi}]")

    gross = np.fromiter((tx.gross_utility for tx in txs), dtype=np.float64, count=len(txs))
    gas = np.fromiter((tx.gas for tx in txs), dtype=np.float64, count=len(txs))
    net = gross - params.gas_price * gas

    keep = net >= 0
    dropped = int(keep.size - np.count_nonzero(keep))
    if dropped:
        logger.warning(f"Dropped {dropped} of {keep.size} transactions with negative net utility")
    return ProblemInstance(net[keep], gas[keep], params)


class PackingKind(enum.Enum):
    EXACT = 'exact'
    GREEDY_ROUNDED = 'greedy_rounded'
    FIFO = 'fifo'
    RELAXATION_FRACTIONAL = 'relaxation_fractional'


@dataclass(frozen=True)
class Packing:
    """Output of a packing procedure: inclusion vector, objective q^T x and gas a^T x."""
    included: np.ndarray
    objective: float
    gas_used: float
    kind: PackingKind
    fractional_index: Optional[int] = None
    fractional_value: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'included', _frozen_array(self.included, dtype=bool))
        has_fraction = self.fractional_index is not None
        if has_fraction and self.kind is not PackingKind.RELAXATION_FRACTIONAL:
            raise InstanceError(f"{self.kind.value} packings are binary; got a fractional entry")
        if has_fraction and not (0.0 < self.fractional_value < 1.0):
            raise InstanceError(f"fractional value must lie in (0, 1), got {self.fractional_value}")

    @property
    def count(self):
        """Number of fully included transactions."""
        return int(np.count_nonzero(self.included))

    def as_vector(self):
        """Inclusion vector as floats, with the fractional entry filled in."""
        x = self.included.astype(np.float64)
        if self.fractional_index is not None:
            x[self.fractional_index] = self.fractional_value
        return x
