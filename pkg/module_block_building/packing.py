"""
packing.py
The packing procedures for the block building problem

    maximize q^T x  subject to  a^T x <= b,  x in {0,1}^n

- solve_relaxation: closed-form optimum of the LP relaxation (0 <= x <= 1),
  filling transactions in order of efficiency b*q_i/a_i.
- greedy_pack: the relaxation with its (at most one) fractional entry rounded
  down, plus the m/(m-1) approximation certificate.
- exact_pack: depth-first branch and bound, bounded by the relaxation of the
  residual problem; the reference optimum p_star.
- exhaustive_pack: 2^n enumeration, used as an oracle for small instances.
- fifo_pack: best prefix packing in arrival order.
- permute: uniform random arrival order.

Objectives are summed with math.fsum so that the same set of transactions
gives bit-identical totals regardless of the order it was collected in.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InstanceTooLargeError
from .model import Packing, PackingKind, ProblemInstance

logger = logging.getLogger(__name__)

DEFAULT_EXACT_LIMIT = 30
DEFAULT_EXHAUSTIVE_LIMIT = 22
PRUNE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RelaxationSolution:
    x: np.ndarray
    objective: float
    efficiencies: np.ndarray
    sort_order: np.ndarray
    full_count: int
    gas_used: float
    fractional_index: Optional[int] = None
    fractional_value: Optional[float] = None

    def as_packing(self):
        return Packing(
            included=self.x == 1.0,
            objective=self.objective,
            gas_used=self.gas_used,
            kind=PackingKind.RELAXATION_FRACTIONAL,
            fractional_index=self.fractional_index,
            fractional_value=self.fractional_value,
        )


@dataclass(frozen=True)
class ApproxCertificate:
    """
    m is the largest integer with max_i a_i <= b/m (inf for an empty instance).
    upper_bound = m/(m-1) * p0 when m >= 2, inf when the bound does not apply.
    """
    m: float
    p0: float
    upper_bound: float

    @property
    def applies(self):
        return math.isfinite(self.upper_bound)

    def optimum_upper_bound(self, r_star):
        """Best available upper bound on p_star: the certificate or the relaxation value."""
        return min(self.upper_bound, r_star)


def _fill(a_sorted, capacity):
    """
    Fill items in the given order until `capacity` is met.

    Returns (k, cum) where the first k items fit entirely and cum holds the
    running gas totals.
    """
    cum = np.cumsum(a_sorted)
    k = int(np.searchsorted(cum, capacity, side='right'))
    return k, cum


def _residual_relaxation_value(q_sorted, a_sorted, start, capacity):
    """Relaxation optimum over items start.. (already in efficiency order) with the given capacity."""
    if capacity <= 0 or start >= q_sorted.size:
        return 0.0
    a_rest = a_sorted[start:]
    k, cum = _fill(a_rest, capacity)
    value = float(q_sorted[start:start + k].sum())
    if k < a_rest.size:
        left = capacity - (cum[k - 1] if k else 0.0)
        value += left / a_rest[k] * q_sorted[start + k]
    return value


def efficiency_order(inst: ProblemInstance):
    """Efficiencies b*q_i/a_i and their nonincreasing order (ties by ascending index)."""
    eff = inst.gas_limit * inst.net_utilities / inst.gas
    order = np.argsort(-eff, kind='stable')
    return eff, order


def solve_relaxation(inst: ProblemInstance) -> RelaxationSolution:
    q, a, b = inst.net_utilities, inst.gas, inst.gas_limit
    eff, order = efficiency_order(inst)
    x = np.zeros(inst.n)
    if inst.n == 0:
        return RelaxationSolution(x, 0.0, eff, order, 0, 0.0)

    k, cum = _fill(a[order], b)
    x[order[:k]] = 1.0
    objective = math.fsum(q[order[:k]])
    gas_used = float(cum[k - 1]) if k else 0.0

    frac_idx, frac_val = None, None
    if k < inst.n:
        value = (b - gas_used) / a[order[k]]
        if value > 0.0:
            frac_idx, frac_val = int(order[k]), float(min(value, np.nextafter(1.0, 0.0)))
            x[frac_idx] = frac_val
            objective += frac_val * q[frac_idx]
            gas_used += frac_val * a[frac_idx]

    x.setflags(write=False)
    return RelaxationSolution(x, float(objective), eff, order, k, float(gas_used), frac_idx, frac_val)


def approx_certificate(inst: ProblemInstance, p0: float) -> ApproxCertificate:
    if inst.n == 0:
        return ApproxCertificate(m=math.inf, p0=0.0, upper_bound=0.0)
    a_max = float(inst.gas.max())
    m = math.floor(inst.gas_limit / a_max)
    while m > 0 and m * a_max > inst.gas_limit:
        m -= 1
    upper = m / (m - 1) * p0 if m >= 2 else math.inf
    return ApproxCertificate(m=m, p0=p0, upper_bound=upper)


def greedy_pack(inst: ProblemInstance, relaxation: Optional[RelaxationSolution] = None):
    """
    Round the fractional entry of the relaxation down to zero.

    Returns (packing, certificate); p0 <= p_star, and p_star <= m/(m-1) p0 when m >= 2.
    """
    if relaxation is None:
        relaxation = solve_relaxation(inst)
    chosen = relaxation.sort_order[:relaxation.full_count]
    included = np.zeros(inst.n, dtype=bool)
    included[chosen] = True
    p0 = math.fsum(inst.net_utilities[chosen])
    gas_used = float(np.cumsum(inst.gas[chosen])[-1]) if chosen.size else 0.0
    packing = Packing(included, p0, gas_used, PackingKind.GREEDY_ROUNDED)
    return packing, approx_certificate(inst, p0)


def _packing_from_mask(inst, mask, kind, gas_used):
    mask = np.asarray(mask, dtype=bool)
    return Packing(
        included=mask,
        objective=math.fsum(inst.net_utilities[mask]),
        gas_used=float(gas_used),
        kind=kind,
    )


def exact_pack(inst: ProblemInstance, limit_n: int = DEFAULT_EXACT_LIMIT) -> Packing:
    """
    Depth-first branch and bound over transactions in efficiency order.

    The incumbent starts at the greedy packing; a node is pruned when the
    relaxation of its residual problem cannot beat the incumbent by more than
    PRUNE_TOLERANCE (relative).
    """
    n = inst.n
    if n > limit_n:
        raise InstanceTooLargeError(n, limit_n)
    if n == 0:
        return _packing_from_mask(inst, np.zeros(0, dtype=bool), PackingKind.EXACT, 0.0)

    b = inst.gas_limit
    relaxation = solve_relaxation(inst)
    greedy, _ = greedy_pack(inst, relaxation)
    order = relaxation.sort_order
    q_sorted = inst.net_utilities[order]
    a_sorted = inst.gas[order]

    best_value = greedy.objective
    best_weight = greedy.gas_used
    best_chosen = tuple(range(relaxation.full_count))
    nodes = 0

    # (level, value, weight, chosen positions in efficiency order)
    stack = [(0, 0.0, 0.0, ())]
    while stack:
        level, value, weight, chosen = stack.pop()
        nodes += 1
        if value > best_value:
            best_value, best_weight, best_chosen = value, weight, chosen
        if level == n:
            continue
        bound = value + _residual_relaxation_value(q_sorted, a_sorted, level, b - weight)
        if bound <= best_value + PRUNE_TOLERANCE * (1.0 + abs(best_value)):
            continue
        stack.append((level + 1, value, weight, chosen))
        if weight + a_sorted[level] <= b:
            stack.append((level + 1, value + q_sorted[level], weight + a_sorted[level], chosen + (level,)))

    logger.debug(f"exact_pack: n={n}, explored {nodes} nodes")
    mask = np.zeros(n, dtype=bool)
    mask[order[list(best_chosen)]] = True
    return _packing_from_mask(inst, mask, PackingKind.EXACT, best_weight)


def exhaustive_pack(inst: ProblemInstance, limit_n: int = DEFAULT_EXHAUSTIVE_LIMIT) -> Packing:
    """Enumerate all 2^n subsets; ties resolve to the smallest subset bitmask."""
    n = inst.n
    if n > limit_n:
        raise InstanceTooLargeError(n, limit_n, solver='exhaustive_pack')

    subsets = np.arange(1 << n, dtype=np.int64)
    values = np.zeros(subsets.size)
    weights = np.zeros(subsets.size)
    for j in range(n):
        bit = ((subsets >> j) & 1).astype(bool)
        values[bit] += inst.net_utilities[j]
        weights[bit] += inst.gas[j]

    feasible = np.flatnonzero(weights <= inst.gas_limit)
    best = int(feasible[np.argmax(values[feasible])])
    mask = ((best >> np.arange(n)) & 1).astype(bool)
    return _packing_from_mask(inst, mask, PackingKind.EXACT, weights[best])


def fifo_pack(inst: ProblemInstance) -> Packing:
    """
    Best prefix packing: max over k of q^T (1_k, 0) subject to a^T (1_k, 0) <= b.
    Among equally good prefixes the longest is returned.
    """
    q, a = inst.net_utilities, inst.gas
    cum_a = np.concatenate(([0.0], np.cumsum(a)))
    cum_q = np.concatenate(([0.0], np.cumsum(q)))
    feasible = np.flatnonzero(cum_a <= inst.gas_limit)
    best = cum_q[feasible].max()
    k = int(feasible[cum_q[feasible] == best][-1])
    return _packing_from_mask(inst, np.arange(inst.n) < k, PackingKind.FIFO, cum_a[k])


def permute(inst: ProblemInstance, rng: np.random.Generator) -> ProblemInstance:
    """Jointly permute q and a by a uniform random permutation drawn from `rng`."""
    return inst.reordered(rng.permutation(inst.n))
