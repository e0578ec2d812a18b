"""
bounds.py
Analytic bounds on the welfare gap between optimal and FIFO inclusion.

With k_bar transactions kept by the greedy packing, q_plus their mean utility,
q_minus the mean utility of the rest and eta = B+/B-:

    L = k_bar * q_plus                                (greedy total, <= p_star)
    U = (b/B-) * (k_bar/n * q_plus + (1 - k_bar/n) * q_minus)   (>= E[p_fifo])

Expected gap is positive whenever
    q_plus * (1 - k_bar*eta/n) > eta * q_minus * (1 - k_bar/n)
which is L_worst > U with the worst-case L_worst = (b/B+) * q_plus.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InstanceError, InstanceTooLargeError
from .model import Packing, ProblemInstance
from .packing import fifo_pack, greedy_pack, permute

logger = logging.getLogger(__name__)

EXACT_EXPECTATION_LIMIT = 8


@dataclass(frozen=True)
class GapBounds:
    n: int
    k_bar: int
    q_plus: float
    q_minus: float
    eta: float
    L: float
    L_worst: float
    U: float
    gap_lower: float
    condition_holds: bool
    ratio_bound: Optional[float]
    realized_eta: float

    @property
    def lower_exceeds_upper(self):
        return self.L > self.U


@dataclass(frozen=True)
class GapSoundnessReport:
    num_permutations: int
    mean_fifo: float
    std_error: float
    U: float
    L: float
    p0: float

    @property
    def fifo_within_bound(self):
        """Monte Carlo E[p_fifo] (less three standard errors) does not exceed U."""
        return self.mean_fifo - 3.0 * self.std_error <= self.U

    @property
    def greedy_matches_lower(self):
        return self.p0 == self.L


def gap_condition(q_plus, q_minus, k_bar, n, eta):
    """The positive expected gap condition."""
    frac = k_bar / n
    return q_plus * (1.0 - frac * eta) > eta * q_minus * (1.0 - frac)


def ratio_bound(q_plus, q_minus, k_bar, n, eta):
    """Lower bound (q_plus/eta) / ((q_plus - q_minus) k_bar/n + q_minus) on p_star/p_fifo; None if undefined."""
    denominator = (q_plus - q_minus) * (k_bar / n) + q_minus
    if denominator <= 0.0:
        return None
    return (q_plus / eta) / denominator


def compute_gap_bounds(inst: ProblemInstance, greedy: Packing) -> GapBounds:
    n = inst.n
    if n == 0:
        raise InstanceError("gap bounds need at least one transaction")

    q = inst.net_utilities
    params = inst.params
    included = greedy.included
    k_bar = greedy.count

    L = greedy.objective
    q_plus = L / k_bar if k_bar else 0.0
    q_minus = math.fsum(q[~included]) / (n - k_bar) if k_bar < n else 0.0
    eta = params.eta
    frac = k_bar / n

    U = params.gas_limit / params.min_tx_gas * (frac * q_plus + (1.0 - frac) * q_minus)
    L_worst = params.gas_limit / params.max_tx_gas * q_plus
    realized_eta = float(inst.gas.max() / inst.gas.min())

    return GapBounds(
        n=n,
        k_bar=k_bar,
        q_plus=q_plus,
        q_minus=q_minus,
        eta=eta,
        L=L,
        L_worst=L_worst,
        U=U,
        gap_lower=L - U,
        condition_holds=gap_condition(q_plus, q_minus, k_bar, n, eta),
        ratio_bound=ratio_bound(q_plus, q_minus, k_bar, n, eta),
        realized_eta=realized_eta,
    )


def check_gap_soundness(inst: ProblemInstance, num_permutations: int, rng: np.random.Generator):
    """
    Estimate E[p_fifo] over uniform arrival orders and compare it with U; also
    confirm the greedy total equals L.
    """
    if inst.n == 0:
        raise InstanceError("gap soundness needs at least one transaction")
    if num_permutations < 1:
        raise InstanceError(f"num_permutations must be positive, got {num_permutations}")

    greedy, _ = greedy_pack(inst)
    bounds = compute_gap_bounds(inst, greedy)
    draws = np.array([fifo_pack(permute(inst, rng)).objective for _ in range(num_permutations)])
    std_error = float(draws.std(ddof=1) / math.sqrt(draws.size)) if draws.size > 1 else 0.0
    report = GapSoundnessReport(
        num_permutations=num_permutations,
        mean_fifo=float(draws.mean()),
        std_error=std_error,
        U=bounds.U,
        L=bounds.L,
        p0=greedy.objective,
    )
    if not report.fifo_within_bound:
        logger.warning(f"Monte Carlo E[p_fifo]={report.mean_fifo:.6g} exceeds U={bounds.U:.6g} "
                       f"by more than 3 standard errors")
    return report


def exact_expected_fifo(inst: ProblemInstance, limit_n: int = EXACT_EXPECTATION_LIMIT) -> float:
    """E[p_fifo] over all n! arrival orders."""
    if inst.n > limit_n:
        raise InstanceTooLargeError(inst.n, limit_n, solver='exact_expected_fifo')
    values = [fifo_pack(inst.reordered(order)).objective
              for order in itertools.permutations(range(inst.n))]
    return math.fsum(values) / len(values)
