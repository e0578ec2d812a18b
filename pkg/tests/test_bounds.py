import math

import pytest

from module_block_building.bounds import (check_gap_soundness, compute_gap_bounds, exact_expected_fifo,
                                          gap_condition, ratio_bound)
from module_block_building.errors import InstanceError, InstanceTooLargeError
from module_block_building.model import instance_from_arrays
from module_block_building.packing import greedy_pack
from module_experiment.dists import Pareto
from module_experiment.utils.seeding import make_rng

from conftest import random_instances


def bounds_of(inst):
    greedy, _ = greedy_pack(inst)
    return compute_gap_bounds(inst, greedy)


def test_two_valuable_two_cheap_transactions():
    inst = instance_from_arrays([10.0, 10.0, 1.0, 1.0], [1.0, 1.0, 1.0, 1.0], 2.0)
    bounds = bounds_of(inst)
    assert bounds.k_bar == 2
    assert bounds.q_plus == 10.0
    assert bounds.q_minus == 1.0
    assert bounds.eta == 1.0
    assert bounds.L == 20.0
    assert bounds.L_worst == 20.0
    assert bounds.U == pytest.approx(11.0)
    assert bounds.gap_lower == pytest.approx(9.0)
    assert bounds.condition_holds
    assert bounds.lower_exceeds_upper
    assert bounds.ratio_bound == pytest.approx(20.0 / 11.0)
    assert exact_expected_fifo(inst) == pytest.approx(11.0)


def test_flat_utilities_have_no_gap():
    inst = instance_from_arrays([3.0] * 4, [1.0] * 4, 2.0)
    bounds = bounds_of(inst)
    assert bounds.q_plus == bounds.q_minus == 3.0
    assert bounds.L == pytest.approx(bounds.U)
    assert not bounds.condition_holds
    assert bounds.ratio_bound == pytest.approx(1.0)


def test_everything_fits():
    inst = instance_from_arrays([1.0, 2.0], [1.0, 1.0], 5.0)
    bounds = bounds_of(inst)
    assert bounds.k_bar == 2
    assert bounds.q_minus == 0.0
    assert bounds.q_plus == 1.5
    assert bounds.U == pytest.approx(7.5)
    assert not bounds.condition_holds


def test_nothing_fits():
    inst = instance_from_arrays([5.0], [3.0], 2.0)
    bounds = bounds_of(inst)
    assert bounds.k_bar == 0
    assert bounds.q_plus == 0.0
    assert bounds.q_minus == 5.0
    assert bounds.L == 0.0
    assert bounds.U == pytest.approx(2.0 / 3.0 * 5.0)
    assert not bounds.condition_holds
    assert bounds.ratio_bound == 0.0


def test_zero_utilities_leave_ratio_undefined():
    inst = instance_from_arrays([0.0, 0.0], [1.0, 1.0], 1.0)
    bounds = bounds_of(inst)
    assert bounds.U == 0.0
    assert bounds.ratio_bound is None


def test_eta_uses_configured_bounds_and_reports_realized():
    inst = instance_from_arrays([4.0, 1.0], [2.0, 2.0], 2.0, min_tx_gas=1.0, max_tx_gas=3.0)
    bounds = bounds_of(inst)
    assert bounds.eta == 3.0
    assert bounds.realized_eta == 1.0
    assert bounds.U == pytest.approx(2.0 * (0.5 * 4.0 + 0.5 * 1.0))
    assert bounds.L_worst == pytest.approx(2.0 / 3.0 * 4.0)


def test_empty_instance_has_no_bounds():
    inst = instance_from_arrays([], [], 3.0)
    greedy, _ = greedy_pack(inst)
    with pytest.raises(InstanceError):
        compute_gap_bounds(inst, greedy)


def test_condition_matches_worst_case_lower_bound_exceeding_upper():
    rng = make_rng(4242)
    checked = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 2001))
        k_bar = int(rng.integers(0, n + 1))
        lo = float(rng.uniform(0.1, 5.0))
        hi = lo * float(rng.uniform(1.0, 10.0))
        eta = hi / lo
        b = float(rng.uniform(1.0, 5000.0))
        q_minus = float(rng.exponential(2.0))
        q_plus = q_minus + float(rng.exponential(5.0)) if k_bar else 0.0
        if k_bar == n:
            q_minus = 0.0

        frac = k_bar / n
        U = b / lo * (frac * q_plus + (1.0 - frac) * q_minus)
        L_worst = b / hi * q_plus
        if math.isclose(L_worst, U, rel_tol=1e-9, abs_tol=1e-12):
            continue
        assert gap_condition(q_plus, q_minus, k_bar, n, eta) == (L_worst > U)
        bound = ratio_bound(q_plus, q_minus, k_bar, n, eta)
        if U > 0:
            assert bound == pytest.approx(L_worst / U, rel=1e-9)
        checked += 1
    assert checked > 9_000


def test_greedy_total_can_fall_below_worst_case_lower_bound():
    # only one gas-3 transaction fits b=5, yet (b/B+) q_plus counts 5/3 of one
    inst = instance_from_arrays([1.0, 1.0], [3.0, 3.0], 5.0, min_tx_gas=1.0, max_tx_gas=3.0)
    bounds = bounds_of(inst)
    assert bounds.k_bar == 1
    assert bounds.L == 1.0
    assert bounds.L_worst == pytest.approx(5.0 / 3.0)
    assert bounds.L < bounds.L_worst
    assert bounds.U == pytest.approx(5.0)
    assert not bounds.condition_holds


def test_bounds_on_random_instances_are_consistent():
    for _, inst in random_instances(300, seed=7):
        if inst.n == 0:
            continue
        greedy, _ = greedy_pack(inst)
        bounds = compute_gap_bounds(inst, greedy)
        assert bounds.L == greedy.objective
        assert bounds.k_bar == greedy.count
        if not math.isclose(bounds.L_worst, bounds.U, rel_tol=1e-9, abs_tol=1e-12):
            assert bounds.condition_holds == (bounds.L_worst > bounds.U)


def test_expected_fifo_never_exceeds_upper_bound():
    for _, inst in random_instances(200, seed=99, max_n=6):
        if inst.n == 0:
            continue
        bounds = bounds_of(inst)
        assert exact_expected_fifo(inst) <= bounds.U * (1 + 1e-9) + 1e-12


def test_expected_fifo_with_eight_transactions():
    rng = make_rng(8)
    q = Pareto(0.5).sample(8, rng)
    a = rng.uniform(1.0, 3.0, 8)
    inst = instance_from_arrays(q, a, 5.0, min_tx_gas=1.0, max_tx_gas=3.0)
    assert exact_expected_fifo(inst) <= bounds_of(inst).U * (1 + 1e-9)


def test_expected_fifo_refuses_large_instances():
    inst = instance_from_arrays([1.0] * 9, [1.0] * 9, 3.0)
    with pytest.raises(InstanceTooLargeError):
        exact_expected_fifo(inst)


def test_soundness_report():
    inst = instance_from_arrays([10.0, 10.0, 1.0, 1.0, 5.0, 2.0], [1.0, 2.0, 1.5, 1.0, 3.0, 1.0], 4.0,
                                min_tx_gas=1.0, max_tx_gas=3.0)
    report = check_gap_soundness(inst, 2000, make_rng(1))
    assert report.num_permutations == 2000
    assert report.fifo_within_bound
    assert report.greedy_matches_lower
    assert report.mean_fifo == pytest.approx(exact_expected_fifo(inst), abs=5 * report.std_error + 1e-9)


def test_soundness_needs_permutations():
    inst = instance_from_arrays([1.0], [1.0], 1.0)
    with pytest.raises(InstanceError):
        check_gap_soundness(inst, 0, make_rng(1))
