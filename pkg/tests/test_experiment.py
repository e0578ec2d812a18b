import math
from dataclasses import replace

import pytest

from module_block_building.errors import ConfigError, SandwichViolation
from module_block_building.packing import exhaustive_pack
from module_experiment.dists import Exponential, Levy, LogNormal, Pareto
from module_experiment.experiment import (CSV_COLUMNS, ExperimentConfig, TrialRecord, aggregate,
                                          build_trial_instance, check_sandwich, run_sweep, run_trial)
from module_experiment.experiment_csv import format_records_csv


def small_config(**overrides):
    values = dict(distribution=Exponential(2.5), n_transactions=40, block_sizes=(10.0, 30.0),
                  trials_per_size=3, master_seed=11)
    values.update(overrides)
    return ExperimentConfig(**values)


def record(**overrides):
    values = dict(distribution='Exponential(2.5)', block_size=20.0, trial=0, sub_seed=1, n=10,
                  p0=9.0, r_star=10.0, p_fifo=6.0, p_star=None, k_bar=4, m=6.0, gap_lower=1.0,
                  ratio_lb=1.5, ratio_ub=10.0 / 6.0, bound_ratio=1.2, condition_holds=True)
    values.update(overrides)
    return TrialRecord(**values)


def test_trials_are_deterministic():
    cfg = small_config()
    assert run_trial(cfg, 10.0, 2) == run_trial(cfg, 10.0, 2)
    assert run_trial(cfg, 10.0, 1) != run_trial(cfg, 10.0, 2)
    assert run_trial(cfg, 10.0, 0) != run_trial(replace(cfg, master_seed=12), 10.0, 0)


def test_trial_record_fields():
    rec = run_trial(small_config(), 10.0, 0)
    assert rec.distribution == 'Exponential(2.5)'
    assert rec.block_size == 10.0
    assert rec.n == 40
    assert rec.p_star is None
    assert rec.p0 <= rec.r_star
    assert rec.p_fifo <= rec.r_star
    assert rec.ratio_lb == pytest.approx(rec.p0 / rec.p_fifo)
    assert rec.ratio_ub == pytest.approx(rec.r_star / rec.p_fifo)
    assert rec.m == 3


def test_unconstrained_block_gives_ratio_one():
    cfg = small_config(n_transactions=50, block_sizes=(1e6,))
    rec = run_trial(cfg, 1e6, 0)
    assert rec.k_bar == 50
    assert rec.p0 == rec.p_fifo == rec.r_star
    assert rec.ratio_lb == 1.0
    assert rec.ratio_ub == 1.0
    assert not rec.condition_holds


def test_exact_optimum_matches_enumeration():
    cfg = small_config(distribution=Pareto(0.5), n_transactions=12, block_sizes=(8.0,))
    for trial in range(3):
        rec = run_trial(cfg, 8.0, trial)
        _, inst = build_trial_instance(cfg, 8.0, trial)
        assert inst.n == 12
        assert rec.p_star == pytest.approx(exhaustive_pack(inst).objective, rel=1e-9)
        assert rec.p0 <= rec.p_star * (1 + 1e-9)
        assert rec.p_fifo <= rec.p_star * (1 + 1e-9)


def test_gas_price_drops_unprofitable_transactions():
    cfg = small_config(gas_price=2.0)
    _, inst = build_trial_instance(cfg, 10.0, 0)
    assert inst.n < 40
    assert run_trial(cfg, 10.0, 0).n == inst.n


def test_sweep_is_ordered_by_block_size_then_trial():
    cfg = small_config(block_sizes=(30.0, 10.0))
    records = run_sweep(cfg)
    assert [(r.block_size, r.trial) for r in records] == [
        (10.0, 0), (10.0, 1), (10.0, 2), (30.0, 0), (30.0, 1), (30.0, 2)]


def test_sweep_does_not_depend_on_thread_count():
    cfg = small_config(distribution=LogNormal(1.0, 1.0), trials_per_size=6)
    assert format_records_csv(run_sweep(cfg, threads=1)) == format_records_csv(run_sweep(cfg, threads=4))


def test_fixed_mempool_reuses_transactions_across_block_sizes():
    cfg = small_config(fixed_mempool=True)
    _, small = build_trial_instance(cfg, 10.0, 0)
    _, large = build_trial_instance(cfg, 30.0, 1)
    assert sorted(small.net_utilities.tolist()) == sorted(large.net_utilities.tolist())
    assert small.net_utilities.tolist() != large.net_utilities.tolist()

    _, fresh = build_trial_instance(replace(cfg, fixed_mempool=False), 30.0, 1)
    assert sorted(fresh.net_utilities.tolist()) != sorted(small.net_utilities.tolist())


def test_unknown_block_size_is_rejected():
    with pytest.raises(ConfigError):
        run_trial(small_config(), 25.0, 0)


@pytest.mark.parametrize("overrides", [
    dict(block_sizes=()),
    dict(block_sizes=(10.0, -5.0)),
    dict(block_sizes=(10.0, 10.0)),
    dict(n_transactions=0),
    dict(trials_per_size=0),
    dict(gas_lo=0.0),
    dict(gas_lo=3.0, gas_hi=1.0),
    dict(gas_price=-1.0),
    dict(master_seed=-1),
    dict(master_seed=2 ** 64),
    dict(distribution='Pareto(0.5)'),
    dict(distribution=Levy(-1.0, 1.0)),
])
def test_config_validation(overrides):
    with pytest.raises(ConfigError):
        small_config(**overrides)


def test_sandwich_check():
    check_sandwich(record(p_star=9.5))
    with pytest.raises(SandwichViolation):
        check_sandwich(record(p_star=10.5))
    with pytest.raises(SandwichViolation):
        check_sandwich(record(p_fifo=11.0))
    # within relative slack
    check_sandwich(record(p0=10.0 * (1 + 1e-12)))


def test_aggregate_means_and_sample_std():
    records = [
        record(trial=0, ratio_lb=1.0, gap_lower=1.0, condition_holds=True),
        record(trial=1, ratio_lb=2.0, gap_lower=3.0, condition_holds=False),
        record(trial=2, ratio_lb=3.0, gap_lower=5.0, condition_holds=True),
        record(block_size=50.0, trial=0, ratio_lb=4.0),
    ]
    summary = aggregate(records)
    assert summary['block_size'].tolist() == [20.0, 50.0]
    first, second = summary.iloc[0], summary.iloc[1]
    assert first['trials'] == 3
    assert first['ratio_lb_mean'] == pytest.approx(2.0)
    assert first['ratio_lb_std'] == pytest.approx(1.0)
    assert first['gap_lower_mean'] == pytest.approx(3.0)
    assert first['gap_lower_std'] == pytest.approx(2.0)
    assert first['condition_rate'] == pytest.approx(2 / 3)
    assert first['gap_realized_mean'] == pytest.approx(3.0)
    assert second['ratio_lb_std'] == 0.0


def test_aggregate_excludes_undefined_ratios():
    records = [
        record(trial=0, p_fifo=0.0, ratio_lb=None, ratio_ub=None),
        record(trial=1, ratio_lb=2.0, ratio_ub=3.0),
        record(trial=2, ratio_lb=4.0, ratio_ub=5.0),
    ]
    row = aggregate(records).iloc[0]
    assert row['undefined_ratios'] == 1
    assert row['ratio_lb_mean'] == pytest.approx(3.0)
    assert row['ratio_ub_mean'] == pytest.approx(4.0)


def test_aggregate_all_undefined_leaves_nan():
    row = aggregate([record(p_fifo=0.0, ratio_lb=None, ratio_ub=None)]).iloc[0]
    assert row['undefined_ratios'] == 1
    assert math.isnan(row['ratio_lb_mean'])


def test_aggregate_keeps_distribution_order():
    records = [record(distribution='Pareto(0.5)'), record(distribution='Exponential(2.5)')]
    assert aggregate(records)['distribution'].tolist() == ['Pareto(0.5)', 'Exponential(2.5)']


def test_aggregate_needs_records():
    with pytest.raises(ConfigError):
        aggregate([])


def test_csv_columns_follow_record_fields():
    assert CSV_COLUMNS[:3] == ('distribution', 'block_size', 'trial')
    assert CSV_COLUMNS[-1] == 'condition_holds'


def test_ratio_shrinks_as_blocks_grow():
    for dist in (Exponential(2.5), Pareto(0.5)):
        cfg = ExperimentConfig(distribution=dist, n_transactions=200, block_sizes=(10.0, 1000.0),
                               trials_per_size=15, master_seed=3)
        summary = aggregate(run_sweep(cfg))
        tight, loose = summary['ratio_lb_mean'].tolist()
        assert tight > 1.0
        assert loose == pytest.approx(1.0)


def test_heavy_tails_widen_the_gap():
    means = {}
    for dist in (Exponential(2.5), Pareto(0.5)):
        cfg = ExperimentConfig(distribution=dist, n_transactions=200, block_sizes=(10.0,),
                               trials_per_size=20, master_seed=5)
        means[dist.name] = aggregate(run_sweep(cfg))['ratio_lb_mean'].iloc[0]
    assert means['Pareto(0.5)'] > means['Exponential(2.5)']


def test_shifted_levy_with_nonnegative_support_is_accepted():
    cfg = small_config(distribution=Levy(0.5, 1.0))
    assert cfg.distribution.support_lower == 0.5
    with pytest.raises(ConfigError, match='negative utilities'):
        small_config(distribution=Levy(-1.0, 1.0))
