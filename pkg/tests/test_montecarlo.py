import math

import numpy as np
import pytest

from censkl import CensoredSample, hbar1, statistic_t1
from censkl.sampling import get_alternative, sample
from censkl.exceptions import DegenerateSpacingError, ParameterError, TableMissError
from censkl.gof import TestStatisticKind
from censkl.montecarlo import (
    BLOCK_SIZE,
    SimulationConfig,
    bias_rmse,
    critical_value,
    draw_censored,
    draw_ordered,
    empirical_density,
    empirical_quantile,
    generate_table,
    mean_absolute_deviation,
    paired_difference,
    power,
    power_study,
    rejections,
    replicate_rng,
    select_window,
    _evaluate,
)

from censkl.tables import CriticalValueTable, table_to_csv


def test_empirical_quantile_examples():
    assert empirical_quantile(np.arange(1, 11), 0.9) == 9
    assert empirical_quantile([5.0], 0.3) == 5.0
    assert empirical_quantile([5.0], 0.99) == 5.0
    values = np.random.default_rng(0).permutation(10_000).astype(float)
    assert empirical_quantile(values, 0.9) == 8999.0  # 9000th smallest
    assert np.sum(values > empirical_quantile(values, 0.9)) == 1000
    with pytest.raises(ParameterError):
        empirical_quantile([], 0.5)
    with pytest.raises(ParameterError):
        empirical_quantile([1.0], 1.0)


def test_replicate_streams_are_independent_of_order():
    a = replicate_rng(7, 3).random(4)
    replicate_rng(7, 0).random(100)
    assert np.array_equal(replicate_rng(7, 3).random(4), a)
    assert not np.array_equal(replicate_rng(7, 4).random(4), a)
    assert not np.array_equal(replicate_rng(8, 3).random(4), a)


def test_draw_rows_are_replicate_streams():
    x = draw_ordered(get_alternative("B2").spec, 12, BLOCK_SIZE + 5, seed=99)
    assert x.shape == (BLOCK_SIZE + 5, 12)
    for i in (0, BLOCK_SIZE - 1, BLOCK_SIZE + 4):
        expected = np.sort(sample(get_alternative("B2").spec, 12, replicate_rng(99, i)))
        assert np.array_equal(x[i], expected)


def test_draws_invariant_to_workers():
    one = draw_ordered(None, 10, 3 * BLOCK_SIZE + 7, seed=5, workers=1)
    three = draw_ordered(None, 10, 3 * BLOCK_SIZE + 7, seed=5, workers=3)
    assert np.array_equal(one, three)
    assert np.array_equal(draw_censored(None, 10, 4, 50, seed=5), one[:50, :4])


def test_critical_value_reproduces_published_cells():
    cfg = SimulationConfig("t1", 10, 5, m=3, alpha_levels=(0.1,), reps=10_000, base_seed=31)
    assert critical_value(cfg).rows[0]["critical_value"] == pytest.approx(0.5962, abs=0.02)
    cfg = SimulationConfig("t2", 30, 15, alpha_levels=(0.1,), reps=10_000, base_seed=32)
    assert cfg.m == 10
    assert critical_value(cfg).rows[0]["critical_value"] == pytest.approx(0.0865, abs=0.02)


def test_critical_value_invariant_to_workers():
    cfg = SimulationConfig("t1", 20, 12, alpha_levels=(0.1, 0.05), reps=2000, base_seed=4)
    assert critical_value(cfg, workers=1).rows == critical_value(cfg, workers=2).rows


def test_simulation_config_validation():
    with pytest.raises(ParameterError):
        SimulationConfig("t1", 10, 5, reps=50)
    with pytest.raises(ParameterError):
        SimulationConfig("t1", 10, 5, alpha_levels=(1.5,))
    with pytest.raises(ParameterError):
        critical_value(SimulationConfig("t1", 10, 5, alternative="A1"))
    cfg = SimulationConfig("z", 10, 5, alternative="B8")
    assert cfg.m is None and cfg.alternative_label == "B8"


def test_generate_table_z_rows():
    table = generate_table("z", 20, [10, 12], reps=500, seed=3)
    labels = [row.statistic for row in table]
    assert labels.count("z:lower") == labels.count("z:upper") == 2 * 3
    lower, upper = table.lookup("z", 20, 10, 0.05)
    assert lower < 0 < upper
    assert isinstance(table, CriticalValueTable)


def test_generate_table_is_byte_deterministic():
    a = table_to_csv(generate_table("t", 10, [5, 6], reps=600, seed=8))
    b = table_to_csv(generate_table("t", 10, [5, 6], reps=600, seed=8, workers=2))
    assert a == b


def test_select_window_examples():
    assert select_window("t1", 30, 15, 0.1, range(2, 8), reps=10_000, seed=11) == 3
    assert select_window("t1", 30, 25, 0.1, range(2, 8), reps=10_000, seed=11) == 4
    assert select_window("t1", 30, 15, 0.1, [5], reps=200, seed=1) == 5


def test_select_window_skips_invalid_candidates():
    # m=1 always collapses the first harmonic-mean spacing; m=9 exceeds the bound
    assert select_window("t1", 20, 10, 0.1, [1, 4, 9], reps=200, seed=2) == 4
    with pytest.raises(ParameterError):
        select_window("t1", 20, 10, 0.1, [1, 9], reps=200, seed=2)
    with pytest.raises(ParameterError):
        select_window("bigz", 20, 10, 0.1, [3], reps=200, seed=2)


def test_select_window_breaks_ties_toward_smaller():
    # hbar2 saturates once m >= r - 1, so both windows give identical values
    assert select_window("t2", 10, 6, 0.1, [5, 6], reps=300, seed=2) == 5


def test_failed_replicate_is_reported():
    x = np.array([[0.1, 0.2, 0.3, 0.4], [0.1, 0.2, 0.3, 0.4]])
    with pytest.raises(DegenerateSpacingError, match=r"replicate 0, seed 17"):
        _evaluate(TestStatisticKind.T1, x, 8, 1, 3, 17)


def test_power_under_null_is_size():
    cfg = SimulationConfig("t1", 20, 10, alpha_levels=(0.1,), reps=10_000, base_seed=77)
    row = power(cfg).rows[0]
    assert row["alternative"] == "null"
    assert row["power"] == pytest.approx(0.1, abs=0.01)
    assert row["se"] == pytest.approx(math.sqrt(row["power"] * (1 - row["power"]) / 10_000))


def test_power_with_explicit_critical_value():
    cfg = SimulationConfig("z", 20, 10, alpha_levels=(0.1,), reps=500, base_seed=1,
                           alternative="A3")
    row = power(cfg, critical_value=(-1.0, 1.0)).rows[0]
    assert 0.0 <= row["power"] <= 1.0
    cfg = SimulationConfig("t1", 40, 20, alpha_levels=(0.1,), reps=200, base_seed=1)
    with pytest.raises(TableMissError):
        power(cfg)
    assert 0.0 <= power(cfg, fallback_reps=200).rows[0]["power"] <= 1.0


def test_paired_comparisons_use_common_samples():
    x = draw_censored(get_alternative("A3").spec, 30, 20, 300, seed=6)
    res = rejections(["t1", "t"], get_alternative("A3").spec, 30, 20, 0.1, 300, seed=6)
    m = res[TestStatisticKind.T1][1]
    cv = res[TestStatisticKind.T1][2]
    assert np.array_equal(res[TestStatisticKind.T1][0], statistic_t1(x, m, n=30) > cv)
    mean, se = paired_difference(res[TestStatisticKind.T1][0], res[TestStatisticKind.PARK_T][0])
    d = res[TestStatisticKind.T1][0].astype(float) - res[TestStatisticKind.PARK_T][0]
    assert mean == pytest.approx(d.mean())
    assert se == pytest.approx(d.std(ddof=1) / math.sqrt(d.size))


def test_power_study_extent():
    study = power_study(["t1", "t", "z", "bigz"], ["A1", "A2", "A3", "A4"], 30, [15, 20],
                        reps=200, seed=3)
    assert len(study.rows) == 4 * 4 * 2
    assert all(0 <= p <= 1 for p in study.column("power"))
    with pytest.raises(ParameterError):
        power_study(["t1"], ["X9"], 30, [15], reps=200)


def test_bias_rmse_rows_and_inequality():
    study = bias_rmse(30, [15, 27], reps=500, seed=5)
    assert len(study.rows) == 6
    assert study.columns == ("n", "r", "estimator", "bias", "rmse", "reps", "seed")
    for row in study.rows:
        assert row["rmse"] ** 2 >= row["bias"] ** 2
    row = study.where(r=15, estimator="hbar1")[0]
    x = draw_ordered(None, 30, 500, seed=5)[:, :15]
    err = hbar1(x, 3, n=30) - 0.5
    assert row["bias"] == pytest.approx(err.mean())
    assert row["rmse"] == pytest.approx(np.sqrt(np.mean(err ** 2)))


def test_mean_absolute_deviation_small():
    assert mean_absolute_deviation("hbar2", 200, 133, 11, reps=200, seed=1) < 0.1


def test_empirical_density_normalized_and_deterministic():
    for n, r in ((40, 25), (50, 35)):
        for stat in ("t1", "t2", "t"):
            study = empirical_density(stat, n, r, reps=1000, seed=2, bins=40)
            width = np.array(study.column("bin_right")) - np.array(study.column("bin_left"))
            assert np.sum(np.array(study.column("density")) * width) == pytest.approx(1, abs=1e-6)
    a = empirical_density("t1", 40, 25, reps=500, seed=9).to_csv()
    assert a == empirical_density("t1", 40, 25, reps=500, seed=9, workers=2).to_csv()


def test_study_csv_format():
    cfg = SimulationConfig("t1", 10, 5, m=3, alpha_levels=(0.1,), reps=100, base_seed=1)
    text = critical_value(cfg).to_csv()
    header, line = text.splitlines()
    assert header == "statistic,n,r,m,alpha,critical_value,provenance,seed,reps"
    assert line.startswith("t1,10,5,3,0.1,") and line.endswith(",generated,1,100")


def test_sample_object_round_trip():
    x = draw_censored(None, 10, 5, 1, seed=0)[0]
    s = CensoredSample(x, 10, 5)
    assert np.array_equal(s.values, x)
