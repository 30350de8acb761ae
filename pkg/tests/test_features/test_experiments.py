"""experiments tests: configuration, aggregation, sweeps"""
import math

import numpy as np
import pytest

from conic.solver import SolverSettings
from features.experiments import (
    DEFAULT_OBJECTIVES, EntropyComparison, ExperimentConfig, GammaSweep, NoiseSweep,
    RangeSweep, ScaleSweep, aggregate, loglog_slope, position_dump, records_frame,
    run_entropy_comparison, run_gamma_sweep, run_noise_sweep, run_range_sweep,
    run_scale_sweep, run_sweep,
)
from features.models import BISWAS_YE, LEAST_SQUARES, PROPOSED_QP, ObjectiveKind
from type_defs import GenConfig, NetworkRecord
from utils.errors import ConfigError

TINY = GenConfig(n=6, m=4, radio_range=1.0, noise_std=0.01)


def _record(value, objective, index, pe, status="Optimal", variant=""):
    return NetworkRecord(
        sweep_value=value, objective=objective, network_index=index, pe=pe,
        solve_time=0.1 * (index + 1), iterations=10 + index, status=status, variant=variant,
    )


def _tiny(sweep, objectives=(ObjectiveKind(BISWAS_YE),), **changes):
    cfg = ExperimentConfig(
        base=TINY, sweep=sweep, objectives=objectives, num_networks=2,
        master_seed=123, workers=2, record_timing=False,
    )
    return cfg.with_(**changes)


class TestExperimentConfig:
    """check() collects every configuration problem"""

    def test_valid(self):
        cfg = _tiny(NoiseSweep((0.0, 0.01)))
        assert cfg.check() is cfg
        assert cfg.kind == "noise"

    def test_bad_values(self):
        cfg = _tiny(NoiseSweep(()), num_networks=0, workers=0)
        with pytest.raises(ConfigError) as exc:
            cfg.check()
        messages = " ".join(exc.value.errors)
        assert "num_networks" in messages
        assert "workers" in messages
        assert "noise_stds" in messages

    def test_negative_gamma(self):
        with pytest.raises(ConfigError):
            _tiny(GammaSweep((10.0, -1.0))).check()

    def test_bad_solver_settings(self):
        with pytest.raises(ConfigError):
            _tiny(RangeSweep((0.3,)), settings=SolverSettings(step_fraction=2.0)).check()

    def test_wrong_sweep_for_runner(self):
        with pytest.raises(ConfigError):
            run_gamma_sweep(_tiny(NoiseSweep((0.0,))))


class TestAggregate:
    """Means over succeeded networks, one row per group"""

    def test_means_and_population_std(self):
        records = [
            _record(0.1, "qp", 0, 1.0),
            _record(0.1, "qp", 1, 3.0),
            _record(0.1, "qp", 2, math.nan, status="NumericalFailure"),
        ]
        (row,) = aggregate(records, num_networks=3)
        assert row.mean_pe == 2.0
        assert row.std_pe == 1.0
        assert row.mean_solve_time == pytest.approx(0.15)
        assert row.mean_iterations == 10.5
        assert row.networks_succeeded == 2
        assert row.num_networks == 3

    def test_group_order_follows_records(self):
        records = [
            _record(0.2, "qp", 0, 1.0),
            _record(0.2, "ls", 0, 1.0),
            _record(0.1, "qp", 0, 1.0),
            _record(0.1, "qp", 0, 1.0, variant="cap=7"),
        ]
        rows = aggregate(records, num_networks=1)
        assert [(r.sweep_value, r.objective, r.variant) for r in rows] == [
            (0.2, "qp", ""), (0.2, "ls", ""), (0.1, "qp", ""), (0.1, "qp", "cap=7"),
        ]

    def test_all_failed_group(self):
        (row,) = aggregate([_record(0.3, "ls", 0, math.nan, status="EmptyGraph")], num_networks=1)
        assert row.networks_succeeded == 0
        assert math.isnan(row.mean_pe) and math.isnan(row.std_pe)

    def test_recomputable_from_records(self):
        rng = np.random.default_rng(0)
        records = [_record(0.05, "qp", i, float(pe)) for i, pe in enumerate(rng.uniform(0, 0.1, 10))]
        (row,) = aggregate(records, num_networks=10)
        df = records_frame(records)
        assert row.mean_pe == pytest.approx(df["pe"].mean())
        assert row.std_pe == pytest.approx(df["pe"].std(ddof=0))

    def test_empty(self):
        assert aggregate([], num_networks=5) == []


class TestLogLogSlope:
    """Fitted growth exponent of solve time"""

    def test_cubic(self):
        n = np.array([30.0, 50.0, 70.0, 90.0])
        assert loglog_slope(n, 1e-6 * n ** 3) == pytest.approx(3.0)

    def test_underdetermined(self):
        assert math.isnan(loglog_slope([30.0], [1.0]))
        assert math.isnan(loglog_slope([30.0, 30.0], [1.0, 2.0]))


class TestRunSweep:
    """Small end-to-end sweeps"""

    def test_noise_sweep_rows_and_records(self):
        outcome = run_sweep(_tiny(NoiseSweep((0.0, 0.01)), objectives=(ObjectiveKind(BISWAS_YE), ObjectiveKind(PROPOSED_QP))))
        assert outcome.kind == "noise"
        assert [(r.sweep_value, r.objective) for r in outcome.rows] == [
            (0.0, "biswas-ye"), (0.0, "qp"), (0.01, "biswas-ye"), (0.01, "qp"),
        ]
        assert len(outcome.records) == 2 * 2 * 2
        assert not outcome.all_failed
        zero = [r for r in outcome.rows if r.sweep_value == 0.0]
        assert all(r.mean_pe < 1e-3 for r in zero)
        assert outcome.notes

    def test_deterministic(self):
        cfg = _tiny(NoiseSweep((0.01,)))
        a, b = run_sweep(cfg), run_sweep(cfg.with_(workers=1))
        assert a.records == b.records
        assert a.rows == b.rows

    def test_networks_paired_across_values(self):
        outcome = run_sweep(_tiny(RangeSweep((0.5, 0.7))))
        seeds = {}
        for r in outcome.records:
            seeds.setdefault(r.network_index, set()).add(r.seed)
        assert all(len(s) == 1 for s in seeds.values())
        assert len({next(iter(s)) for s in seeds.values()}) == 2

    def test_range_sweep_empty_graphs(self):
        outcome = run_sweep(_tiny(RangeSweep((1e-6, 0.7))))
        first, second = outcome.rows
        assert first.networks_succeeded == 0
        assert second.networks_succeeded == 2
        assert outcome.notes

    def test_all_failed(self):
        outcome = run_sweep(_tiny(RangeSweep((1e-6,))))
        assert outcome.all_failed

    def test_gamma_sweep_uses_qp_gamma(self):
        rows = run_gamma_sweep(_tiny(GammaSweep((100.0, 1000.0)), num_networks=1))
        assert [r.objective for r in rows] == ["qp-gamma", "qp-gamma"]
        assert [r.sweep_value for r in rows] == [100.0, 1000.0]

    def test_scale_sweep_variants(self):
        cfg = _tiny(ScaleSweep((6, 8), max_degree=3), num_networks=1)
        rows = run_scale_sweep(cfg)
        assert [(r.sweep_value, r.variant) for r in rows] == [
            (6.0, ""), (6.0, "cap=3"), (8.0, ""), (8.0, "cap=3"),
        ]

    def test_entropy_comparison_single_cell(self):
        cfg = _tiny(EntropyComparison(), objectives=DEFAULT_OBJECTIVES, num_networks=1)
        rows = run_entropy_comparison(cfg)
        assert [r.objective for r in rows] == ["biswas-ye", "ls", "qp"]
        assert all(r.sweep_value == TINY.noise_std for r in rows)
        assert all(r.mean_relative_entropy >= 0.0 for r in rows)

    def test_noise_runner(self):
        assert len(run_noise_sweep(_tiny(NoiseSweep((0.01,)), num_networks=1))) == 1
        assert len(run_range_sweep(_tiny(RangeSweep((0.7,)), num_networks=1))) == 1


class TestPositionDump:
    """True against estimated coordinates"""

    def test_columns_and_rows(self):
        df = position_dump(TINY.with_(seed=9), (ObjectiveKind(BISWAS_YE), ObjectiveKind(PROPOSED_QP)))
        assert list(df.columns) == ["objective", "status", "index", "x", "y", "x_hat", "y_hat"]
        assert len(df) == 2 * TINY.n
        err = np.hypot(df["x"] - df["x_hat"], df["y"] - df["y_hat"])
        assert err.mean() < 0.05


def _paired(sweep, objectives, n=60, networks=20, **gen):
    base = GenConfig(n=n, m=5, radio_range=0.25, noise_std=0.05).with_(**gen)
    cfg = ExperimentConfig(base=base, sweep=sweep, objectives=objectives, num_networks=networks,
                           master_seed=20150101, workers=4, record_timing=False)
    return {(r.sweep_value, r.variant, r.objective): r for r in run_sweep(cfg).rows}


@pytest.mark.slow
class TestPublishedOrderings:
    """Statistical orderings over paired random networks"""

    def test_relative_entropy_ordering(self):
        rows = _paired(EntropyComparison(), DEFAULT_OBJECTIVES)
        by = {obj: r for (_, _, obj), r in rows.items()}
        qp, ls, by_ = by[PROPOSED_QP], by[LEAST_SQUARES], by[BISWAS_YE]
        assert qp.mean_relative_entropy <= ls.mean_relative_entropy < by_.mean_relative_entropy
        assert by_.mean_relative_entropy >= 2.0 * qp.mean_relative_entropy
        assert qp.mean_tail_fraction < by_.mean_tail_fraction

    def test_noise_accuracy_ordering(self):
        rows = _paired(NoiseSweep((0.02, 0.05, 0.1)), DEFAULT_OBJECTIVES, networks=10)
        for sigma in (0.02, 0.05, 0.1):
            assert rows[(sigma, "", PROPOSED_QP)].mean_pe < rows[(sigma, "", BISWAS_YE)].mean_pe
        assert rows[(0.05, "", PROPOSED_QP)].mean_pe <= 1.05 * rows[(0.05, "", LEAST_SQUARES)].mean_pe

    def test_gamma_plateau(self):
        rows = _paired(GammaSweep((100.0, 1000.0)), (), networks=10)
        a, b = rows[(100.0, "", "qp-gamma")].mean_pe, rows[(1000.0, "", "qp-gamma")].mean_pe
        assert abs(a - b) < 0.05 * max(a, b)

    def test_solve_time_grows_with_n(self):
        cfg = ExperimentConfig(
            base=GenConfig(n=30, m=5, radio_range=0.3, noise_std=0.05),
            sweep=ScaleSweep((30, 50, 70), max_degree=7),
            objectives=(ObjectiveKind(PROPOSED_QP),), num_networks=5, master_seed=1,
        )
        rows = {(r.sweep_value, r.variant): r.mean_solve_time for r in run_sweep(cfg).rows}
        assert rows[(30.0, "")] < rows[(50.0, "")] < rows[(70.0, "")]
        assert rows[(70.0, "cap=7")] < rows[(70.0, "")]
