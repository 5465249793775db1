import csv
import json
import math

import numpy as np
import pytest
import yaml

from ringres.cavity.state import DetuningTrace
from ringres.config import build_config
from ringres.errors import ConfigError, IntegrationError, PreconditionError
from ringres.sweep import (
    CapacitySummary,
    GridPoint,
    SweepGrid,
    SweepResult,
    TaskSummary,
    axis_points,
    classify_region,
    dbm_to_watts,
    ghz_to_rad_per_s,
    sigma_delta_nl,
)
from ringres.sweep import runner
from ringres.sweep.checkpoint import CheckpointStore
from ringres.sweep.emit import (
    FAILED,
    LONG_HEADER,
    MANIFEST_NAME,
    MATRIX_CORNER,
    RESULTS_NAME,
    emit_results,
    long_rows,
    matrices,
    matrix_name,
)
from ringres.tasks.base import Split
from ringres.tasks.channel import gen_channel_equalization
from ringres.tasks.evaluation import EvaluationSettings, evaluate_task
from tests.reservoir_test_utils import tiny_document

TAU = 1.0e-8


def make_result(power=0.0, detuning=0.0, nmse=0.2, sigma=5.0e6, **changes):
    result = SweepResult(
        point=GridPoint(TAU, power, detuning),
        tasks={
            "narma10": TaskSummary(
                metric="nmse",
                per_seed=(nmse, nmse),
                bias=(0.5, 0.6),
                ridge_lambda=(1e-8, 1e-6),
                subsets=((nmse,), (nmse,)),
            )
        },
        capacity=CapacitySummary(orders={1: 8.0, 2: 1.5, 3: 0.5}, per_seed=(9.0, 11.0)),
        sigma_delta_nl=sigma,
        oscillation_depth=0.01,
        self_pulsing=False,
        wall_time=1.25,
    )
    return SweepResult(**{**result.__dict__, **changes}).with_region()


def failed_result(power=0.0, detuning=0.0):
    return SweepResult(point=GridPoint(TAU, power, detuning), status="failed", error="boom")


def small_config(**sweep):
    return build_config(tiny_document(sweep=sweep))


def read_csv(path):
    with path.open(newline="") as handle:
        return list(csv.reader(handle))


class TestGrid:
    def test_range_includes_both_ends(self):
        assert axis_points({"start": -1.0, "stop": 1.0, "step": 0.5}) == (-1.0, -0.5, 0.0, 0.5, 1.0)

    def test_list_is_taken_verbatim(self):
        assert axis_points([3, 1]) == (3.0, 1.0)

    def test_reversed_range_raises(self):
        with pytest.raises(ConfigError):
            axis_points({"start": 1.0, "stop": 0.0, "step": 0.5})

    def test_unit_conversions(self):
        assert dbm_to_watts(0.0) == pytest.approx(1e-3)
        assert dbm_to_watts(20.0) == pytest.approx(0.1)
        assert ghz_to_rad_per_s(1.0) == pytest.approx(2 * math.pi * 1e9)

    def test_points_are_lifetime_major(self):
        grid = SweepGrid((0.0, 5.0), (-1.0, 1.0), carrier_lifetimes=(1e-11, 1e-8), seeds=(0,))
        points = list(grid.points())
        assert len(points) == grid.size == 8
        assert points[0] == GridPoint(1e-11, 0.0, -1.0)
        assert points[1] == GridPoint(1e-11, 0.0, 1.0)
        assert points[4].carrier_lifetime == 1e-8

    def test_keys_are_unique(self):
        grid = SweepGrid((0.0, 5.0), (-1.0, 1.0))
        assert len({p.key for p in grid.points()}) == grid.size

    def test_invalid_grid(self):
        with pytest.raises(ConfigError) as excinfo:
            SweepGrid((), (0.0,), tasks=("nonsense",))
        assert len(excinfo.value.messages) == 2

    def test_pinned_power(self):
        grid = SweepGrid((0.0, 5.0), (0.0,)).with_power(20)
        assert grid.power_points == (20.0,)


class TestRegions:
    @pytest.mark.parametrize(
        "changes, expected",
        [
            ({"sigma_delta_nl": 1e6}, "A"),
            ({"sigma_delta_nl": 1e7}, "B"),
            ({"sigma_delta_nl": 1e9, "self_pulsing": True}, "C"),
            ({"sigma_delta_nl": None}, "unclassified"),
            ({"sigma_delta_nl": float("nan")}, "unclassified"),
            ({"status": "failed"}, "unclassified"),
        ],
    )
    def test_classification(self, changes, expected):
        row = SweepResult(point=GridPoint(TAU, 0.0, 0.0), **changes)
        assert classify_region(row) == expected

    def test_custom_threshold(self):
        row = SweepResult(point=GridPoint(TAU, 0.0, 0.0), sigma_delta_nl=5e7)
        assert classify_region(row, 1e8) == "A"

    def test_sigma_is_population_std(self):
        trace = DetuningTrace(np.array([1.0, 3.0, 1.0, 3.0]), 1e-12)
        assert sigma_delta_nl(trace) == pytest.approx(1.0)

    def test_sigma_of_empty_trace_raises(self):
        with pytest.raises(PreconditionError):
            sigma_delta_nl(DetuningTrace(np.zeros(0), 1e-12))


class TestResults:
    def test_summary_statistics(self):
        summary = TaskSummary(metric="nmse", per_seed=(0.1, 0.3))
        assert summary.mean == pytest.approx(0.2)
        assert summary.std == pytest.approx(0.1)
        assert TaskSummary(metric="nmse", per_seed=()).mean is None

    def test_record_survives_json(self):
        result = make_result()
        restored = SweepResult.from_record(json.loads(json.dumps(result.to_record())))
        assert restored == result


class TestCheckpoint:
    def test_fresh_store_writes_header(self, tmp_path):
        store = CheckpointStore(tmp_path / "ck.jsonl", "abc")
        assert len(store) == 0
        assert json.loads(store.path.read_text().splitlines()[0]) == {"config_hash": "abc"}

    def test_resume_reloads_results(self, tmp_path):
        path = tmp_path / "ck.jsonl"
        store = CheckpointStore(path, "abc")
        result = make_result(power=5.0)
        store.append(result)
        reloaded = CheckpointStore(path, "abc")
        assert result.point.key in reloaded
        assert reloaded.completed()[result.point.key] == result

    def test_no_resume_starts_over(self, tmp_path):
        path = tmp_path / "ck.jsonl"
        CheckpointStore(path, "abc").append(make_result())
        assert len(CheckpointStore(path, "abc", resume=False)) == 0
        assert len(path.read_text().splitlines()) == 1

    def test_other_configuration_is_refused(self, tmp_path):
        path = tmp_path / "ck.jsonl"
        CheckpointStore(path, "abc").append(make_result())
        with pytest.raises(ConfigError, match="without --resume"):
            CheckpointStore(path, "def")

    def test_torn_line_is_dropped(self, tmp_path, caplog):
        path = tmp_path / "ck.jsonl"
        CheckpointStore(path, "abc").append(make_result())
        with path.open("a") as handle:
            handle.write('{"carrier_lifetime": 1e-8, "pow')
        store = CheckpointStore(path, "abc")
        assert len(store) == 1
        assert "Ignoring unreadable checkpoint line 3" in caplog.text
        assert len(path.read_text().splitlines()) == 2
        store.append(make_result(power=5.0))
        assert len(CheckpointStore(path, "abc")) == 2

    def test_garbage_header_is_refused(self, tmp_path):
        path = tmp_path / "ck.jsonl"
        path.write_text("not json\n")
        with pytest.raises(ConfigError):
            CheckpointStore(path, "abc")


class TestLongRows:
    def test_one_row_per_quantity(self):
        rows = long_rows([make_result()], ("narma10", "capacity"))
        assert [(r[3], r[4]) for r in rows] == [
            ("narma10", "nmse"),
            ("capacity", "c1"),
            ("capacity", "c2"),
            ("capacity", "c3"),
            ("capacity", "mc"),
            ("detuning", "sigma_delta_nl_hz"),
        ]
        assert all(len(r) == len(LONG_HEADER) for r in rows)
        narma = rows[0]
        assert narma[:3] == ["1e-08", "0", "0"]
        assert narma[5:10] == ["0.2", "0", "0.2;0.2", "0.5;0.6", "1e-08;1e-06"]
        assert narma[10:] == ["5000000", "0.01", "false", "A", "ok"]
        assert rows[4][5:8] == ["10", "1", "9;11"]

    def test_failed_point_has_sentinel_rows(self):
        rows = long_rows([failed_result()], ("narma10", "capacity"))
        assert [(r[3], r[4], r[5]) for r in rows] == [
            ("narma10", FAILED, FAILED),
            ("capacity", "mc", FAILED),
            ("detuning", "sigma_delta_nl_hz", FAILED),
        ]
        assert all(r[-2:] == ["unclassified", "failed"] for r in rows)
        assert all(len(r) == len(LONG_HEADER) for r in rows)

    def test_extras_follow_their_task(self):
        result = make_result()
        summary = TaskSummary(metric="accuracy", per_seed=(0.9,), extras={"waveform_accuracy": 1.0})
        result = SweepResult(**{**result.__dict__, "tasks": {"classify": summary}})
        rows = long_rows([result], ("classify",))
        assert [(r[3], r[4]) for r in rows][:2] == [
            ("classify", "accuracy"),
            ("classify", "waveform_accuracy"),
        ]


def grid_results():
    """2 x 2 grid of finished points at one lifetime."""
    return [
        make_result(0.0, -10.0, nmse=0.1),
        make_result(0.0, 10.0, nmse=0.2),
        make_result(5.0, -10.0, nmse=0.3),
        make_result(5.0, 10.0, nmse=0.4),
    ]


class TestMatrices:
    def test_power_rows_by_detuning_columns(self):
        table = matrices(grid_results())[("narma10", TAU)]
        assert table == [
            [MATRIX_CORNER, "-10", "10"],
            ["0", "0.1", "0.2"],
            ["5", "0.3", "0.4"],
        ]

    def test_quantities_present(self):
        names = {quantity for quantity, _ in matrices(grid_results())}
        assert names == {"narma10", "c1", "c2", "c3", "mc", "sigma_delta_nl", "region"}

    def test_failed_cells(self):
        results = grid_results()
        results[3] = failed_result(5.0, 10.0)
        tables = matrices(results)
        assert tables[("narma10", TAU)][2] == ["5", "0.3", FAILED]
        assert tables[("region", TAU)][2] == ["5", "A", "unclassified"]

    def test_log10_cells(self):
        results = grid_results()
        results[0] = make_result(0.0, -10.0, nmse=0.0)
        tables = matrices(results, ["narma10"])
        assert ("narma10", TAU) not in tables
        table = tables[("log10_narma10", TAU)]
        assert table[1][1] == "-inf"
        assert float(table[2][2]) == pytest.approx(math.log10(0.4))

    def test_empty(self):
        assert matrices([]) == {}

    def test_matrix_name_keeps_lifetimes_apart(self):
        assert matrix_name("mc", 2.5e-8) != matrix_name("mc", 2e-8)
        assert matrix_name("mc", 1e-8) == "matrix_mc_tau1e-08.csv"


class TestEmit:
    def test_writes_tables_and_manifest(self, tmp_path):
        config = small_config(power_dbm=[0.0, 5.0], detuning_ghz=[-10.0, 10.0], seeds=2)
        results = grid_results()
        written = emit_results(results, tmp_path, config)
        names = {p.name for p in written}
        assert RESULTS_NAME in names
        assert MANIFEST_NAME in names
        assert matrix_name("narma10", TAU) in names
        rows = read_csv(tmp_path / RESULTS_NAME)
        assert rows[0] == list(LONG_HEADER)
        assert len(rows) == 1 + 4 * 6
        manifest = yaml.safe_load((tmp_path / MANIFEST_NAME).read_text())
        assert manifest["config_hash"] == config.config_hash
        assert manifest["points"] == 4
        assert manifest["failed_points"] == 0
        assert manifest["seeds"] == [0, 1]

    def test_output_is_reproducible(self, tmp_path):
        config = small_config(power_dbm=[0.0, 5.0], detuning_ghz=[-10.0, 10.0])
        results = grid_results()
        first = {p.name: p.read_bytes() for p in emit_results(results, tmp_path / "a", config)}
        second = {p.name: p.read_bytes() for p in emit_results(results, tmp_path / "b", config)}
        assert first == second

    def test_empty_sweep(self, tmp_path):
        written = emit_results([], tmp_path, small_config())
        assert read_csv(tmp_path / RESULTS_NAME) == [list(LONG_HEADER)]
        assert len(written) == 2


class TestRunner:
    def test_point_setup(self):
        config = small_config()
        point = GridPoint(2.5e-8, 10.0, 50.0)
        params, modulation = runner.point_setup(config, point)
        assert params.carrier_lifetime == 2.5e-8
        assert params.pump_detuning == pytest.approx(point.detuning_rad_s)
        assert modulation.average_power == pytest.approx(1e-2)
        assert modulation.pump_detuning == params.pump_detuning

    def test_pulsing_probe_can_be_disabled(self):
        config = small_config()
        point = GridPoint(TAU, 0.0, 0.0)
        params, _ = runner.point_setup(config, point)
        assert runner.probe_self_pulsing(config, params, point) == (None, None)

    def test_integration_failure_gives_failed_row(self, monkeypatch):
        def diverge(point, config):
            raise IntegrationError(1e-9, "carrier_density")

        monkeypatch.setattr(runner, "_measure", diverge)
        result = runner.evaluate_point(GridPoint(TAU, 0.0, 0.0), small_config())
        assert result.failed
        assert result.region == "unclassified"
        assert "carrier_density" in result.error

    def test_unbuildable_task_fails_before_running(self, tmp_path):
        config = small_config(tasks=["radar"])
        with pytest.raises(ConfigError):
            runner.run_sweep(config, tmp_path)
        assert not (tmp_path / runner.CHECKPOINT_NAME).exists()

    def test_negative_power_gives_failed_row(self, monkeypatch):
        def negative_level(point, config):
            raise PreconditionError("level -0.0207 at sample 4 is a negative optical power", 4)

        monkeypatch.setattr(runner, "_measure", negative_level)
        result = runner.evaluate_point(GridPoint(TAU, 0.0, 0.0), small_config())
        assert result.failed
        assert "negative optical power" in result.error

    def test_failed_point_does_not_stop_the_sweep(self, tmp_path, monkeypatch):
        def measure(point, config):
            if point.power_dbm > 0.0:
                raise PreconditionError("level -0.5 at sample 0 is a negative optical power", 0)
            return SweepResult(point=point, sigma_delta_nl=1.0)

        monkeypatch.setattr(runner, "_measure", measure)
        results = runner.run_sweep(small_config(power_dbm=[0.0, 5.0]), tmp_path)
        assert [r.status for r in results] == ["ok", "failed"]

    @pytest.mark.parametrize("tasks", [["capacity"], ["narma10"], ["detuning", "capacity"]])
    def test_narma_without_test_rows_is_rejected(self, tmp_path, tasks):
        config = build_config(
            tiny_document(tasks={"narma10": {"test": 0}}, sweep={"tasks": tasks})
        )
        with pytest.raises(ConfigError) as info:
            runner.run_sweep(config, tmp_path)
        assert "tasks.narma10.test" in str(info.value)
        assert not (tmp_path / runner.CHECKPOINT_NAME).exists()

    def test_detuning_alone_needs_no_test_rows(self):
        config = build_config(
            tiny_document(tasks={"narma10": {"test": 0}}, sweep={"tasks": ["detuning"]})
        )
        runner.check_tasks(config)

    def test_resumed_sweep_writes_identical_files(self, tmp_path, monkeypatch):
        def measure(point, config):
            nmse = 0.1 + point.power_dbm / 100.0 + point.detuning_ghz / 1000.0
            return SweepResult(
                point=point,
                tasks={
                    "narma10": TaskSummary(
                        metric="nmse",
                        per_seed=(nmse,),
                        bias=(0.5,),
                        ridge_lambda=(1e-6,),
                        subsets=((nmse,),),
                    )
                },
                sigma_delta_nl=1.0e6 * (1.0 + abs(point.detuning_ghz)),
            )

        calls = []

        def interrupted(point, config):
            if len(calls) == 2:
                raise KeyboardInterrupt
            calls.append(point)
            return measure(point, config)

        config = small_config(power_dbm=[0.0, 5.0], detuning_ghz=[-10.0, 10.0])
        whole, resumed = tmp_path / "whole", tmp_path / "resumed"

        monkeypatch.setattr(runner, "_measure", measure)
        emit_results(runner.run_sweep(config, whole), whole, config)

        monkeypatch.setattr(runner, "_measure", interrupted)
        with pytest.raises(KeyboardInterrupt):
            runner.run_sweep(config, resumed)
        assert len(CheckpointStore(resumed / runner.CHECKPOINT_NAME, config.config_hash, True)) == 2

        monkeypatch.setattr(runner, "_measure", measure)
        written = emit_results(runner.run_sweep(config, resumed, resume=True), resumed, config)
        for path in written:
            assert path.read_bytes() == (whole / path.name).read_bytes(), path.name

    def test_resume_skips_finished_points(self, tmp_path, monkeypatch):
        calls = []

        def measure(point, config):
            calls.append(point)
            return SweepResult(point=point, sigma_delta_nl=1.0)

        monkeypatch.setattr(runner, "_measure", measure)
        config = small_config(power_dbm=[0.0, 5.0], detuning_ghz=[-10.0, 10.0])
        first = runner.run_sweep(config, tmp_path)
        assert len(calls) == 4
        assert [r.point for r in first] == list(config.grid.points())
        assert all(r.region == "A" for r in first)

        second = runner.run_sweep(config, tmp_path, resume=True)
        assert len(calls) == 4
        assert [r.point for r in second] == [r.point for r in first]

    def test_resume_with_other_config_is_refused(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            runner, "_measure", lambda point, config: SweepResult(point=point, sigma_delta_nl=1.0)
        )
        runner.run_sweep(small_config(), tmp_path)
        with pytest.raises(ConfigError):
            runner.run_sweep(small_config(seeds=2), tmp_path, resume=True)

    @pytest.mark.slow
    def test_tiny_sweep_end_to_end(self, tmp_path):
        config = build_config(
            tiny_document(sweep={"tasks": ["narma10", "capacity"], "seeds": [0, 1]})
        )
        results = runner.run_sweep(config, tmp_path)
        assert len(results) == 1
        result = results[0]
        assert result.status == "ok"
        assert len(result.tasks["narma10"].per_seed) == 2
        assert result.capacity is not None
        assert result.capacity.total >= 0.0
        assert result.sigma_delta_nl >= 0.0
        assert result.region in ("A", "B")
        assert result.self_pulsing is None

        emit_results(results, tmp_path, config)
        rows = read_csv(tmp_path / RESULTS_NAME)
        assert {row[3] for row in rows[1:]} == {"narma10", "capacity", "detuning"}

    @pytest.mark.slow
    def test_detuning_only_sweep(self, tmp_path):
        config = build_config(tiny_document(sweep={"tasks": ["detuning"]}))
        result = runner.run_sweep(config, tmp_path)[0]
        assert result.tasks == {}
        assert result.capacity is None
        assert result.sigma_delta_nl >= 0.0

    @pytest.mark.slow
    def test_worker_count_does_not_change_results(self, tmp_path):
        config = build_config(tiny_document(sweep={"power_dbm": [0.0, 5.0]}))
        serial, pooled = tmp_path / "serial", tmp_path / "pooled"
        emit_results(runner.run_sweep(config, serial, workers=1), serial, config)
        written = emit_results(runner.run_sweep(config, pooled, workers=2), pooled, config)
        for path in written:
            assert path.read_bytes() == (serial / path.name).read_bytes(), path.name


@pytest.mark.slow
class TestOperatingRegions:
    """Qualitative trends across the (power, detuning, tau_fc) plane on reduced grids."""

    def test_detuning_spread_collapses_far_from_resonance(self):
        config = build_config(tiny_document(sweep={"tasks": ["detuning"]}))

        def spread(power_dbm, detuning_ghz):
            params, modulation = runner.point_setup(config, GridPoint(TAU, power_dbm, detuning_ghz))
            return sigma_delta_nl(runner._detuning_run(config, params, modulation, 0))

        hot = spread(10.0, 0.0)
        assert spread(-20.0, 300.0) * 1e3 <= hot
        assert spread(-20.0, -300.0) * 1e3 <= hot

    def test_fast_carriers_reach_at_least_the_same_memory(self):
        config = build_config(
            tiny_document(
                tasks={"narma10": {"warmup": 50, "train": 600, "test": 400}},
                capacity={"k_max": 15},
                sweep={"tasks": ["capacity"]},
            )
        )

        def best_capacity(carrier_lifetime):
            totals = []
            for power_dbm in (10.0, 15.0, 20.0):
                for detuning_ghz in (-50.0, 0.0, 50.0):
                    point = GridPoint(carrier_lifetime, power_dbm, detuning_ghz)
                    params, modulation = runner.point_setup(config, point)
                    try:
                        report, _ = runner.capacity_run(
                            config, params, modulation, 0, config.capacity_bias
                        )
                    except IntegrationError:
                        continue
                    totals.append(report.total)
            return max(totals, default=0.0)

        assert best_capacity(1e-11) >= best_capacity(2.5e-8)

    def test_high_power_equalizes_at_least_as_well(self):
        config = build_config(tiny_document(modulation={"symbol_rate": 1.0e9, "node_count": 50}))
        dataset = gen_channel_equalization(seed=0, split=Split(warmup=100, train=2000, test=2000))
        settings = EvaluationSettings(bias_grid=(0.5,), lambda_grid=(1e-8, 1e-6, 1e-4), folds=3)

        def best_ser(power_dbm):
            values = []
            for detuning_ghz in (-100.0, -50.0, 0.0, 50.0, 100.0):
                params, modulation = runner.point_setup(
                    config, GridPoint(1e-11, power_dbm, detuning_ghz)
                )
                try:
                    values.append(evaluate_task(dataset, params, modulation, 0, settings).value)
                except IntegrationError:
                    continue
            return min(values, default=1.0)

        assert best_ser(20.0) <= best_ser(-20.0)
