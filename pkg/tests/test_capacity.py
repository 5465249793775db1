"""Unit tests for the memory capacity measurement."""

import csv

import numpy as np
import pytest

from ringres.capacity import (
    CapacityReport,
    CapacitySettings,
    capacity,
    capacity_curves,
    legendre_target,
    rescale_input,
    total_memory_capacity,
)
from ringres.errors import PreconditionError
from ringres.config import build_config
from ringres.sweep import GridPoint, runner
from tests.reservoir_test_utils import SMALL_NODES, delay_line_states, tiny_document

TAPS = 10
WARMUP = 20
SETTINGS = CapacitySettings(k_max=20, lambda_grid=(1e-8,), folds=3)


@pytest.fixture
def drive():
    rng = np.random.default_rng(7)
    return rng.uniform(0.0, 0.5, 1020), rng.uniform(0.0, 0.5, 1020)


class TestLegendre:
    """Test Legendre targets."""

    def test_second_order_keeps_unnormalised_form(self):
        np.testing.assert_allclose(legendre_target(2, 0, [0.0, 1.0, -1.0, 0.5]), [-1, 2, 2, -0.25])

    def test_third_order(self):
        assert legendre_target(3, 0, [0.5])[0] == pytest.approx(-0.4375)

    def test_delay_pads_with_zeros(self):
        np.testing.assert_array_equal(legendre_target(1, 2, [1.0, 2.0, 3.0]), [0.0, 0.0, 1.0])

    @pytest.mark.parametrize("order, delay", [(4, 1), (1, -1)])
    def test_invalid_arguments(self, order, delay):
        with pytest.raises(PreconditionError):
            legendre_target(order, delay, [0.1])

    def test_rescale_maps_drive_onto_symmetric_range(self):
        np.testing.assert_allclose(rescale_input([0.0, 0.25, 0.5]), [-1.0, 0.0, 1.0])

    def test_targets_are_uncorrelated_for_uniform_drive(self):
        u = rescale_input(np.random.default_rng(11).uniform(0.0, 0.5, 100_000))
        terms = [(1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (3, 2), (1, 5)]
        targets = np.stack([legendre_target(i, k, u)[5:] for i, k in terms])
        rho = np.corrcoef(targets)
        off_diagonal = rho[~np.eye(len(terms), dtype=bool)]
        assert np.max(np.abs(off_diagonal)) < 0.02


class TestDelayLine:
    """Test capacities of an ideal delay-line reservoir."""

    def test_linear_capacity_counts_the_taps(self, drive):
        u_train, u_test = drive
        report = capacity_curves(
            delay_line_states(u_train, TAPS, WARMUP),
            delay_line_states(u_test, TAPS, WARMUP),
            u_train,
            u_test,
            WARMUP,
            SETTINGS,
        )
        assert report.sums[1] == pytest.approx(TAPS, abs=0.5)
        assert np.all(report.curves[1][:TAPS] > 0.99)
        assert np.all(report.curves[1][TAPS:] == 0.0)
        assert report.sums[2] + report.sums[3] < 1.0

    def test_single_capacity_matches_curve(self, drive):
        u_train, u_test = drive
        train = delay_line_states(u_train, TAPS, WARMUP)
        test = delay_line_states(u_test, TAPS, WARMUP)
        value = capacity(train, test, u_train, u_test, 1, 3, WARMUP, SETTINGS)
        assert value > 0.99

    def test_total_runs_both_segments(self, drive):
        u_train, u_test = drive
        calls = []

        def run_states(u, warmup):
            calls.append(u.size)
            return delay_line_states(u, TAPS, warmup)

        report = total_memory_capacity(run_states, u_train, u_test, WARMUP, SETTINGS)
        assert calls == [1020, 1020]
        assert report.total == pytest.approx(sum(report.sums.values()))
        assert report.noise_floor == pytest.approx(2.0 / np.sqrt(1000))

    def test_shuffled_drive_has_no_capacity(self, drive):
        u_train, u_test = drive
        rng = np.random.default_rng(3)
        report = capacity_curves(
            delay_line_states(u_train, TAPS, WARMUP),
            delay_line_states(u_test, TAPS, WARMUP),
            rng.permutation(u_train),
            rng.permutation(u_test),
            WARMUP,
            SETTINGS,
        )
        assert report.total == 0.0

    def test_misaligned_states_raise(self, drive):
        u_train, u_test = drive
        with pytest.raises(PreconditionError):
            capacity_curves(
                delay_line_states(u_train, TAPS, WARMUP)[1:],
                delay_line_states(u_test, TAPS, WARMUP),
                u_train,
                u_test,
                WARMUP,
                SETTINGS,
            )

    def test_k_max_must_be_positive(self, drive):
        u_train, u_test = drive
        states = delay_line_states(u_train, TAPS, WARMUP)
        with pytest.raises(PreconditionError):
            capacity_curves(states, states, u_train, u_train, WARMUP, CapacitySettings(k_max=0))


class TestCapacityReport:
    @pytest.fixture
    def report(self):
        return CapacityReport(
            curves={1: np.array([0.9, 0.5]), 2: np.array([0.25, 0.0])},
            k_max=2,
            noise_floor=0.1,
        )

    def test_sums(self, report):
        assert report.sums == pytest.approx({1: 1.4, 2: 0.25})
        assert report.total == pytest.approx(1.65)
        assert report.order_sum(3) is None

    def test_write_csv(self, report, tmp_path):
        path = report.write_csv(tmp_path / "nested" / "capacity.csv")
        with path.open() as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["order", "k", "C"]
        assert rows[1] == ["1", "1", "0.9"]
        assert rows[-1] == ["all", "sum", "1.65"]
        assert len(rows) == 1 + 4 + 2 + 1


@pytest.mark.slow
class TestRingReservoir:
    @pytest.mark.parametrize("power_dbm", [0.0, 15.0])
    def test_capacity_is_bounded_by_node_count(self, power_dbm):
        config = build_config(tiny_document(capacity={"k_max": 15}))
        params, modulation = runner.point_setup(config, GridPoint(1e-8, power_dbm, 0.0))
        report, trace = runner.capacity_run(config, params, modulation, 0, config.capacity_bias)
        for curve in report.curves.values():
            assert np.all((curve >= 0.0) & (curve <= 1.0))
        assert report.total <= SMALL_NODES + 0.5
        assert trace.samples.size > 0
