import copy
from pathlib import Path

import pytest
import yaml

from ringres.config import (
    DEFAULTS,
    build_config,
    config_hash,
    deep_merge,
    dump_defaults,
    load_config,
    load_document,
    validate_document,
)
from ringres.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def defaults_with(**sections):
    return deep_merge(DEFAULTS, sections)


class TestDeepMerge:
    def test_nested_values_are_merged(self):
        merged = deep_merge({"a": {"x": 1, "y": 2}, "b": 3}, {"a": {"y": 5}})
        assert merged == {"a": {"x": 1, "y": 5}, "b": 3}

    def test_lists_are_replaced(self):
        assert deep_merge({"a": [1, 2]}, {"a": [3]}) == {"a": [3]}

    def test_inputs_are_not_mutated(self):
        base = {"a": {"x": 1}}
        deep_merge(base, {"a": {"x": 2}})
        assert base == {"a": {"x": 1}}


class TestDefaults:
    def test_defaults_build(self):
        config = build_config(copy.deepcopy(DEFAULTS))
        assert len(config.grid.power_points) == 41
        assert len(config.grid.detuning_points) == 61
        assert config.grid.seeds == tuple(range(10))
        assert config.grid.size == 3 * 41 * 61
        assert config.modulation.node_count == 50
        assert config.capacity.k_max == 50
        assert config.pulsing.enabled is True

    def test_axis_endpoints_are_included(self):
        grid = build_config(copy.deepcopy(DEFAULTS)).grid
        assert (grid.power_points[0], grid.power_points[-1]) == (-20.0, 20.0)
        assert (grid.detuning_points[0], grid.detuning_points[-1]) == (-300.0, 300.0)
        assert 0.0 in grid.detuning_points

    def test_dump_round_trips(self):
        assert yaml.safe_load(dump_defaults()) == DEFAULTS

    def test_physical_params_for_a_point(self):
        config = build_config(copy.deepcopy(DEFAULTS))
        params = config.physical_params(1e-8, 5.0)
        assert params.carrier_lifetime == 1e-8
        assert params.pump_detuning == 5.0
        assert params.thermal_time == 5e-8


class TestValidation:
    def test_unknown_key_is_rejected(self):
        with pytest.raises(ConfigError) as excinfo:
            build_config(defaults_with(cavity={"radius": 5e-6}))
        assert len(excinfo.value.messages) == 1
        assert excinfo.value.messages[0].startswith("cavity:")
        assert "radius" in excinfo.value.messages[0]

    def test_every_violation_is_reported(self):
        document = defaults_with(
            modulation={"node_count": 0},
            readout={"folds": 1},
            sweep={"tasks": ["bogus"]},
        )
        assert len(validate_document(document)) == 3

    @pytest.mark.parametrize(
        "sections",
        [
            {"sweep": {"power_dbm": {"start": 0.0, "stop": 1.0, "step": 0.0}}},
            {"sweep": {"carrier_lifetimes": []}},
            {"capacity": {"orders": [4]}},
            {"tasks": {"radar": {"horizon": 3}}},
            {"feedback": {"amplitude_transmission": 1.5}},
        ],
    )
    def test_out_of_range_values(self, sections):
        with pytest.raises(ConfigError):
            build_config(defaults_with(**sections))

    def test_explicit_seed_list(self):
        config = build_config(defaults_with(sweep={"seeds": [3, 5]}))
        assert config.grid.seeds == (3, 5)


class TestConfigHash:
    def test_key_order_does_not_matter(self):
        assert config_hash({"a": 1, "b": {"c": 2}}) == config_hash({"b": {"c": 2}, "a": 1})

    def test_any_change_alters_hash(self):
        changed = defaults_with(modulation={"mask_seed": 1})
        assert config_hash(changed) != config_hash(DEFAULTS)

    def test_run_config_hashes_its_document(self):
        assert build_config(copy.deepcopy(DEFAULTS)).config_hash == config_hash(DEFAULTS)


class TestLoading:
    def test_no_path_gives_defaults(self):
        assert load_document() == DEFAULTS

    def test_file_is_merged_over_defaults(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("modulation:\n  node_count: 25\n", encoding="utf-8")
        document = load_document(path)
        assert document["modulation"]["node_count"] == 25
        assert document["modulation"]["symbol_rate"] == DEFAULTS["modulation"]["symbol_rate"]

    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        assert load_document(path) == DEFAULTS

    @pytest.mark.parametrize("text", ["- 1\n- 2\n", "sweep: [unclosed\n"])
    def test_malformed_files(self, tmp_path, text):
        path = tmp_path / "bad.yaml"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ConfigError):
            load_document(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_document(tmp_path / "absent.yaml")

    def test_coarse_grid(self):
        config = load_config(CONFIGS / "coarse.yaml")
        assert len(config.grid.power_points) == 9
        assert len(config.grid.detuning_points) == 13
        assert config.grid.seeds == (0, 1, 2)

    def test_equalize_cut(self):
        config = load_config(CONFIGS / "equalize_cut.yaml")
        assert config.grid.tasks == ("equalize",)
        assert config.log10_metrics == ("equalize",)
        assert config.task_options["equalize"]["snr_db"] == 32.0
