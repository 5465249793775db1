import csv

import pytest
import yaml

from ringres import cli
from ringres.cli import build_parser, main
from ringres.config import DEFAULTS
from ringres.sweep import SweepResult, runner
from ringres.sweep.emit import MANIFEST_NAME, RESULTS_NAME
from tests.reservoir_test_utils import tiny_document

POINT = ["--pin", "0", "--detuning", "0", "--tau-fc", "1e-8"]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("RINGRES_LOG_LEVEL", "RINGRES_WORKERS", "TELEMETRY_ENDPOINT"):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump(tiny_document()), encoding="utf-8")
    return path


class TestParser:
    def test_subcommand_is_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_unknown_task_is_rejected(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["task", "mnist", *POINT])

    def test_point_arguments(self):
        args = build_parser().parse_args(["capacity", *POINT, "--seed", "3"])
        assert (args.pin, args.detuning, args.tau_fc, args.seed) == (0.0, 0.0, 1e-8, 3)

    def test_cut_takes_several_lifetimes(self):
        args = build_parser().parse_args(
            ["cut", "--pin", "20", "--tau-fc", "1e-11", "2.5e-8", "--out", "x"]
        )
        assert args.tau_fc == [1e-11, 2.5e-8]


class TestConfigCommand:
    def test_dump_defaults(self, capsys):
        assert main(["config", "--dump-defaults"]) == 0
        assert yaml.safe_load(capsys.readouterr().out) == DEFAULTS

    def test_check_prints_merged_document(self, tiny_config, capsys):
        assert main(["config", "--check", str(tiny_config)]) == 0
        document = yaml.safe_load(capsys.readouterr().out)
        assert document["modulation"]["node_count"] == 10
        assert document["cavity"] == DEFAULTS["cavity"]

    def test_check_reports_invalid_file(self, tmp_path, caplog):
        path = tmp_path / "bad.yaml"
        path.write_text("modulation:\n  node_count: 0\n", encoding="utf-8")
        assert main(["config", "--check", str(path)]) == 1
        assert "modulation.node_count" in caplog.text


class TestSettings:
    def test_invalid_log_level_exits_with_2(self, clean_env, capsys):
        clean_env.setenv("RINGRES_LOG_LEVEL", "chatty")
        assert main(["config", "--dump-defaults"]) == 2
        assert "RINGRES_LOG_LEVEL" in capsys.readouterr().err


class TestCut:
    def test_cut_writes_results(self, tmp_path, tiny_config, monkeypatch):
        monkeypatch.setattr(
            runner, "_measure", lambda point, config: SweepResult(point=point, sigma_delta_nl=1e8)
        )
        out = tmp_path / "cut"
        code = main(
            ["cut", "--config", str(tiny_config), "--pin", "20", "--tau-fc", "1e-11", "1e-8",
             "--out", str(out)]
        )
        assert code == 0
        manifest = yaml.safe_load((out / MANIFEST_NAME).read_text())
        assert manifest["points"] == 2
        assert manifest["carrier_lifetimes"] == [1e-11, 1e-8]
        with (out / RESULTS_NAME).open() as handle:
            rows = list(csv.reader(handle))
        assert {row[1] for row in rows[1:]} == {"20"}
        assert {row[-2] for row in rows[1:]} == {"B"}


class TestTaskOverrides:
    def test_no_pulsing_keeps_other_probe_settings(self, tmp_path, monkeypatch, capsys):
        path = tmp_path / "run.yaml"
        path.write_text(
            yaml.safe_dump(
                tiny_document(sweep={"self_pulsing": {"enabled": True, "threshold": 0.2}})
            ),
            encoding="utf-8",
        )
        seen = []

        def fake_point(point, config):
            seen.append(config)
            return SweepResult(point=point, sigma_delta_nl=1.0)

        monkeypatch.setattr(cli, "evaluate_point", fake_point)
        code = main(
            ["task", "classify", "--config", str(path), *POINT, "--no-pulsing", "--seeds", "2"]
        )
        assert code == 0
        config = seen[0]
        assert config.pulsing.enabled is False
        assert config.pulsing.threshold == 0.2
        assert config.grid.seeds == (0, 1)
        assert config.grid.tasks == ("classify",)
        assert yaml.safe_load(capsys.readouterr().out)["status"] == "ok"


@pytest.mark.slow
class TestPointCommands:
    def test_task(self, tiny_config, capsys):
        assert main(["task", "narma10", "--config", str(tiny_config), *POINT]) == 0
        record = yaml.safe_load(capsys.readouterr().out)
        assert record["status"] == "ok"
        assert record["tasks"]["narma10"]["metric"] == "nmse"
        assert record["self_pulsing"] is None

    def test_capacity(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "capacity.csv"
        code = main(["capacity", "--config", str(tiny_config), *POINT, "--out", str(out)])
        assert code == 0
        report = yaml.safe_load(capsys.readouterr().out)
        assert set(report["orders"]) == {"c1", "c2", "c3"}
        assert report["mc"] >= 0.0
        assert out.read_text().startswith("order,k,C\n")

    def test_trace(self, tiny_config, tmp_path):
        out = tmp_path / "trace.csv"
        assert main(["trace", "--config", str(tiny_config), *POINT, "--out", str(out)]) == 0
        with out.open() as handle:
            rows = list(csv.reader(handle))
        # 220 training symbols of 10 nodes each
        assert len(rows) == 1 + 220 * 10

    def test_pulsing_disabled_by_config(self, tiny_config, capsys):
        assert main(["pulsing", "--config", str(tiny_config), *POINT]) == 0
        assert yaml.safe_load(capsys.readouterr().out) == {
            "self_pulsing": None,
            "oscillation_depth": None,
        }
