import json
import math

import pytest

from fraccarleson import cli
from fraccarleson.oscquad import BudgetExceededError
from fraccarleson.records import load_manifest


def run(tmp_path, *args):
    return cli.main(list(args) + ["--out", str(tmp_path)])


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


class TestCommands:
    def test_multiplier_single_row(self, tmp_path):
        assert run(tmp_path, "multiplier-sweep", "--parity", "odd", "--eps", "0.8",
                   "--lambda", "0") == 0
        head, rows = read_csv(tmp_path / "multiplier_sweep.multiplier.csv")
        assert head == ["parity", "epsilon", "lambda", "re", "im", "err"]
        assert len(rows) == 1
        assert abs(complex(float(rows[0][3]), float(rows[0][4])) - 1j * math.pi / 0.8) < 1e-8

    def test_badset_exact_case(self, tmp_path):
        assert run(tmp_path, "badset", "--eps", "2", "--h", "0.5", "--xi", "-1",
                   "--threshold", "0.1") == 0
        _, rows = read_csv(tmp_path / "badset.badset.csv")
        assert float(rows[0][3]) == pytest.approx(4 / 15, abs=1e-3)

    def test_blowup_summary_recomputable(self, tmp_path):
        assert run(tmp_path, "blowup-probe", "--k-max", "6") == 0
        m = load_manifest(tmp_path / "blowup_probe.manifest.json")
        head, rows = read_csv(tmp_path / "blowup_probe.blowup.csv")
        rel = max(abs(float(r[2]) / float(r[3]) - 1) for r in rows)
        assert m["summary"]["max_relative_error"] == rel

    def test_plancherel(self, tmp_path):
        assert run(tmp_path, "plancherel-2d", "--fields", "2", "--n1", "16", "--n2", "16") == 0
        m = load_manifest(tmp_path / "plancherel_2d.manifest.json")
        assert m["summary"]["max_rel_diff"] < 1e-6
        assert m["tables"]["plancherel"]["rows"] == 6

    def test_json_format(self, tmp_path):
        assert run(tmp_path, "badset", "--format", "json", "--threshold", "0.1") == 0
        data = json.loads((tmp_path / "badset.badset.json").read_text())
        assert data["header"] == ["j", "h", "xi", "measure"]


class TestManifest:
    def test_fields(self, tmp_path):
        run(tmp_path, "badset", "--threshold", "0.1")
        m = load_manifest(tmp_path / "badset.manifest.json")
        assert {"tool", "version", "command", "status", "config", "tables", "summary",
                "duration_seconds"} <= set(m)
        assert m["config"]["threshold"] == 0.1 and m["config"]["seed"] == 0
        assert len(m["tables"]["badset"]["sha256"]) == 64

    def test_replay_identical(self, tmp_path, capsys):
        run(tmp_path, "single-scale", "--eps", "2", "--j-min", "-2", "--seed", "3")
        code = cli.main(["replay", str(tmp_path / "single_scale.manifest.json"),
                         "--out", str(tmp_path / "again")])
        assert code == 0
        assert "single_scale: identical" in capsys.readouterr().out

    def test_replay_detects_change(self, tmp_path):
        run(tmp_path, "badset", "--threshold", "0.1")
        path = tmp_path / "badset.manifest.json"
        m = load_manifest(path)
        m["tables"]["badset"]["sha256"] = "0" * 64
        path.write_text(json.dumps(m))
        assert cli.main(["replay", str(path), "--out", str(tmp_path / "r")]) == 1

    def test_env_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "envout"))
        assert cli.main(["badset", "--threshold", "0.1"]) == 0
        assert (tmp_path / "envout" / "badset.manifest.json").exists()


class TestConfig:
    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "c.yaml"
        cfg.write_text("eps: 2\nh: 0.9\nthreshold: 0.1\n")
        assert run(tmp_path, "badset", "--config", str(cfg), "--h", "0.5") == 0
        m = load_manifest(tmp_path / "badset.manifest.json")
        assert m["config"]["h"] == 0.5 and m["config"]["eps"] == 2.0

    def test_json_config(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"k-max": 5}))
        assert run(tmp_path, "blowup-probe", "--config", str(cfg)) == 0
        assert load_manifest(tmp_path / "blowup_probe.manifest.json")["config"]["k_max"] == 5

    def test_unknown_flag(self, tmp_path):
        assert run(tmp_path, "badset", "--bogus", "1") == 2

    def test_unknown_file_key(self, tmp_path, capsys):
        cfg = tmp_path / "c.yaml"
        cfg.write_text("colour: 3\n")
        assert run(tmp_path, "badset", "--config", str(cfg)) == 2
        assert "colour" in capsys.readouterr().err

    def test_invalid_value(self, tmp_path):
        assert run(tmp_path, "badset", "--h", "1.5") == 2
        assert run(tmp_path, "multiplier-sweep", "--parity", "sideways") == 2


class TestFailures:
    def test_numeric_failure_exit_one(self, tmp_path, monkeypatch):
        def boom(cfg):
            raise BudgetExceededError("panel budget exhausted", 0j, math.inf)
        monkeypatch.setitem(cli.RUNNERS, "blowup-probe", boom)
        assert run(tmp_path, "blowup-probe") == 1
        m = load_manifest(tmp_path / "blowup_probe.manifest.json")
        assert m["status"] == "failed" and "budget" in m["summary"]["error"]

    def test_partial_results_flagged(self, tmp_path, monkeypatch):
        from fraccarleson.records import Table
        monkeypatch.setitem(cli.RUNNERS, "blowup-probe",
                            lambda cfg: ({"blowup": Table(("k",), [(1,)])}, {}, False))
        assert run(tmp_path, "blowup-probe") == 1
        assert load_manifest(tmp_path / "blowup_probe.manifest.json")["status"] == "partial"
