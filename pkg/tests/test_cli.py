import json
from pathlib import Path

import jsonschema
import pytest
import yaml
from click.testing import CliRunner

import qngcoh.mc
from qngcoh.cli import main
from qngcoh.thresholds import ThresholdResult, ThresholdKind
from qngcoh.fock import FockPair, GaussianParams

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "src" / "qngcoh" / "schemas"


def validate(payload: dict, schema_name: str) -> None:
    schema = json.loads((SCHEMA_DIR / schema_name).read_text())
    jsonschema.Draft7Validator(schema).validate(payload)


@pytest.fixture
def runner():
    return CliRunner()


class TestThresholdsCommand:
    def test_classical_table(self, runner, tmp_path):
        out = tmp_path / "table.json"
        result = runner.invoke(main, ["thresholds", "--pair", "0,1",
                                      "--pair", "0,2", "--kind", "classical",
                                      "--out", str(out)])
        assert result.exit_code == 0
        payload = json.loads(out.read_text())
        validate(payload, "threshold_table.schema.json")
        assert payload["results"]["0,1"]["classical"]["value"] == pytest.approx(
            0.8578, abs=1e-4)
        assert payload["manifest"]["command"] == "thresholds"

    def test_empty_pairs_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, ["thresholds", "--out",
                                      str(tmp_path / "t.json")])
        assert result.exit_code == 1
        assert "usage error" in result.output

    def test_bad_pair_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, ["thresholds", "--pair", "banana",
                                      "--out", str(tmp_path / "t.json")])
        assert result.exit_code == 1

    def test_reproducible_output(self, runner, tmp_path):
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            runner.invoke(main, ["thresholds", "--pair", "0,1", "--kind",
                                 "classical", "--out", str(out)])
            payload = json.loads(out.read_text())
            payload["manifest"].pop("wall_time_s")
            outs.append(payload)
        assert outs[0] == outs[1]


class TestCertifyCommand:
    def test_published_row_04(self, runner, tmp_path):
        out = tmp_path / "cert.json"
        result = runner.invoke(main, ["certify", "--pair", "0,4",
                                      "--measured", "0.84",
                                      "--uncertainty", "0.04",
                                      "--max-fock", "6",
                                      "--out", str(out)])
        assert result.exit_code == 0
        payload = json.loads(out.read_text())
        validate(payload, "certification.schema.json")
        genuine = payload["kinds"]["genuine"]
        assert genuine["verdict"] is True
        assert genuine["depth"] == pytest.approx(0.01, abs=0.01)

    def test_marginal_row_06(self, runner, tmp_path):
        out = tmp_path / "cert.json"
        result = runner.invoke(main, ["certify", "--pair", "0,6",
                                      "--measured", "0.80",
                                      "--uncertainty", "0.05",
                                      "--max-fock", "6",
                                      "--out", str(out)])
        payload = json.loads(out.read_text())
        assert payload["kinds"]["genuine"]["marginal"] is True
        assert result.exit_code in (0, 3)  # margin straddles zero

    def test_domain_error(self, runner, tmp_path):
        result = runner.invoke(main, ["certify", "--pair", "0,1",
                                      "--measured", "1.5",
                                      "--out", str(tmp_path / "c.json")])
        assert result.exit_code == 1
        assert "domain error" in result.output

    def test_all_false_exit_code(self, runner, tmp_path):
        out = tmp_path / "cert.json"
        result = runner.invoke(main, ["certify", "--pair", "0,1",
                                      "--measured", "0.1",
                                      "--out", str(out)])
        assert result.exit_code == 3


class TestSimulateCommand:
    def test_ideal_scan(self, runner, tmp_path):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text(yaml.safe_dump({
            "pairs": [[0, 2]], "delays": [0.0], "phases": 12, "seed": 1,
            "kind": "genuine"}))
        out_dir = tmp_path / "out"
        result = runner.invoke(main, ["simulate", "--config", str(cfg),
                                      "--out", str(out_dir)])
        assert result.exit_code == 0
        payload = json.loads((out_dir / "summary.json").read_text())
        validate(payload, "simulation_summary.schema.json")
        assert payload["scans"]["0,2"][0]["contrast"] == pytest.approx(
            1.0, abs=1e-6)
        fringes = (out_dir / "fringes_0_2.csv").read_text().splitlines()
        assert fringes[0] == "delay_s,phase_rad,p_excited"
        assert len(fringes) == 1 + 12
        depths = (out_dir / "depth_0_2.csv").read_text().splitlines()
        assert depths[0] == "delay_s,contrast,depth"

    def test_depth_ratio_04_vs_06(self, runner, tmp_path):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text(yaml.safe_dump({
            "pairs": [[0, 4], [0, 6]], "delays": [0.0], "phases": 12,
            "seed": 1, "kind": "genuine"}))
        out_dir = tmp_path / "out"
        result = runner.invoke(main, ["simulate", "--config", str(cfg),
                                      "--out", str(out_dir)])
        assert result.exit_code == 0
        payload = json.loads((out_dir / "summary.json").read_text())
        d4 = payload["scans"]["0,4"][0]["depth"]
        d6 = payload["scans"]["0,6"][0]["depth"]
        assert d4 / d6 == pytest.approx(2.0, abs=0.6)

    def test_config_error(self, runner, tmp_path):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text(yaml.safe_dump({"delays": [0.0]}))
        result = runner.invoke(main, ["simulate", "--config", str(cfg),
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 1
        assert "config error" in result.output

    def test_failing_delay_identified(self, runner, tmp_path):
        # undersized truncation with strong heating trips the tail guard
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text(yaml.safe_dump({
            "pair": [0, 1], "delays": [0.0, 0.05],
            "noise": {"heating_rate": 400.0}, "phases": 8, "seed": 1}))
        result = runner.invoke(main, ["simulate", "--config", str(cfg),
                                      "--out", str(tmp_path / "o"),
                                      "--trunc-dim", "8"])
        assert result.exit_code == 2
        assert "0.05" in result.output

    def test_unknown_noise_key_rejected(self, runner, tmp_path):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text(yaml.safe_dump({
            "pair": [0, 1], "delays": [0.0], "noise": {"bogus": 1.0}}))
        result = runner.invoke(main, ["simulate", "--config", str(cfg),
                                      "--out", str(tmp_path / "o")])
        assert result.exit_code == 1


class TestMcVerifyCommand:
    def test_sound_threshold(self, runner, tmp_path):
        out = tmp_path / "mc.json"
        result = runner.invoke(main, ["mc-verify", "--kind", "classical",
                                      "--pair", "0,1", "--samples", "2000",
                                      "--seed", "7", "--out", str(out)])
        assert result.exit_code == 0
        payload = json.loads(out.read_text())
        validate(payload, "mc_report.schema.json")
        assert payload["violations"] == 0

    def test_violations_exit_code(self, runner, tmp_path, monkeypatch):
        # force an artificially low threshold to exercise the blocker path
        def fake_threshold(kind, pair, max_fock=10):
            return ThresholdResult(kind=ThresholdKind.CLASSICAL,
                                   pair=FockPair(0, 1), value=0.5,
                                   argmax=GaussianParams())

        monkeypatch.setattr(qngcoh.mc, "threshold", fake_threshold)
        result = runner.invoke(main, ["mc-verify", "--kind", "classical",
                                      "--pair", "0,1", "--samples", "2000",
                                      "--seed", "7",
                                      "--out", str(tmp_path / "mc.json")])
        assert result.exit_code == 4
        assert "SOUNDNESS FAILURE" in result.output

    def test_sample_floor_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, ["mc-verify", "--kind", "classical",
                                      "--pair", "0,1", "--samples", "10",
                                      "--out", str(tmp_path / "mc.json")])
        assert result.exit_code == 1
