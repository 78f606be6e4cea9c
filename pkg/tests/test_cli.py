import json

import pytest

from hopfnode.cli import CONFIG_VERSION, ExperimentConfig, main, run


def test_config_round_trip():
    cfg = ExperimentConfig("relief", options={"grid": 11})
    again = ExperimentConfig.loads(cfg.dumps())
    assert again == cfg and again.model().b == 0.3
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({**cfg.to_dict(), "version": "other/0"})
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({**cfg.to_dict(), "extra": 1})


def test_relief_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["relief", "--grid", "9", "--out", str(a)]) == 0
    assert main(["relief", "--grid", "9", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_report_detects_tampering(tmp_path, capsys):
    out = tmp_path / "sel.csv"
    assert main(["selftest", "--out", str(out)]) == 0
    manifest = tmp_path / "sel.manifest.json"
    data = json.loads(manifest.read_text())
    assert data["format"] == CONFIG_VERSION and data["passed"]
    assert main(["report", str(manifest)]) == 0
    out.write_text(out.read_text() + "tampered\n")
    assert main(["report", str(manifest)]) == 2
    manifest.write_text("{not json")
    assert main(["report", str(manifest)]) == 2
    capsys.readouterr()


def test_saved_config_replays(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    out = tmp_path / "air.csv"
    assert main(["airy", "eval", "--z", "1+1j", "--out", str(out), "--save-config", str(cfg_path)]) == 0
    first = out.read_bytes()
    out.unlink()
    assert main(["run", str(cfg_path)]) == 0
    assert out.read_bytes() == first


def test_entryexit_accepts_negative_sweep(tmp_path):
    out = tmp_path / "io.csv"
    assert main(["entryexit", "--sweep", "-0.4:-0.3:0.1", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 3


def test_unknown_command_in_config():
    with pytest.raises(ValueError):
        run(ExperimentConfig("nope"))
