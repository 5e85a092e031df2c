import json
import os

import pytest
import yaml

from skewlab.lab_8_archivist.core import FAILURE_MANIFEST_NAME, MANIFEST_NAME
from skewlab.main import build_parser, main


def write_config(tmp_path, payload, name="config.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(payload), encoding="utf-8")
    return str(path)


def test_list_experiments_prints_the_battery(capsys):
    assert main(["list-experiments"]) == 0
    out = capsys.readouterr().out
    for name in ("sample-fbm", "uniqueness", "regularity-scan", "regime-map"):
        assert name in out


def test_validate_exit_codes(tmp_path, capsys):
    good = write_config(tmp_path, {"experiment": "skew"})
    assert main(["validate", "--config", good]) == 0
    assert json.loads(capsys.readouterr().out)["ok"]

    bad = write_config(tmp_path, {"experiment": "invariant-suite", "young": {"p": 3.0, "q": 2.0, "eta": 0.5}},
                       "bad.yaml")
    assert main(["validate", "--config", bad]) == 1
    report = json.loads(capsys.readouterr().out)
    assert not report["ok"] and report["issues"][0]["loc"] == "young"


def test_run_success_and_seed_override(tmp_path):
    config = write_config(tmp_path, {"experiment": "regime-map", "seed": 1,
                                     "regime_map": {"h_values": [0.25], "beta_values": [0.0], "p": 1.0}})
    out = tmp_path / "run"
    assert main(["run", "--config", config, "--out", str(out), "--seed-override", "11"]) == 0
    with open(out / MANIFEST_NAME, encoding="utf-8") as f:
        manifest = json.load(f)
    assert manifest["config"]["seed"] == 11
    assert manifest["status"] == "success"


def test_run_exit_codes_for_threshold_misses_and_errors(tmp_path):
    few = write_config(tmp_path, {"experiment": "sample-fbm", "n_paths": 2, "grid": {"n_steps": 16}}, "few.yaml")
    assert main(["run", "--config", few, "--out", str(tmp_path / "few")]) == 2

    broken = write_config(tmp_path, {"experiment": "skew", "drift": {"variant": "dirac", "mass": "heavy"}},
                          "broken.yaml")
    out = tmp_path / "broken"
    assert main(["run", "--config", broken, "--out", str(out)]) == 1
    assert os.listdir(out) == [FAILURE_MANIFEST_NAME]


def test_relative_out_lives_under_the_output_root(tmp_path, isolated_output_root):
    config = write_config(tmp_path, {"experiment": "regime-map",
                                     "regime_map": {"h_values": [0.3], "beta_values": [-0.5], "p": 2.0}})
    assert main(["run", "--config", config, "--out", "maps/first"]) == 0
    assert os.path.exists(isolated_output_root / "maps" / "first" / MANIFEST_NAME)


def test_parser_requires_a_verb_and_positive_threads(tmp_path):
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
    config = write_config(tmp_path, {"experiment": "regime-map"})
    assert main(["run", "--config", config, "--out", str(tmp_path / "x"), "--threads", "0"]) == 1


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
