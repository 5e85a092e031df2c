import json
import os

import pandas as pd
import pytest

from skewlab import __version__
from skewlab.lab_8_archivist.core import (
    FAILURE_MANIFEST_NAME,
    MANIFEST_NAME,
    Lab8Archivist,
    compare_manifests,
    config_hash,
    load_manifest,
)
from skewlab.shared.errors import ConfigError
from skewlab.shared.utils import RunStatus

CONFIG = {"experiment": "skew", "hurst": 0.3, "grid": {"t_end": 1.0, "n_steps": 128}, "seed": 4}


def artifacts(value=0.5):
    return {"regression.csv": pd.DataFrame({"lag": [1.0, 2.0], "moment": [value, 2 * value]}),
            "report.json": {"passed": True, "value": value}}


def test_config_hash_ignores_key_order():
    shuffled = {"seed": 4, "grid": {"n_steps": 128, "t_end": 1.0}, "hurst": 0.3, "experiment": "skew"}
    assert config_hash(CONFIG) == config_hash(shuffled)
    assert config_hash(CONFIG) != config_hash({**CONFIG, "seed": 5})
    assert len(config_hash(CONFIG)) == 64


def test_manifest_lists_every_file_with_its_checksum(tmp_path):
    out = str(tmp_path / "run")
    manifest = Lab8Archivist().archive_run(out, CONFIG, artifacts(), {"exponent": 0.74}, RunStatus.SUCCESS, 1.5,
                                           {"label": "weak_exists"})
    assert manifest["version"] == __version__
    assert manifest["status"] == "success" and manifest["exit_code"] == 0
    assert set(manifest["files"]) == {"regression.csv", "report.json"}
    assert manifest["config_hash"] == config_hash(CONFIG)
    assert manifest["metrics"] == {"exponent": 0.74}
    assert "chi" in manifest["partition_spec"]
    assert load_manifest(out) == json.loads(json.dumps(manifest))
    assert not any(name.endswith(".tmp") for name in os.listdir(out))


def test_threshold_failure_keeps_artifacts_and_exit_code_two(tmp_path):
    manifest = Lab8Archivist().archive_run(str(tmp_path / "run"), CONFIG, artifacts(), {}, RunStatus.THRESHOLD_FAILURE,
                                           0.1)
    assert manifest["exit_code"] == 2
    assert os.path.exists(tmp_path / "run" / "regression.csv")


def test_same_artifacts_compare_identical(tmp_path):
    archivist = Lab8Archivist()
    a = archivist.archive_run(str(tmp_path / "a"), CONFIG, artifacts(), {}, RunStatus.SUCCESS, 1.0)
    b = archivist.archive_run(str(tmp_path / "b"), CONFIG, artifacts(), {}, RunStatus.SUCCESS, 2.0)
    report = compare_manifests(a, b)
    assert report["identical"] and report["same_config"]
    assert a["run_id"] != b["run_id"]

    c = archivist.archive_run(str(tmp_path / "c"), CONFIG, artifacts(0.25), {}, RunStatus.SUCCESS, 1.0)
    report = compare_manifests(a, c)
    assert not report["identical"]
    assert report["differing"] == ["regression.csv", "report.json"]


def test_failure_manifest_records_the_error_and_nothing_else(tmp_path):
    out = tmp_path / "failed"
    error = ConfigError("1 invalid field(s)", [{"loc": "drift.mass", "msg": "not a number"}])
    manifest = Lab8Archivist().archive_failure(str(out), CONFIG, error, 0.2)
    assert os.listdir(out) == [FAILURE_MANIFEST_NAME]
    assert manifest["exit_code"] == 1
    assert manifest["error"]["type"] == "ConfigError"
    assert manifest["error"]["issues"] == [{"loc": "drift.mass", "msg": "not a number"}]


def test_success_clears_a_stale_failure_manifest(tmp_path):
    out = str(tmp_path / "run")
    archivist = Lab8Archivist()
    archivist.archive_failure(out, None, RuntimeError("boom"), 0.0)
    archivist.archive_run(out, CONFIG, artifacts(), {}, RunStatus.SUCCESS, 1.0)
    assert sorted(os.listdir(out)) == [MANIFEST_NAME, "regression.csv", "report.json"]


def test_failure_replaces_an_earlier_successful_run(tmp_path):
    out = str(tmp_path / "run")
    archivist = Lab8Archivist()
    archivist.archive_run(out, CONFIG, artifacts(), {}, RunStatus.SUCCESS, 1.0)
    archivist.archive_failure(out, CONFIG, RuntimeError("diverged"), 0.3)
    assert os.listdir(out) == [FAILURE_MANIFEST_NAME]


def test_rerun_drops_files_the_new_run_does_not_write(tmp_path):
    out = str(tmp_path / "run")
    archivist = Lab8Archivist()
    archivist.archive_run(out, CONFIG, {**artifacts(), "extra.csv": pd.DataFrame({"x": [1.0]})}, {},
                          RunStatus.SUCCESS, 1.0)
    manifest = archivist.archive_run(out, CONFIG, artifacts(), {}, RunStatus.SUCCESS, 1.0)
    assert sorted(os.listdir(out)) == [MANIFEST_NAME, "regression.csv", "report.json"]
    assert set(manifest["files"]) == {"regression.csv", "report.json"}


def test_write_that_fails_halfway_leaves_nothing_behind(tmp_path):
    out = tmp_path / "run"
    broken = {**artifacts(), "zz_unserialisable.bin": 3.0}
    with pytest.raises(TypeError):
        Lab8Archivist().archive_run(str(out), CONFIG, broken, {}, RunStatus.SUCCESS, 1.0)
    assert os.listdir(out) == []


if __name__ == "__main__":
    test_config_hash_ignores_key_order()
    print("✅ archivist checks passed")
