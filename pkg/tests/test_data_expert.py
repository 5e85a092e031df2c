import hashlib
import json
import os

import numpy as np
import pandas as pd
import pytest

from skewlab.shared.data_expert import DataExpert
from skewlab.shared.errors import DomainError


def test_path_frame_is_long_format():
    t = np.linspace(0.0, 1.0, 5)
    frame = DataExpert.path_frame(np.vstack([t, 2 * t]), t)
    assert list(frame.columns) == ["path_id", "t", "value"]
    assert len(frame) == 10
    assert frame["path_id"].tolist() == [0] * 5 + [1] * 5
    assert frame["value"].iloc[-1] == 2.0


def test_space_time_frame_keeps_strided_rows_and_the_last():
    t = np.linspace(0.0, 1.0, 11)
    x = np.array([-1.0, 0.0, 1.0])
    values = np.outer(t, np.ones(3))
    frame = DataExpert.space_time_frame(t, x, values, "L", time_stride=4)
    assert list(frame.columns) == ["t", "x", "L"]
    assert sorted(set(frame["t"])) == [t[0], t[4], t[8], t[10]]
    assert len(frame) == 4 * 3


def test_csv_keeps_full_precision():
    text = DataExpert.csv_bytes(pd.DataFrame({"x": [0.1], "value": [1.0 / 3.0]})).decode()
    assert text.splitlines() == ["x,value", "0.10000000000000001,0.33333333333333331"]
    assert "\r" not in text


def test_json_report_is_sorted_and_labels_non_finite_values():
    payload = json.loads(DataExpert.json_bytes({"b": float("inf"), "a": [1.0, float("nan")], "c": np.float64(2.5)}))
    assert payload == {"a": [1.0, "nan"], "b": "inf", "c": 2.5}
    raw = DataExpert.json_bytes({"b": 1, "a": 2}).decode()
    assert raw.index('"a"') < raw.index('"b"')


def test_path_block_restores_metadata_and_values(tmp_path):
    values = np.cumsum(np.random.default_rng(3).standard_normal(65))
    path = str(tmp_path / "path.bin")
    DataExpert.atomic_write(path, DataExpert.path_block_bytes(values, 2.0, 0.3, 42))
    meta, restored = DataExpert.read_path_block(path)
    assert meta == {"n_steps": 64, "t_end": 2.0, "hurst": 0.3, "seed": 42}
    assert restored.tobytes() == values.tobytes()


def test_truncated_path_block_is_rejected(tmp_path):
    path = str(tmp_path / "short.bin")
    data = DataExpert.path_block_bytes(np.zeros(9), 1.0, 0.5, 0)
    with open(path, "wb") as f:
        f.write(data[:-8])
    with pytest.raises(DomainError):
        DataExpert.read_path_block(path)


def test_write_artifacts_is_atomic_and_checksummed(tmp_path):
    out = str(tmp_path / "run")
    artifacts = {"table.csv": pd.DataFrame({"lag": [1, 2], "moment": [0.5, 0.25]}),
                 "report.json": {"ok": True},
                 "raw.bin": b"\x00\x01"}
    checksums = DataExpert.write_artifacts(out, artifacts)
    assert sorted(os.listdir(out)) == ["raw.bin", "report.json", "table.csv"]
    for name, digest in checksums.items():
        assert DataExpert.sha256_file(os.path.join(out, name)) == digest
    assert checksums["raw.bin"] == hashlib.sha256(b"\x00\x01").hexdigest()


def test_distance_frame_flattens_levels():
    rows = [{"level_a": 8, "distances": [0.3, 0.2]}, {"level_a": 32, "distances": [0.1, 0.05]}]
    frame = DataExpert.distance_frame(rows, [7, 9])
    assert list(frame.columns) == ["level", "seed", "distance"]
    assert frame.values.tolist() == [[8, 7, 0.3], [8, 9, 0.2], [32, 7, 0.1], [32, 9, 0.05]]


def test_unknown_artifact_type_raises():
    with pytest.raises(TypeError):
        DataExpert.to_bytes(3.0)


if __name__ == "__main__":
    test_path_frame_is_long_format()
    test_csv_keeps_full_precision()
    test_json_report_is_sorted_and_labels_non_finite_values()
    test_distance_frame_flattens_levels()
    print("✅ data expert checks passed")
