"""
Artifact I/O for runs: long-format CSV tables, JSON reports and the binary path block.
Every file is written to ``name.tmp`` first and moved into place with os.replace.
"""
import hashlib
import json
import logging
import math
import os
from enum import Enum
from typing import Any, Mapping

import numpy as np
import pandas as pd

from .errors import DomainError

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("DATA-EXPERT")

FLOAT_FORMAT = "%.17g"
PATH_BLOCK_HEADER = np.dtype([("n_steps", "<i8"), ("t_end", "<f8"), ("hurst", "<f8"), ("seed", "<i8")])


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    if hasattr(value, "summary"):
        return value.summary()
    return str(value)


def _finite_or_label(value: Any) -> Any:
    """JSON has no inf/nan; they are written as strings."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _finite_or_label(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_label(v) for v in value]
    return value


class DataExpert:
    """Builds the long-format tables of a run and writes them atomically."""

    # --- tables ---
    @staticmethod
    def path_frame(paths: np.ndarray, t: np.ndarray) -> pd.DataFrame:
        """(path_id, t, value) for every row of ``paths``."""
        paths = np.atleast_2d(paths)
        n_paths, width = paths.shape
        return pd.DataFrame({
            "path_id": np.repeat(np.arange(n_paths), width),
            "t": np.tile(t, n_paths),
            "value": paths.ravel(),
        })

    @staticmethod
    def grid_field_frame(x: np.ndarray, values: np.ndarray) -> pd.DataFrame:
        return pd.DataFrame({"x": x, "value": values})

    @staticmethod
    def space_time_frame(t: np.ndarray, x: np.ndarray, values: np.ndarray, column: str = "value",
                         time_stride: int = 1) -> pd.DataFrame:
        """(t, x, column) for a (time × space) array, keeping every ``time_stride``-th row and the last."""
        rows = np.unique(np.append(np.arange(0, t.size, max(1, time_stride)), t.size - 1))
        block = np.asarray(values)[rows]
        return pd.DataFrame({
            "t": np.repeat(t[rows], x.size),
            "x": np.tile(x, rows.size),
            column: block.ravel(),
        })

    @staticmethod
    def regression_frame(lags: np.ndarray, moments: np.ndarray) -> pd.DataFrame:
        return pd.DataFrame({"lag": lags, "moment": moments})

    @staticmethod
    def distance_frame(rows: list[dict], seeds: list[int]) -> pd.DataFrame:
        """(level, seed, distance) from the per-level rows of a uniqueness report."""
        records = [{"level": r["level_a"], "seed": s, "distance": d}
                   for r in rows for s, d in zip(seeds, r["distances"])]
        return pd.DataFrame.from_records(records, columns=["level", "seed", "distance"])

    # --- serialisation ---
    @staticmethod
    def csv_bytes(frame: pd.DataFrame) -> bytes:
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n").encode("utf-8")

    @staticmethod
    def json_bytes(report: Mapping) -> bytes:
        text = json.dumps(_finite_or_label(dict(report)), indent=2, sort_keys=True, default=_json_default)
        return (text + "\n").encode("utf-8")

    @staticmethod
    def path_block_bytes(values: np.ndarray, t_end: float, hurst: float, seed: int) -> bytes:
        """Little-endian header (n_steps, T, H, seed) followed by the n_steps+1 samples."""
        values = np.asarray(values, dtype="<f8")
        header = np.array([(values.size - 1, t_end, hurst, seed)], dtype=PATH_BLOCK_HEADER)
        return header.tobytes() + values.tobytes()

    @staticmethod
    def read_path_block(path: str) -> tuple[dict, np.ndarray]:
        with open(path, "rb") as f:
            raw = f.read()
        header = np.frombuffer(raw[:PATH_BLOCK_HEADER.itemsize], dtype=PATH_BLOCK_HEADER)[0]
        meta = {"n_steps": int(header["n_steps"]), "t_end": float(header["t_end"]),
                "hurst": float(header["hurst"]), "seed": int(header["seed"])}
        values = np.frombuffer(raw[PATH_BLOCK_HEADER.itemsize:], dtype="<f8").astype(float)
        if values.size != meta["n_steps"] + 1:
            raise DomainError(f"path block holds {values.size} samples, header announces {meta['n_steps'] + 1}")
        return meta, values

    # --- files ---
    @staticmethod
    def atomic_write(path: str, data: bytes) -> str:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
        return path

    @staticmethod
    def to_bytes(artifact: Any) -> bytes:
        if isinstance(artifact, bytes):
            return artifact
        if isinstance(artifact, pd.DataFrame):
            return DataExpert.csv_bytes(artifact)
        if isinstance(artifact, Mapping):
            return DataExpert.json_bytes(artifact)
        raise TypeError(f"cannot serialise artifact of type {type(artifact).__name__}")

    @staticmethod
    def write_artifacts(out_dir: str, artifacts: Mapping[str, Any]) -> dict[str, str]:
        """Write every staged artifact under out_dir; returns {name: sha256}."""
        checksums = {}
        for name in sorted(artifacts):
            data = DataExpert.to_bytes(artifacts[name])
            DataExpert.atomic_write(os.path.join(out_dir, name), data)
            checksums[name] = hashlib.sha256(data).hexdigest()
        logger.info(f"[DATA-EXPERT] ✅ {len(checksums)} artifacts written to {out_dir}")
        return checksums

    @staticmethod
    def sha256_file(path: str) -> str:
        digest = hashlib.sha256()
        with open(path, "rb") as f:
            for chunk in iter(lambda: f.read(1 << 20), b""):
                digest.update(chunk)
        return digest.hexdigest()
