"""
Lab_8_Archivist: run manifests for traceability and determinism checks.
A manifest records the config hash, code version, wall time, status, per-file
checksums, headline metrics and the regime classification of the config.

Artifacts are written to a staging directory and moved into place once all of
them are on disk. Archiving a run or a failure first clears the previous run
in the same directory, so a directory holds either one manifest and its files
or a lone failure manifest.

run_id, created_at and wall_time_s differ between two runs of one config, so
manifests never match byte for byte; compare_manifests checks the per-file
checksums and the config hash instead.
"""
import hashlib
import json
import logging
import os
import shutil
from typing import Any, Mapping

from .. import __version__
from ..lab_2_besov.core import PARTITION_SPEC
from ..shared.data_expert import DataExpert
from ..shared.utils import RunStatus, generate_id, report_activity, timestamp_now

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("LAB-8")

MANIFEST_NAME = "manifest.json"
FAILURE_MANIFEST_NAME = "failure_manifest.json"
STAGING_DIR = ".staging"


def config_hash(config: Mapping[str, Any]) -> str:
    """sha256 of the canonical JSON dump (sorted keys, no whitespace)."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_manifest(path: str) -> dict:
    if os.path.isdir(path):
        path = os.path.join(path, MANIFEST_NAME)
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def clear_previous_run(out_dir: str) -> list[str]:
    """Remove an earlier manifest with the files it lists, and any failure manifest."""
    removed = []
    manifest_path = os.path.join(out_dir, MANIFEST_NAME)
    if os.path.exists(manifest_path):
        try:
            listed = list(load_manifest(manifest_path).get("files", {}))
        except (OSError, ValueError):
            listed = []
        for name in listed + [MANIFEST_NAME]:
            path = os.path.join(out_dir, name)
            if os.path.isfile(path):
                os.remove(path)
                removed.append(name)
    failure_path = os.path.join(out_dir, FAILURE_MANIFEST_NAME)
    if os.path.exists(failure_path):
        os.remove(failure_path)
        removed.append(FAILURE_MANIFEST_NAME)
    return removed


def compare_manifests(a: Mapping, b: Mapping) -> dict:
    """Files whose checksums differ between two manifests (same config run twice ⇒ none)."""
    files_a, files_b = a.get("files", {}), b.get("files", {})
    differing = sorted(name for name in set(files_a) & set(files_b) if files_a[name] != files_b[name])
    only_a, only_b = sorted(set(files_a) - set(files_b)), sorted(set(files_b) - set(files_a))
    return {
        "identical": not (differing or only_a or only_b),
        "same_config": a.get("config_hash") == b.get("config_hash"),
        "differing": differing,
        "only_in_a": only_a,
        "only_in_b": only_b,
    }


class Lab8Archivist:
    """Writes a run's artifacts and its manifest, or the failure manifest when the run raised."""
    task_description = "Run manifests, checksums & config hashing"

    def __init__(self):
        self.role = "LAB-8 (Archivist)"

    @report_activity
    def archive_run(self, out_dir: str, config: Mapping[str, Any], artifacts: Mapping[str, Any],
                    metrics: Mapping[str, Any], status: RunStatus, wall_time: float,
                    regime: Mapping[str, Any] | None = None) -> dict:
        logger.info(f"[{self.role}] Archiving {len(artifacts)} artifacts to {out_dir}")
        staging = os.path.join(out_dir, STAGING_DIR)
        shutil.rmtree(staging, ignore_errors=True)
        try:
            checksums = DataExpert.write_artifacts(staging, artifacts)
        except BaseException:
            shutil.rmtree(staging, ignore_errors=True)
            raise
        removed = clear_previous_run(out_dir)
        if removed:
            logger.info(f"[{self.role}] Replacing previous run in {out_dir} ({len(removed)} files)")
        for name in checksums:
            os.replace(os.path.join(staging, name), os.path.join(out_dir, name))
        shutil.rmtree(staging, ignore_errors=True)
        manifest = {
            "run_id": generate_id(),
            "created_at": timestamp_now().isoformat(),
            "config_hash": config_hash(config),
            "config": dict(config),
            "version": __version__,
            "wall_time_s": wall_time,
            "status": status.value,
            "exit_code": status.exit_code,
            "files": checksums,
            "metrics": dict(metrics),
            "partition_spec": PARTITION_SPEC,
            "regime": dict(regime or {}),
        }
        DataExpert.atomic_write(os.path.join(out_dir, MANIFEST_NAME), DataExpert.json_bytes(manifest))
        mark = "✅" if status is RunStatus.SUCCESS else "⚠️"
        logger.info(f"[{self.role}] {mark} manifest written ({status.value}, hash {manifest['config_hash'][:12]})")
        return manifest

    def archive_failure(self, out_dir: str, config: Mapping[str, Any] | None, error: BaseException,
                        wall_time: float) -> dict:
        manifest = {
            "run_id": generate_id(),
            "created_at": timestamp_now().isoformat(),
            "config_hash": config_hash(config) if config is not None else None,
            "version": __version__,
            "wall_time_s": wall_time,
            "status": RunStatus.ERROR.value,
            "exit_code": RunStatus.ERROR.exit_code,
            "error": {"type": type(error).__name__, "message": str(error),
                      "issues": getattr(error, "issues", [])},
        }
        if os.path.isdir(out_dir):
            clear_previous_run(out_dir)
            shutil.rmtree(os.path.join(out_dir, STAGING_DIR), ignore_errors=True)
        DataExpert.atomic_write(os.path.join(out_dir, FAILURE_MANIFEST_NAME), DataExpert.json_bytes(manifest))
        logger.error(f"[{self.role}] ❌ run failed: {type(error).__name__}: {error}")
        return manifest
