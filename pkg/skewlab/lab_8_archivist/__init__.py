from .core import FAILURE_MANIFEST_NAME, MANIFEST_NAME, Lab8Archivist, compare_manifests, config_hash, load_manifest

__all__ = ["FAILURE_MANIFEST_NAME", "MANIFEST_NAME", "Lab8Archivist", "compare_manifests", "config_hash", "load_manifest"]
