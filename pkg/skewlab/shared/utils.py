import os
import json
import uuid
import inspect
import logging
import functools
from datetime import datetime, timezone
from enum import Enum
from typing import Any

import numpy as np

# --- CONFIGURATION ---
from dotenv import load_dotenv
load_dotenv()

logger = logging.getLogger("SHARED-UTILS")

# Robust Path Resolution
BASE_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
DEFAULT_OUTPUT_ROOT = os.path.join(BASE_DIR, "results")


def output_root() -> str:
    """Root for run directories and the activity log (SKEWLAB_OUTPUT_ROOT overrides)."""
    return os.getenv("SKEWLAB_OUTPUT_ROOT", DEFAULT_OUTPUT_ROOT)


def resolve_output_dir(path: str) -> str:
    if os.path.isabs(path):
        return path
    return os.path.join(output_root(), path)


# --- SHARED TYPES ---
class PathLabel(Enum):
    FBM = "fbm"
    BM = "bm"
    SOLUTION = "solution"
    DRIFTPART = "driftpart"
    GENERIC = "generic"


class RunStatus(Enum):
    SUCCESS = "success"
    THRESHOLD_FAILURE = "threshold_failure"
    ERROR = "error"

    @property
    def exit_code(self) -> int:
        return {"success": 0, "threshold_failure": 2, "error": 1}[self.value]


def generate_id() -> str:
    return str(uuid.uuid4())


def timestamp_now() -> datetime:
    return datetime.now(timezone.utc)


def make_rng(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Independent, reproducible substream for (seed, stream_id)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream_id,)))


# --- STATION ACTIVITY REPORTING ---
ACTIVITY_LOG_NAME = "lab_activity.log"


def activity_log_path() -> str:
    return os.path.join(output_root(), "reports", ACTIVITY_LOG_NAME)


def _summarize(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return {"array_shape": list(value.shape)}
    if isinstance(value, (list, tuple)) and len(value) > 8:
        return {"sequence_len": len(value)}
    if hasattr(value, "summary"):
        return value.summary()
    return value


def report_activity(func):
    """Decorator: append the station, its task and a compact input summary to the activity log."""
    @functools.wraps(func)
    def wrapper(self, *args, **kwargs):
        input_data = args[0] if args else next(iter(kwargs.values()), None)
        entry = {
            "timestamp": timestamp_now().isoformat(),
            "station": self.__class__.__name__,
            "task": getattr(self, "task_description", func.__name__),
            "call": func.__name__,
            "input": _summarize(input_data),
        }
        try:
            path = activity_log_path()
            os.makedirs(os.path.dirname(path), exist_ok=True)
            with open(path, "a", encoding="utf-8") as f:
                f.write(json.dumps(entry, default=str) + "\n")
        except OSError as e:
            logger.warning(f"[SHARED-UTILS] ⚠️ Activity log not writable: {e}")
        return func(self, *args, **kwargs)

    if inspect.iscoroutinefunction(func):
        raise TypeError("report_activity decorates synchronous station methods only")
    return wrapper
