import os
from tools.general_utils import get_logger
import sys, traceback


# project root is the parent of core/
_current_file_dir = os.path.dirname(os.path.abspath(__file__))
_project_root = os.path.dirname(_current_file_dir)
base_directory = os.path.join(_project_root, os.getenv("PROJECT_DIR", "work_dir"))
os.makedirs(base_directory, exist_ok=True)
linac_logger = get_logger(base_directory, "cstar_linac")

# --- Enhance error logging with traceback information ---
_original_error = linac_logger.error  # Preserve original method

def _error_with_traceback(message: str, *args, **kwargs):
    """Wrap linac_logger.error to append traceback when within an exception context."""
    exc_type, exc_value, exc_tb = sys.exc_info()
    if exc_type is not None:
        tb_str = "".join(traceback.format_exception(exc_type, exc_value, exc_tb))
        message = f"{message}\n{tb_str}"
    return _original_error(message, *args, **kwargs)

# Patch the logger so every `.error` call automatically contains traceback data (if available)
linac_logger.error = _error_with_traceback


# Stage tags prefix every pipeline log line: "[WEIGHTS] ✓ lambda=[1, 2] ..."
STAGES = ("VALIDATE", "PERIODICITY", "WEIGHTS", "AVERAGE", "FIT", "CONJUGACY", "DOMAIN", "EXTEND")


def stage_message(stage: str, message: str, passed: bool | None = None) -> str:
    if stage not in STAGES:
        raise ValueError(f"unknown stage tag {stage!r}, expected one of {STAGES}")
    mark = "" if passed is None else ("✓ " if passed else "✗ ")
    return f"[{stage}] {mark}{message}"


def log_stage(stage: str, message: str, passed: bool | None = None, level: str = "DEBUG") -> None:
    linac_logger.log(level, stage_message(stage, message, passed))
