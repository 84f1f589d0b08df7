import os, sys
from loguru import logger
from pydantic import BaseModel, Field


# ANSI color codes
CYAN = '\033[36m'
GREEN = '\033[32m'
YELLOW = '\033[33m'
RESET = '\033[0m'


# Track created logger handlers
_logger_handlers = {}


def get_logger(logger_file_path: str, logger_name: str):
    verbose = os.environ.get("VERBOSE", "").lower() in ["true", "1"]

    os.makedirs(logger_file_path, exist_ok=True)
    logger_file = os.path.join(logger_file_path, f"{logger_name}.log")

    if logger_name in _logger_handlers:
        for handler_id in _logger_handlers[logger_name]:
            try:
                logger.remove(handler_id)
            except ValueError:
                pass
    else:
        try:
            logger.remove(0)
        except ValueError:
            pass

    logger_filter = lambda record: record.get("extra", {}).get("name") == logger_name

    file_handler_id = logger.add(
        logger_file,
        level='INFO',
        backtrace=True,
        diagnose=verbose,
        rotation="12 MB",
        enqueue=True,
        encoding="utf-8",
        filter=logger_filter
    )

    # stdout carries command output (json / csv), so the console handler writes to stderr
    console_handler_id = logger.add(
        sys.stderr,
        level='DEBUG' if verbose else 'INFO',
        filter=logger_filter,
        colorize=True,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{message}</level>"
    )

    _logger_handlers[logger_name] = [file_handler_id, console_handler_id]

    if logger_name == 'cstar_linac' and verbose:
        print(f"\n{CYAN}{'#' * 50}{RESET}", file=sys.stderr)
        print(f"{GREEN}cstar-linac{RESET}", file=sys.stderr)
        print(f"{YELLOW}Numerical certificates only: residuals are sampled, not proofs.{RESET}", file=sys.stderr)
        print(f"{CYAN}{'#' * 50}{RESET}\n", file=sys.stderr)

    return logger.bind(name=logger_name)


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.6g}{z.imag:+.6g}j"


class RunRecorder(BaseModel):
    command: str = ""
    spec_path: str = ""

    samples_evaluated: int = 0
    integration_failures: int = 0
    extended: int = 0
    rejected: int = 0
    worst_residual: float = 0.0
    stage_seconds: dict[str, float] = Field(default_factory=dict)

    def record_residual(self, residual: float) -> None:
        self.samples_evaluated += 1
        self.worst_residual = max(self.worst_residual, float(residual))

    def record_stage(self, stage: str, seconds: float) -> None:
        self.stage_seconds[stage] = self.stage_seconds.get(stage, 0.0) + seconds

    def summary(self) -> str:
        head = f"=== {self.command}: {os.path.basename(self.spec_path):.40} ==="
        lines = [head, f"- samples evaluated: {self.samples_evaluated}",
                 f"- worst residual: {self.worst_residual:.3e}"]
        if self.integration_failures:
            lines.append(f"- integration failures: {self.integration_failures}")
        if self.extended or self.rejected:
            lines.append(f"- extended: {self.extended}, rejected: {self.rejected}")
        for stage, seconds in self.stage_seconds.items():
            lines.append(f"- {stage}: {seconds:.3f}s")
        return "\n".join(lines)
