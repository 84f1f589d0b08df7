import json
import math
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .__version__ import __version__
from .config import REPORT_SCHEMA_VERSION


def _non_finite(value: Any, path: str = "") -> Optional[str]:
    if isinstance(value, bool):
        return None
    if isinstance(value, float):
        return None if math.isfinite(value) else path or "<root>"
    if isinstance(value, dict):
        for k, v in value.items():
            bad = _non_finite(v, f"{path}.{k}" if path else str(k))
            if bad:
                return bad
    if isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            bad = _non_finite(v, f"{path}[{i}]")
            if bad:
                return bad
    return None


class ReportFile(BaseModel):
    """Machine-readable record of one command; every number in it is finite."""
    model_config = ConfigDict(extra="forbid")

    schema_version: int = REPORT_SCHEMA_VERSION
    tool_version: str = __version__
    command: str
    source: str
    kind: Optional[str] = None
    provenance: dict[str, Any] = Field(default_factory=dict)
    validation: Optional[dict[str, Any]] = None
    weights: Optional[dict[str, Any]] = None
    classification: Optional[dict[str, Any]] = None
    linearizer: Optional[dict[str, Any]] = None
    normalization: Optional[dict[str, Any]] = None
    fit: Optional[dict[str, Any]] = None
    conjugacy: Optional[dict[str, Any]] = None
    domain: Optional[dict[str, Any]] = None
    extension: Optional[list[dict[str, Any]]] = None

    @model_validator(mode="after")
    def _finite(self) -> "ReportFile":
        bad = _non_finite(self.model_dump())
        if bad:
            raise ValueError(f"report field {bad} is not a finite number")
        return self

    def to_json(self) -> str:
        return json.dumps(self.model_dump(exclude_none=True), indent=2) + "\n"


def provenance(**configs) -> dict[str, Any]:
    """Config models and plain values, dumped for the report."""
    out = {}
    for name, cfg in configs.items():
        if cfg is None:
            continue
        out[name] = cfg.model_dump() if isinstance(cfg, BaseModel) else cfg
    return out
