"""Service configuration: one YAML file plus env-var overrides.

SCREENTIME_PORT and SCREENTIME_DATA_DIR override the file values.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .detectors import CommercialParams, InterviewParams
from .errors import MalformedInputError


@dataclass
class ServiceConfig:
    data_dir: str = "."
    snapshot: str | None = None
    sample_period_ms: int = 3000
    port: int = 8008
    bucket: str = "month"
    normalize: bool = False
    knn_k: int = 7
    propagate_threshold: float = 0.7
    ui_dir: str | None = None
    commercial: CommercialParams = field(default_factory=CommercialParams)
    interview: InterviewParams = field(default_factory=InterviewParams)


def load_config(path: str | Path | None = None) -> ServiceConfig:
    cfg = ServiceConfig()
    if path is not None:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        if not isinstance(data, dict):
            raise MalformedInputError("config file must hold a mapping")
        for key in (
            "data_dir",
            "snapshot",
            "sample_period_ms",
            "port",
            "bucket",
            "normalize",
            "knn_k",
            "propagate_threshold",
            "ui_dir",
        ):
            if key in data:
                setattr(cfg, key, data[key])
        if "commercials" in data:
            cfg.commercial = CommercialParams(**data["commercials"])
        if "interviews" in data:
            cfg.interview = InterviewParams(**data["interviews"])
    if os.environ.get("SCREENTIME_PORT"):
        cfg.port = int(os.environ["SCREENTIME_PORT"])
    if os.environ.get("SCREENTIME_DATA_DIR"):
        cfg.data_dir = os.environ["SCREENTIME_DATA_DIR"]
    if not (0 < cfg.port < 65536):
        raise MalformedInputError(f"invalid port {cfg.port}")
    return cfg
