from __future__ import annotations

import os
import uuid
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv


@dataclass(frozen=True)
class Settings:
    field: str
    default_window: int
    bar_truncation: int
    seed: int
    report_dir: Path
    log_level: str
    family_max_rank: int
    family_min_degree: int
    family_max_degree: int
    family_max_candidates: int


def new_run_id() -> str:
    return uuid.uuid4().hex


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from e


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    # Load .env if present. Real environment variables win.
    load_dotenv(override=False)

    field = os.getenv("CDGKIT_FIELD", "QQ").strip() or "QQ"
    default_window = _int_env("CDGKIT_DEFAULT_WINDOW", 12)
    bar_truncation = _int_env("CDGKIT_BAR_TRUNCATION", 3)
    seed = _int_env("CDGKIT_SEED", 0)
    report_dir = Path(os.getenv("CDGKIT_REPORT_DIR", "artifacts")).resolve()
    log_level = os.getenv("CDGKIT_LOG_LEVEL", "INFO").strip().upper() or "INFO"

    return Settings(
        field=field,
        default_window=default_window,
        bar_truncation=bar_truncation,
        seed=seed,
        report_dir=report_dir,
        log_level=log_level,
        family_max_rank=_int_env("CDGKIT_FAMILY_MAX_RANK", 2),
        family_min_degree=_int_env("CDGKIT_FAMILY_MIN_DEGREE", -3),
        family_max_degree=_int_env("CDGKIT_FAMILY_MAX_DEGREE", 3),
        family_max_candidates=_int_env("CDGKIT_FAMILY_MAX_CANDIDATES", 20000),
    )


def ensure_report_dir(settings: Settings) -> Path:
    path = settings.report_dir / "reports"
    path.mkdir(parents=True, exist_ok=True)
    return path
