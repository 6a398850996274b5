from __future__ import annotations

import pytest

from cdgkit.core.config import get_settings


@pytest.fixture(autouse=True)
def _isolated_settings(monkeypatch, tmp_path):
    monkeypatch.setenv("CDGKIT_REPORT_DIR", str(tmp_path / "artifacts"))
    monkeypatch.setenv("CDGKIT_LOG_LEVEL", "WARNING")
    monkeypatch.delenv("CDGKIT_SEED", raising=False)
    monkeypatch.delenv("CDGKIT_DEFAULT_WINDOW", raising=False)
    monkeypatch.delenv("CDGKIT_FIELD", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
