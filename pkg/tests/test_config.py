from __future__ import annotations

import pytest

from cdgkit.core.config import ensure_report_dir, get_settings, new_run_id


def test_defaults() -> None:
    s = get_settings()
    assert s.default_window == 12
    assert s.bar_truncation == 3
    assert s.seed == 0
    assert s.field == "QQ"
    assert (s.family_min_degree, s.family_max_degree) == (-3, 3)


def test_env_overrides(monkeypatch) -> None:
    monkeypatch.setenv("CDGKIT_DEFAULT_WINDOW", "7")
    monkeypatch.setenv("CDGKIT_SEED", "42")
    monkeypatch.setenv("CDGKIT_FIELD", "5")
    get_settings.cache_clear()
    s = get_settings()
    assert s.default_window == 7
    assert s.seed == 42
    assert s.field == "5"


def test_bad_integer_is_rejected(monkeypatch) -> None:
    monkeypatch.setenv("CDGKIT_BAR_TRUNCATION", "three")
    get_settings.cache_clear()
    with pytest.raises(ValueError, match="CDGKIT_BAR_TRUNCATION"):
        get_settings()


def test_report_dir_is_created(tmp_path) -> None:
    path = ensure_report_dir(get_settings())
    assert path.is_dir()
    assert path.name == "reports"
    assert str(path).startswith(str(tmp_path))
    assert len(new_run_id()) == 32
