from __future__ import annotations

import json
import logging
from pathlib import Path

import pytest

from cdgkit.core.config import get_settings
from cdgkit.core.errors import ManifestError
from cdgkit.main import resolve_manifest
from cdgkit.models.schemas import TaskSpec
from cdgkit.services.manifest_service import load_manifest, parse_manifest
from cdgkit.services.run_service import (
    EXIT_AXIOM,
    EXIT_OK,
    EXIT_VERDICT,
    EXIT_WINDOW,
    Overrides,
    RunService,
    task_order,
    with_report_dir,
)


def _task(id: str, command: str = "check", after: list[str] | None = None) -> TaskSpec:
    return TaskSpec(id=id, command=command, after=after or [])  # type: ignore[arg-type]


def test_task_order_follows_dependencies_then_manifest_order() -> None:
    tasks = [_task("c", after=["b"]), _task("a"), _task("b", after=["a"]), _task("d")]
    assert [t.id for t in task_order(tasks)] == ["a", "b", "c", "d"]


def test_task_order_restricted_to_prerequisites() -> None:
    tasks = [_task("a"), _task("b", after=["a"]), _task("c")]
    assert [t.id for t in task_order(tasks, ["b"])] == ["a", "b"]


def test_task_cycle_is_a_manifest_error() -> None:
    tasks = [_task("a", after=["b"]), _task("b", after=["a"])]
    with pytest.raises(ManifestError, match="cycle"):
        task_order(tasks)


def test_select_keeps_prerequisites_and_applies_overrides() -> None:
    manifest = load_manifest(resolve_manifest("kx"))
    tasks = RunService().select("cohomology", manifest, Overrides(degrees=[0, 1]))
    assert [t.id for t in tasks] == ["axioms", "H(A)"]
    assert all(t.degrees == [0, 1] for t in tasks)


def test_select_synthesizes_default_task() -> None:
    manifest = load_manifest(resolve_manifest("kx"))
    (task,) = RunService().select("bar", manifest, Overrides(truncate=2))
    assert task.id == "bar"
    assert task.target is None
    assert task.truncate == 2


def test_kx_manifest_runs_clean() -> None:
    result = RunService().run("run", load_manifest(resolve_manifest("kx")), manifest_name="kx.json", write=False)
    assert result.exit_code == EXIT_OK
    assert [o.task.id for o in result.outcomes] == ["axioms", "H(A)", "eps-proj"]
    eps = result.outcomes[-1]
    assert eps.verdict is False
    assert result.text_path is None


def test_unexpected_verdict_exits_with_verdict_code() -> None:
    manifest = load_manifest(resolve_manifest("augmentation"))
    result = RunService().run("we", manifest, write=False)
    assert result.exit_code == EXIT_VERDICT


def test_failed_dependency_skips_dependents() -> None:
    manifest = parse_manifest(json.dumps({
        "algebras": {"A": {"preset": "exterior"}},
        "modules": {"M": {"kind": "trivial", "algebra": "A"}},
        "tasks": [
            {"id": "first", "command": "check", "target": "A", "expect": False},
            {"id": "second", "command": "cohomology", "target": "M", "after": ["first"]},
        ],
    }))
    result = RunService().run("run", manifest, write=False)
    first, second = result.outcomes
    assert first.exit_code == EXIT_AXIOM
    assert second.exit_code == EXIT_VERDICT
    assert second.detail == "skipped: first failed"
    assert result.exit_code == EXIT_AXIOM


def test_degrees_beyond_window_exit_with_window_code() -> None:
    manifest = parse_manifest(json.dumps({
        "window": 6,
        "algebras": {"A": {"preset": "polynomial", "generator_degree": 1, "differential_coeff": -1}},
        "tasks": [{"id": "h", "command": "cohomology", "target": "A", "degrees": [9]}],
    }))
    result = RunService().run("cohomology", manifest, write=False)
    assert result.exit_code == EXIT_WINDOW


def test_empty_manifest_run_exits_zero() -> None:
    result = RunService().run("run", parse_manifest("{}"), write=False)
    assert result.exit_code == EXIT_OK
    assert result.outcomes == []


def test_unknown_command_rejected() -> None:
    with pytest.raises(ValueError):
        RunService().run("deploy", None, write=False)


def test_seed_precedence() -> None:
    manifest = parse_manifest(json.dumps({"seed": 11}))
    service = RunService()
    assert service.run("check", manifest, write=False).seed == 11
    assert service.run("check", manifest, overrides=Overrides(seed=4), write=False).seed == 4
    assert service.run("check", parse_manifest("{}"), write=False).seed == get_settings().seed


def test_reports_written_to_report_dir(tmp_path: Path) -> None:
    settings = with_report_dir(get_settings(), tmp_path / "out")
    result = RunService(settings=settings).run("check", load_manifest(resolve_manifest("kx")),
                                               manifest_name="kx.json")
    assert result.text_path is not None
    assert result.text_path.parent == (tmp_path / "out" / "reports").resolve()
    assert result.text_path.read_text(encoding="utf-8") == result.text
    body = json.loads(result.json_path.read_text(encoding="utf-8"))
    assert body["run"]["order"] == ["axioms"]
    assert body["run"]["exit_code"] == EXIT_OK


def test_with_report_dir_none_keeps_settings() -> None:
    settings = get_settings()
    assert with_report_dir(settings, None) is settings


def test_kx_twist_and_triality_log_progress(caplog: pytest.LogCaptureFixture) -> None:
    manifest = load_manifest(resolve_manifest("kx"))
    service = RunService()
    with caplog.at_level(logging.INFO, logger="cdgkit"):
        twist = service.run("twist", manifest, overrides=Overrides(truncate=2), write=False)
        triality = service.run("triality", manifest, overrides=Overrides(truncate=2), write=False)
    assert twist.outcomes and triality.outcomes
    messages = [r.getMessage() for r in caplog.records]
    assert messages.count("twisting") == 3
    assert "comparison" in messages
    twisted = [r for r in caplog.records if r.getMessage() == "twisting"]
    assert {r.module_name for r in twisted} == {"A1", "A^x", "k"}  # type: ignore[attr-defined]
