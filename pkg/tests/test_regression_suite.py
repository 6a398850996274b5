from __future__ import annotations

import pytest

from cdgkit.core.errors import VerificationFailed
from cdgkit.services.regression_suite import (
    Outcome,
    SuiteContext,
    SuiteEntry,
    default_entries,
    run_suite,
    suite_graph,
)


def _passes(ctx: SuiteContext) -> Outcome:
    return Outcome(True, "[0, 1]", "fine")


def _fails(ctx: SuiteContext) -> Outcome:
    return Outcome(False, "-", "broken")


def _raises(ctx: SuiteContext) -> Outcome:
    raise VerificationFailed(check="made up")


def test_failed_entry_skips_its_dependents() -> None:
    entries = [
        SuiteEntry("base", _passes),
        SuiteEntry("bad", _fails, ("base",)),
        SuiteEntry("downstream", _passes, ("bad",)),
        SuiteEntry("independent", _passes, ("base",)),
    ]
    report = run_suite(seed=1, entries=entries)
    status = {r.name: r for r in report.records}
    assert [r.name for r in report.records] == ["base", "bad", "downstream", "independent"]
    assert status["base"].passed and status["independent"].passed
    assert not status["bad"].passed
    assert status["downstream"].detail == "skipped: bad failed"
    assert not report.passed


def test_errors_become_failures() -> None:
    report = run_suite(entries=[SuiteEntry("boom", _raises)])
    (record,) = report.records
    assert not record.passed
    assert record.detail.startswith("VerificationFailed")


def test_only_runs_prerequisites() -> None:
    entries = [SuiteEntry("a", _passes), SuiteEntry("b", _passes, ("a",)), SuiteEntry("c", _passes)]
    report = run_suite(entries=entries, only=["b"])
    assert sorted(r.name for r in report.records) == ["a", "b"]


def test_unknown_dependency_rejected() -> None:
    with pytest.raises(ValueError, match="unknown"):
        suite_graph([SuiteEntry("a", _passes, ("missing",))])


def test_cycle_rejected() -> None:
    with pytest.raises(ValueError, match="cycle"):
        suite_graph([SuiteEntry("a", _passes, ("b",)), SuiteEntry("b", _passes, ("a",))])


def test_default_entries_form_a_dag() -> None:
    graph = suite_graph(default_entries())
    assert graph.number_of_nodes() == 13
    assert "axiom battery" in graph


def test_kx_entry_passes_at_small_scale() -> None:
    report = run_suite(seed=0, only=["k[x] example"], scale=0.05)
    assert [r.name for r in report.records] == ["axiom battery", "k[x] example"]
    assert report.passed, [r.detail for r in report.records if not r.passed]
