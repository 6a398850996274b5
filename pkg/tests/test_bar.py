from __future__ import annotations

import pytest

from cdgkit.bar.auxeq import verify_comparison
from cdgkit.bar.bar import bar
from cdgkit.bar.twisted import (
    twisted_comodule,
    twisted_comodule_map,
    twisted_contramodule,
    twisted_contramodule_map,
    twisted_hom_module,
    twisted_hom_module_map,
    twisted_module,
    twisted_module_map,
)
from cdgkit.cdg.constructions import regular_module
from cdgkit.cdg.examples import exterior, truncated_polynomial
from cdgkit.cdg.generators import koszul_module, square_zero_pair
from cdgkit.cdg.module import ModMap
from cdgkit.linalg.field import Field

QQ = Field.rationals()


def test_bar_words_and_window() -> None:
    a = truncated_polynomial(QQ, 2, 2, var="e")
    b = bar(a, 3)
    assert b.words == ((), ("e",), ("e", "e"), ("e", "e", "e"))
    assert [b.degree(w) for w in b.words] == [0, 1, 2, 3]
    assert b.coalgebra.window.hi == 3
    assert not b.window_mode


def test_degree_zero_letters_leave_no_exact_window() -> None:
    b = bar(exterior(QQ, 1), 2)
    assert b.coalgebra.window.is_empty


def test_negative_truncation_is_rejected() -> None:
    with pytest.raises(ValueError):
        bar(exterior(QQ), -1)


@pytest.mark.parametrize(
    "algebra",
    [truncated_polynomial(QQ, 2, 2, var="e"), truncated_polynomial(QQ, 2, 3, var="x"), exterior(QQ, 3)],
    ids=lambda a: a.name,
)
def test_bar_coalgebra_and_twisting_cochain(algebra) -> None:
    b = bar(algebra, 3)
    assert b.coalgebra.check().passed
    assert b.check_tau().passed


def test_curved_bar_runs_in_window_mode() -> None:
    a = square_zero_pair(QQ, 1, 2)
    b = bar(a, 3)
    assert b.window_mode
    report = b.coalgebra.check()
    assert report.passed
    assert b.check_tau().passed


def test_twisted_functors_produce_valid_objects() -> None:
    a = truncated_polynomial(QQ, 2, 3, var="x")
    b = bar(a, 3)
    for m in (regular_module(a, name="A"), koszul_module(a)):
        t = twisted_comodule(b, m)
        h = twisted_contramodule(b, m)
        assert t.check().passed
        assert h.check().passed
        assert twisted_module(b, t).check().passed
        assert twisted_hom_module(b.letters, h).check().passed


def test_comparison_isomorphisms_are_natural() -> None:
    a = truncated_polynomial(QQ, 2, 2, var="e")
    m = regular_module(a, name="A")
    for n in (2, 3):
        report = verify_comparison(bar(a, n), [m], [ModMap.identity(m)])
        assert report.passed, report.failures()


def test_comparison_holds_on_exact_words_for_curved_algebras() -> None:
    a = square_zero_pair(QQ, 1, 1)
    m = koszul_module(a)
    for n in (2, 3):
        b = bar(a, n)
        assert b.window_mode
        report = verify_comparison(b, [m], [ModMap.identity(m)])
        assert report.passed, report.failures()
        names = [r.name for r in report.results]
        assert any(x.startswith("ι₁") and x.endswith("closed") for x in names)
        assert any(x.startswith("ι₂") and x.endswith("invertible") for x in names)
        closed = [r for r in report.results if r.name.endswith("closed")]
        assert all(r.note and "window mode" in r.note for r in closed)


def test_twisted_functors_respect_closed_maps_and_composition() -> None:
    a = truncated_polynomial(QQ, 2, 3, var="x")
    b = bar(a, 3)
    m = regular_module(a, name="A")
    # right multiplication by x
    u = ModMap.from_generators(m, m, 2, {("1", "1"): {("x", "1"): 1}}, name="x")
    assert u.check().passed

    t = twisted_comodule(b, m)
    g = twisted_comodule_map(u, t, t)
    assert g.check().passed
    s = twisted_module(b, t)
    sg = twisted_module_map(g, s, s)
    assert sg.check().passed
    assert twisted_module_map(g @ g, s, s).equals(sg @ sg)
    assert not (sg @ sg).map.is_zero

    h = twisted_contramodule(b, m)
    k = twisted_contramodule_map(u, h, h)
    assert k.check().passed
    hh = twisted_hom_module(b.letters, h)
    hk = twisted_hom_module_map(k, hh, hh)
    assert hk.check().passed
    assert twisted_hom_module_map(k @ k, hh, hh).equals(hk @ hk)
