from __future__ import annotations

import pytest

from cdgkit.bar.bar import BarLetters, bar
from cdgkit.bar.contra import BarContramodule
from cdgkit.cdg.constructions import cylinder, regular_module, twisted_module
from cdgkit.cdg.examples import exterior, polynomial, rank_one, truncated_polynomial
from cdgkit.cdg.module import ModMap
from cdgkit.core.config import get_settings
from cdgkit.core.errors import DegreeMismatch, VerificationFailed
from cdgkit.linalg.field import Field
from cdgkit.services.families import (
    TestFamily,
    enumerate_bar_contramodules,
    enumerate_twisted,
    injective_family,
    projective_family,
)
from cdgkit.services.oracles import we_injective

QQ = Field.rationals()
F5 = Field.prime(5)


def test_rank_one_twisted_modules_over_kx() -> None:
    a = polynomial(QQ, 4, degree=1, d_coeff=-1)
    fam = enumerate_twisted(a, max_rank=1, min_degree=0, max_degree=0)
    assert len(fam) == 2
    assert fam.provenance == "enumerated"
    assert fam.bounds["max_size"] == 1
    assert fam.bounds["truncated"] is False


def test_finite_field_enumerates_every_coefficient() -> None:
    fam = enumerate_twisted(exterior(F5), max_rank=1, min_degree=0, max_degree=0)
    assert len(fam) == 5


def test_rank_one_bar_contramodules_over_kx() -> None:
    a = polynomial(QQ, 4, degree=1, d_coeff=-1)
    fam = enumerate_bar_contramodules(BarLetters.build(a), max_dim=1, min_degree=0, max_degree=0)
    assert fam.kind == "injective"
    assert len(fam) == 2


def test_candidate_cap_truncates(monkeypatch) -> None:
    monkeypatch.setenv("CDGKIT_FAMILY_MAX_CANDIDATES", "1")
    get_settings.cache_clear()
    fam = enumerate_twisted(exterior(F5), max_rank=1, min_degree=0, max_degree=0)
    assert fam.bounds["truncated"] is True
    assert len(fam) == 1


def test_declared_members_are_checked() -> None:
    a = polynomial(QQ, 4, degree=1, d_coeff=-1)
    fam = projective_family([regular_module(a), rank_one(a, {"x": -1}, name="A^x")], name="F")
    assert fam.provenance == "declared"
    assert "2 members" in fam.describe()
    letters = bar(truncated_polynomial(QQ, 2, 2), 2).letters
    w = BarContramodule.build(letters, [("w0", 0), ("w1", 1)], {}, {"w0": {"w1": 1}})
    assert "injective, declared" in injective_family([w]).describe()
    with pytest.raises(TypeError):
        TestFamily("injective", "G", (regular_module(a),))


def test_operator_of_wrong_degree_is_rejected() -> None:
    letters = bar(truncated_polynomial(QQ, 2, 2), 2).letters
    with pytest.raises(DegreeMismatch):
        BarContramodule.build(letters, [("w0", 0), ("w1", 1)], {"e": {"w0": {"w1": 1}}})


def test_invalid_member_is_refused() -> None:
    letters = bar(truncated_polynomial(QQ, 2, 2), 2).letters
    # d² ≠ 0 on a three term complex
    w = BarContramodule.build(letters, [("w0", 0), ("w1", 1), ("w2", 2)], {},
                              {"w0": {"w1": 1}, "w1": {"w2": 1}})
    assert not w.is_valid
    with pytest.raises(VerificationFailed):
        injective_family([w])


def test_injective_oracle_on_a_declared_family() -> None:
    a = truncated_polynomial(QQ, 2, 2, var="e")
    letters = bar(a, 2).letters
    (e,) = letters.letters
    point = BarContramodule.build(letters, [("w", 0)], {}, name="W1")
    chain = BarContramodule.build(letters, [("w0", 0), ("w1", -letters.letter_degree(e))],
                                  {e: {"w0": {"w1": 1}}}, name="W2")
    fam = injective_family([point, chain], name="G")
    x = regular_module(a, name="A")

    _, _, p = cylinder(x)
    report = we_injective(p, fam)
    assert report.verdict
    assert [m.member for m in report.members] == ["W1", "W2"]
    assert all(m.degrees for m in report.members)

    # Hom(A, V) ≅ V, and V = Hom(A, W1) has zero differential
    to_zero = ModMap.zero(x, twisted_module(a, [], name="0"))
    report = we_injective(to_zero, fam)
    assert not report.verdict
    assert "W1" in [m.member for m in report.witnesses()]
