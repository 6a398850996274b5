from __future__ import annotations

import pytest

from cdgkit.cdg.constructions import regular_module, twisted_module
from cdgkit.cdg.examples import augmentation, exterior, kx_twisted, polynomial
from cdgkit.cdg.hom import hom_complex
from cdgkit.cdg.module import ModMap
from cdgkit.core.errors import OutOfWindow
from cdgkit.linalg.complexes import cohomology, is_quasi_isomorphism
from cdgkit.linalg.field import Field
from cdgkit.services.families import projective_family
from cdgkit.services.oracles import we_projective
from cdgkit.services.report import we_lines

QQ = Field.rationals()
HI = 8


@pytest.fixture
def kx():
    return polynomial(QQ, HI, degree=1, d_coeff=-1)


def test_cohomology_of_kx_is_ground_field(kx) -> None:
    h = cohomology(kx.d)
    assert h.dims() == {0: 1}
    assert h.window.hi == HI - 1


def test_twisted_module_is_acyclic(kx) -> None:
    ax = kx_twisted(kx)
    assert cohomology(ax.d).dims() == {}


def test_closed_maps_into_twisted_module_are_null_homotopic(kx) -> None:
    hom = hom_complex(regular_module(kx), kx_twisted(kx), [-1, 0, 1])
    closed = hom.closed_maps(0)
    assert closed
    assert all(hom.null_homotopy(z) is not None for z in closed)


def test_augmentation_is_quasi_isomorphism(kx) -> None:
    a = regular_module(kx, name="A")
    eps = augmentation(kx, a)
    assert eps.check().passed
    ha, hk = cohomology(a.d), cohomology(eps.target.d)
    assert is_quasi_isomorphism(eps.map, ha, hk, range(0, HI - 1))


def test_projective_oracle_rejects_augmentation_via_twisted_module(kx) -> None:
    a = regular_module(kx, name="A")
    ax = kx_twisted(kx)
    eps = augmentation(kx, a)
    report = we_projective(eps, projective_family([a, ax], name="{A, A^x}"))
    assert not report.verdict
    assert [m.member for m in report.witnesses()] == ["A^x"]
    assert report.members[0].verdict


def test_regular_module_alone_accepts_augmentation(kx) -> None:
    a = regular_module(kx, name="A")
    report = we_projective(augmentation(kx, a), projective_family([a]))
    assert report.verdict


def test_requested_degree_outside_window(kx) -> None:
    a = regular_module(kx, name="A")
    with pytest.raises(OutOfWindow):
        we_projective(augmentation(kx, a), projective_family([a]), degrees=[HI + 5])


def test_report_names_witness_degrees(kx) -> None:
    a = regular_module(kx, name="A")
    ax = kx_twisted(kx)
    report = we_projective(augmentation(kx, a), projective_family([a, ax], name="{A, A^x}"))
    (member,) = report.witnesses()
    assert member.witness_degrees
    text = "\n".join(we_lines(report))
    assert f"witnesses at {member.witness_degrees}" in text


def test_member_without_compared_degrees_is_inconclusive(kx) -> None:
    a = regular_module(kx, name="A")
    report = we_projective(augmentation(kx, a), projective_family([a]), degrees=[])
    (member,) = report.members
    assert member.degrees == []
    assert not member.verdict
    assert not report.verdict
    assert member.note is not None and member.note.startswith("inconclusive")
    assert "inconclusive" in "\n".join(we_lines(report))


def test_zero_hom_complexes_compare_as_isomorphic() -> None:
    e = exterior(QQ)
    zero = twisted_module(e, [], name="0")
    report = we_projective(ModMap.identity(zero), projective_family([regular_module(e, name="E")]))
    (member,) = report.members
    assert member.verdict
    assert member.note == "both Hom complexes are zero"
