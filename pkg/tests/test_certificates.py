from __future__ import annotations

import random

from cdgkit.bar.bar import bar
from cdgkit.bar.contra import BarContramodule
from cdgkit.cdg.constructions import cone, cylinder, regular_module, trivial_module, twisted_module
from cdgkit.cdg.examples import exterior, truncated_polynomial
from cdgkit.cdg.generators import koszul_module, path_algebra
from cdgkit.cdg.module import ModMap
from cdgkit.linalg.field import Field
from cdgkit.services.certificates import (
    contra_consistency,
    cylinder_certificate,
    homotopy_equivalence,
    splitting_certificate,
)
from cdgkit.services.oracles import cogenerator

QQ = Field.rationals()


def test_identity_is_certified() -> None:
    m = regular_module(exterior(QQ), name="A")
    cert = homotopy_equivalence(ModMap.identity(m))
    assert cert.certified
    assert cert.contraction is not None
    assert cert.contraction.degree == -1


def test_zero_map_on_ground_field_is_not_certified() -> None:
    k = trivial_module(exterior(QQ))
    cert = homotopy_equivalence(ModMap.zero(k, k))
    assert not cert.certified
    assert cert.report.failures()[0].name == "cone is contractible"


def test_zero_module_cone_is_contractible() -> None:
    a = exterior(QQ)
    zero = twisted_module(a, [], name="0")
    cert = homotopy_equivalence(ModMap.identity(zero))
    assert cert.certified
    # cone(0 -> k) is k, which has no contraction
    assert not homotopy_equivalence(ModMap.zero(zero, trivial_module(a))).certified


def test_cylinder_certificates_curved_and_uncurved() -> None:
    for x in (regular_module(truncated_polynomial(QQ, 2, 3), name="X"), koszul_module(path_algebra(QQ))):
        report = cylinder_certificate(x)
        assert report.passed, report.failures()


def test_splitting_against_cogenerator() -> None:
    a = truncated_polynomial(QQ, 2, 2, var="e")
    letters = bar(a, 2).letters
    w = BarContramodule.build(letters, [("w0", 0)], {}, name="W1")
    assert w.is_valid
    _, _, p = cylinder(regular_module(a, name="X"))
    split = splitting_certificate(cone(p), cogenerator(w), rng=random.Random(3))
    assert split.hypothesis_met
    assert split.split, split.report.failures()
    assert split.retraction is not None and split.retraction.is_closed


def test_contra_side_contraction() -> None:
    a = truncated_polynomial(QQ, 2, 2, var="e")
    _, _, p = cylinder(regular_module(a, name="X"))
    report = contra_consistency(homotopy_equivalence(p), bar(a, 2))
    assert report.passed, report.failures()


def test_contra_side_without_contraction_is_reported() -> None:
    a = truncated_polynomial(QQ, 2, 2, var="e")
    k = trivial_module(a)
    report = contra_consistency(homotopy_equivalence(ModMap.zero(k, k)), bar(a, 2))
    assert not report.passed
    assert report.results[0].name == "contraction available"
