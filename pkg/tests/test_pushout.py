from __future__ import annotations

import random

from cdgkit.cdg.bimodule import Bimodules
from cdgkit.cdg.examples import exterior, ground
from cdgkit.cdg.module import ModMap
from cdgkit.linalg.elimination import invert
from cdgkit.linalg.field import Field
from cdgkit.services import pushout

QQ = Field.rationals()


def _sides() -> tuple[Bimodules, Bimodules]:
    k, lam = ground(QQ), exterior(QQ, 1)
    return Bimodules.over(k, lam), Bimodules.over(lam, k)


def test_battery_passes_on_small_sample() -> None:
    first, second = _sides()
    reports = pushout.battery(first, second, random.Random(7), 3)
    assert len(reports) == 2 * 3 + 2
    failed = [(r.subject, r.failures()) for r in reports if not r.passed]
    assert not failed


def test_box_with_identity_is_an_isomorphism() -> None:
    first, second = _sides()
    i = pushout.generating_cofibration(first, [0], [1])
    x = second.free([("x", 0)], name="X")
    pp = pushout.pushout_product(first, second, i, ModMap.identity(x))
    assert pushout.check(pp).passed
    assert invert(pp.box.map) is not None


def test_generating_cofibration_box_is_injective() -> None:
    first, second = _sides()
    i = pushout.generating_cofibration(first, [0], [1])
    i2 = pushout.generating_cofibration(second, [0], [0, 1], name="i'")
    pp = pushout.pushout_product(first, second, i, i2)
    assert pushout.is_injective(pp.box)
    assert pushout.colimit_oracle(first, second, pp).passed


def test_trivial_cofibration_box_has_homotopy_inverse() -> None:
    first, second = _sides()
    j = pushout.generating_trivial_cofibration(first, [0], 1)
    i2 = pushout.generating_cofibration(second, [0], [1], name="i'")
    pp = pushout.pushout_product(first, second, j.f, i2)
    assert pushout.verify_homotopy_inverse(pp, j.retraction).passed


def test_battery_at_default_size() -> None:
    first, second = _sides()
    reports = pushout.battery(first, second, random.Random(0), 20)
    assert len(reports) == 2 * 20 + 2
    assert all(r.passed for r in reports)
