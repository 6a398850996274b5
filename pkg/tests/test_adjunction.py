from __future__ import annotations

import random

import pytest

from cdgkit.cdg.bimodule import Bimodules
from cdgkit.cdg.examples import exterior, ground
from cdgkit.cdg.generators import random_closed_map
from cdgkit.linalg.field import Field
from cdgkit.services.adjunction import tensor_hom_adjunction

QQ = Field.rationals()


@pytest.mark.parametrize("middle", ["k", "exterior"])
def test_tensor_hom_adjunction(middle: str) -> None:
    rng = random.Random(11)
    k = ground(QQ)
    b = k if middle == "k" else exterior(QQ, 1)
    first, second, out = Bimodules.over(k, b), Bimodules.over(b, k), Bimodules.over(k, k)
    m = first.free([("m", 0)], name="M")
    n = second.free([("n", 1)], name="N")
    z = out.free([("z", 0), ("z'", 1)], {"z": {"z'": 1}}, name="Z")
    m2 = first.free([("p", 0), ("q", 1)], name="M'")
    u = random_closed_map(m2, m, rng, name="u")
    report = tensor_hom_adjunction(first, second, m, n, z, maps=[u])
    assert report.passed, report.failures()
    names = [r.name for r in report.results]
    assert "φr bijective" in names and "φl chain map" in names
