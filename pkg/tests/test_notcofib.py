from __future__ import annotations

from cdgkit.cdg.hom import hom_complex
from cdgkit.linalg.field import Field
from cdgkit.services import notcofib

F5 = Field.prime(5)


def test_declared_structure_holds() -> None:
    ex = notcofib.build(F5, depth=4, top=4)
    report = notcofib.check(ex)
    assert report.passed, report.failures()
    assert len(ex.lambdas) == 5
    assert ex.top.rank == 5 * 4


def test_no_nonzero_degree_zero_maps_into_telescope() -> None:
    ex = notcofib.build(F5, depth=3, top=3)
    hom = hom_complex(ex.x, ex.top, [0])
    assert hom.space.component_dim(0) == 0
    assert ex.psi.is_closed


def test_phi_passes_against_rank_one_family() -> None:
    ex = notcofib.build(F5, depth=6, top=6)
    report = notcofib.stable_verdict(ex)
    assert report.verdict
    assert len(report.members) == 5


def test_single_summand_against_its_own_module() -> None:
    ex = notcofib.build(F5, depth=5, top=5)
    lam = F5.convert(3)
    part = notcofib.restricted(ex, lam)
    assert part.lambdas == (lam,)
    assert notcofib.stable_verdict(part, part.family([lam])).verdict


def test_single_summand_against_another_module_fails() -> None:
    part = notcofib.build(F5, depth=4, top=4, lambdas=[1])
    report = notcofib.stable_verdict(part, part.family([F5.convert(2)]))
    assert not report.verdict
