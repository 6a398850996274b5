"""Weak-equivalence oracles for the projective and injective model structures.

A closed degree 0 map f: M -> N is tested against a family:

    projective: f_*: Hom_A(T, M) -> Hom_A(T, N) for twisted modules T
    injective:  f^*: Hom_A(N, V) -> Hom_A(M, V) for V = Hom^τ(A, W), W a bar contramodule

Each verdict is relative to the family and to the degrees where both Hom
complexes are exact.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from cdgkit.bar.contra import BarContramodule
from cdgkit.bar.twisted import twisted_hom_module
from cdgkit.cdg.hom import HomComplex, hom_complex, postcompose, precompose
from cdgkit.cdg.module import CDGModule, ModMap
from cdgkit.core.errors import OutOfWindow, VerificationFailed
from cdgkit.core.logging import get_logger
from cdgkit.linalg.complexes import Cohomology, induced_rank
from cdgkit.linalg.graded import GradedMap, Window
from cdgkit.models.schemas import AgreementReport, DegreeRecord, MemberVerdict, WEReport
from cdgkit.services.families import TestFamily

log = get_logger(__name__)


def _require_kind(family: TestFamily, kind: str) -> None:
    if family.kind != kind:
        raise ValueError(f"family {family.name} is {family.kind}, expected {kind}")


def _require_map(f: ModMap) -> None:
    if f.degree != 0:
        raise ValueError(f"{f.name} has degree {f.degree}; weak equivalences have degree 0")
    f.require_closed()


def _degrees(window: Window, first: HomComplex, second: HomComplex, requested: Iterable[int] | None,
             what: str) -> list[int]:
    if requested is None:
        return window.clip(sorted(set(first.space.support) | set(second.space.support)))
    wanted = sorted(set(requested))
    for n in wanted:
        if not window.contains(n):
            raise OutOfWindow(what=what, degree=n, window=window)
    return wanted


def _compare(index: int, member: str, induced: GradedMap, before: HomComplex, after: HomComplex,
             requested: Iterable[int] | None) -> MemberVerdict:
    window = before.window.inner(1).intersect(after.window.inner(1))
    degrees = _degrees(window, before, after, requested, member)
    hb: Cohomology = before.cohomology(degrees)
    ha: Cohomology = after.cohomology(degrees)
    records = [
        DegreeRecord(
            degree=n,
            dim_before=hb.group(n).dim,
            dim_after=ha.group(n).dim,
            rank=induced_rank(induced, hb, ha, n),
        )
        for n in degrees
    ]
    return _member(index, member, window, records, before, after)


def _member(index: int, member: str, window: Window, records: list[DegreeRecord],
            *homs: HomComplex) -> MemberVerdict:
    """A member passes on records that are all isomorphisms; no records is inconclusive.

    The one exception is Hom complexes that are zero in every degree, where
    0 -> 0 is an isomorphism.
    """
    if records:
        return MemberVerdict(index=index, member=member, window=str(window), degrees=records,
                             verdict=all(r.iso for r in records))
    if window.is_total and not any(h.space.dim for h in homs):
        return MemberVerdict(index=index, member=member, window=str(window), verdict=True,
                             note="both Hom complexes are zero")
    log.warning("no exact degrees to compare", extra={"member": member, "window": str(window)})
    return MemberVerdict(index=index, member=member, window=str(window), verdict=False,
                         note=f"inconclusive: no exact degree to compare in {window}")


def we_projective(f: ModMap, family: TestFamily, *, degrees: Iterable[int] | None = None) -> WEReport:
    """Is f_*: Hom(T, M) -> Hom(T, N) a quasi-isomorphism for every T in the family?"""
    _require_kind(family, "projective")
    _require_map(f)
    degrees = None if degrees is None else list(degrees)
    report = WEReport(model="projective", subject=f.name, family=family.describe(), provenance=family.provenance)
    for i, t in enumerate(family):
        assert isinstance(t, CDGModule)
        hm = hom_complex(t, f.source)
        hn = hom_complex(t, f.target)
        report.members.append(_compare(i, t.name, postcompose(f, hm, hn), hm, hn, degrees))
    log.info("projective oracle", extra={"map": f.name, "family": family.name, "verdict": report.verdict})
    return report


def cogenerator(w: BarContramodule) -> CDGModule:
    """V = Hom^τ(A, W), graded-injective."""
    return twisted_hom_module(w.letters, w, name=f"V({w.name})")


def we_injective(f: ModMap, family: TestFamily, *, degrees: Iterable[int] | None = None) -> WEReport:
    """Is f^*: Hom(N, V) -> Hom(M, V) a quasi-isomorphism for every V = Hom^τ(A, W)?"""
    _require_kind(family, "injective")
    _require_map(f)
    degrees = None if degrees is None else list(degrees)
    report = WEReport(model="injective", subject=f.name, family=family.describe(), provenance=family.provenance)
    for i, w in enumerate(family):
        assert isinstance(w, BarContramodule)
        v = cogenerator(w)
        hn = hom_complex(f.target, v)
        hm = hom_complex(f.source, v)
        report.members.append(_compare(i, w.name, precompose(f, hn, hm), hn, hm, degrees))
    log.info("injective oracle", extra={"map": f.name, "family": family.name, "verdict": report.verdict})
    return report


def we_agreement(f: ModMap, projective: TestFamily, injective: TestFamily) -> AgreementReport:
    """Both verdicts side by side; a disagreement means one family is too small."""
    proj = we_projective(f, projective)
    inj = we_injective(f, injective)
    report = AgreementReport(subject=f.name, projective=proj, injective=inj)
    if not report.agree:
        detecting = proj if not proj.verdict else inj
        names = ", ".join(m.member for m in detecting.witnesses())
        report.family_insufficient = True
        report.note = (f"only the {detecting.model} family detects a failure ({names}); "
                       f"the {'injective' if detecting is proj else 'projective'} family is insufficient")
        log.warning("oracles disagree", extra={"map": f.name, "detected_by": detecting.model})
    return report


# ---------------------------------------------------------------------------
# stable cohomology of towers


@dataclass(frozen=True, eq=False)
class Telescope:
    """A finite tower X_1 -> X_2 -> ... of closed inclusions, read as its colimit.

    Stable cohomology of Hom(T, colim) is approximated by the image of
    H(Hom(T, X_S)) -> H(Hom(T, X_{S+1})) for the last two stages.
    """

    stages: tuple[CDGModule, ...]
    inclusions: tuple[ModMap, ...]
    name: str = "Tel"

    def __post_init__(self) -> None:
        if len(self.stages) < 2 or len(self.inclusions) != len(self.stages) - 1:
            raise ValueError("a telescope needs at least two stages and one inclusion between consecutive stages")
        for s, inc in enumerate(self.inclusions):
            if inc.source is not self.stages[s] or inc.target is not self.stages[s + 1]:
                raise ValueError(f"inclusion {s} does not connect stages {s} and {s + 1}")
            inc.require_closed()

    @property
    def depth(self) -> int:
        return len(self.stages)


def we_projective_stable(
    telescope: Telescope,
    maps: Sequence[ModMap],
    family: TestFamily,
    *,
    degrees: Iterable[int] | None = None,
    subject: str | None = None,
) -> WEReport:
    """Projective oracle for φ: colim X_s -> Y given by compatible maps φ_s: X_s -> Y.

    Per degree the record holds (stable rank, dim H(Hom(T, Y)), rank of φ_S
    on H(Hom(T, X_S))); the degree passes when all three agree.
    """
    _require_kind(family, "projective")
    if len(maps) != telescope.depth:
        raise ValueError("one map per telescope stage is required")
    for s, phi in enumerate(maps):
        _require_map(phi)
        if phi.source is not telescope.stages[s]:
            raise ValueError(f"{phi.name} does not start at stage {s}")
    for s, inc in enumerate(telescope.inclusions):
        if not maps[s + 1].compose(inc).equals(maps[s]):
            raise VerificationFailed(check=f"stage maps are compatible at stage {s}",
                                     witness=(maps[s + 1].map.compose(inc.map) - maps[s].map).nonzero_witness())
    last, top = maps[-2], maps[-1]
    inc = telescope.inclusions[-1]
    name = subject or f"{top.name} on {telescope.name}"
    report = WEReport(model="projective", subject=name, family=family.describe(), provenance=family.provenance)
    requested = None if degrees is None else list(degrees)
    for i, t in enumerate(family):
        assert isinstance(t, CDGModule)
        h_low = hom_complex(t, inc.source)
        h_high = hom_complex(t, inc.target)
        h_y = hom_complex(t, top.target)
        window = h_low.window.inner(1).intersect(h_high.window.inner(1)).intersect(h_y.window.inner(1))
        wanted = _degrees(window, h_low, h_y, requested, t.name)
        c_low = h_low.cohomology(wanted)
        c_high = h_high.cohomology(wanted)
        c_y = h_y.cohomology(wanted)
        stable = postcompose(inc, h_low, h_high)
        phi_low = postcompose(last, h_low, h_y)
        records = [
            DegreeRecord(
                degree=n,
                dim_before=induced_rank(stable, c_low, c_high, n),
                dim_after=c_y.group(n).dim,
                rank=induced_rank(phi_low, c_low, c_y, n),
            )
            for n in wanted
        ]
        report.members.append(_member(i, t.name, window, records, h_low, h_high, h_y))
    log.info("stable projective oracle", extra={"telescope": telescope.name, "family": family.name,
                                                "verdict": report.verdict})
    return report
