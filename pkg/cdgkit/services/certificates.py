"""Certificates: homotopy equivalences, cylinders, splittings and contra-side contractions.

Every certificate carries the chain-level data it was built from so that a
reader can recheck it, plus an AxiomReport of the identities verified.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from cdgkit.bar.bar import TruncatedBar
from cdgkit.bar.twisted import twisted_contramodule, twisted_contramodule_map
from cdgkit.cdg.constructions import cone, cone_inclusion, cylinder, fold_map, shift_module
from cdgkit.cdg.generators import random_closed_map
from cdgkit.cdg.hom import HomComplex, hom_complex, precompose
from cdgkit.cdg.module import CDGModule, ModMap
from cdgkit.core.errors import OutOfWindow
from cdgkit.core.logging import get_logger
from cdgkit.linalg.elimination import rank, rows_to_matrix, solve
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import GradedMap, Label, Vector
from cdgkit.models.schemas import AxiomReport

log = get_logger(__name__)


# ---------------------------------------------------------------------------
# homotopy equivalences


@dataclass(frozen=True, eq=False)
class HomotopyCertificate:
    """f is a homotopy equivalence iff id on cone(f) is null-homotopic: D(s) = id."""

    map: ModMap
    cone: CDGModule
    contraction: GradedMap | None
    report: AxiomReport

    @property
    def certified(self) -> bool:
        return self.contraction is not None and self.report.passed


def contraction(c: CDGModule) -> GradedMap | None:
    """s of degree -1 with ds + sd = id_C, or None."""
    hom = hom_complex(c, c, [-1, 0], name=f"End({c.name})")
    return hom.null_homotopy(GradedMap.identity(c.carrier, c.field))


def homotopy_equivalence(f: ModMap) -> HomotopyCertificate:
    c = cone(f)
    s = contraction(c)
    report = AxiomReport(subject=f.name, kind="certificate")
    report.add("cone is contractible", None if s is not None else c.name, window=str(c.window))
    if s is not None:
        ds = c.d.compose(s) + s.compose(c.d)
        report.add("ds + sd = id", (ds - GradedMap.identity(c.carrier, c.field)).nonzero_witness())
    log.debug("homotopy certificate", extra={"map": f.name, "certified": report.passed})
    return HomotopyCertificate(f, c, s, report)


def cylinder_certificate(x: CDGModule) -> AxiomReport:
    """X⊕X -j-> Cyl(X) -p-> X: p∘j is the fold map, j is injective, p a homotopy equivalence."""
    j, cyl, p = cylinder(x)
    _, fold = fold_map(x)
    report = AxiomReport(subject=f"Cyl({x.name})", kind="certificate")
    report.add("p∘j = fold", (p.map.compose(j.map) - fold.map).nonzero_witness())
    report.add("j closed", j.differential().nonzero_witness())
    report.add("p closed", p.differential().nonzero_witness())
    injective = j.source.dim == 0 or rank(j.map.matrix) == j.source.dim
    report.add("j injective", None if injective else j.name)
    cert = homotopy_equivalence(p)
    report.add("p homotopy equivalence", None if cert.certified else cert.report.failures()[0].name)
    return report


# ---------------------------------------------------------------------------
# splittings


@dataclass(frozen=True, eq=False)
class SplittingCertificate:
    """A retraction r: X -> Y of f: Y -> X for an extension 0 -> Y -> X -> M -> 0."""

    module: CDGModule
    cogenerator: CDGModule
    extension: CDGModule | None
    retraction: ModMap | None
    hypothesis_met: bool
    report: AxiomReport

    @property
    def split(self) -> bool:
        return self.retraction is not None and self.report.passed


def _hom_acyclic(hom: HomComplex) -> tuple[bool, str]:
    window = hom.window.inner(1)
    h = hom.cohomology(window.clip(hom.space.support))
    return h.is_acyclic, str(window)


def _identity_coordinates(hom: HomComplex) -> Vector:
    return hom.coordinates(GradedMap.identity(hom.source.carrier, hom.source.field))


def _stack(columns: list[tuple[Label, list[tuple[GradedMap, Scalar]]]], row_labels: list[Label],
           fld: Field) -> list[dict[int, Scalar]]:
    """Rows of the block matrix whose j-th column is the sum of coeff * gm(label_j)."""
    rows: list[dict[int, Scalar]] = [{} for _ in row_labels]
    pos = {lab: i for i, lab in enumerate(row_labels)}
    for j, (lab, parts) in enumerate(columns):
        for gm, coeff in parts:
            for r, v in gm.column(lab).items():
                if r in pos:
                    i = pos[r]
                    rows[i][j] = rows[i].get(j, fld.zero) + coeff * v
    return rows


def splitting_certificate(
    m: CDGModule,
    y: CDGModule,
    *,
    extension_map: ModMap | None = None,
    rng: random.Random | None = None,
) -> SplittingCertificate:
    """Split 0 -> Y -> cone(c) -> M -> 0 for c: M[-1] -> Y, using H(Hom(M, Y)) = 0.

    Find a closed φ: X -> Y and ψ: Y -> Y of degree -1 with φ∘f - D(ψ) = id_Y,
    lift ψ along f^* to ψ', and return r = φ - D(ψ'), which satisfies r∘f = id_Y.
    """
    report = AxiomReport(subject=f"{m.name} against {y.name}", kind="certificate")
    acyclic, window = _hom_acyclic(hom_complex(m, y))
    report.add("Hom(M, Y) acyclic", None if acyclic else m.name, window=window,
               note=None if acyclic else "hypothesis not met")
    if not acyclic:
        log.info("splitting skipped", extra={"module_name": m.name, "cogenerator": y.name})
        return SplittingCertificate(m, y, None, None, False, report)

    c = extension_map
    if c is None:
        c = random_closed_map(shift_module(m, -1), y, rng or random.Random(0), name="c")
    x = cone(c, name=f"X({c.name})")
    f = cone_inclusion(c, x)
    g = ModMap.from_columns(x, m, 0, {("M", lab): {lab: 1} for lab in m.labels}, name="g")
    report.add("g∘f = 0", g.map.compose(f.map).nonzero_witness())

    fld = y.field
    hxy = hom_complex(x, y, [-1, 0, 1], name=f"Hom({x.name}, {y.name})")
    hyy = hom_complex(y, y, [-1, 0], name=f"End({y.name})")
    for hom, n in ((hxy, 0), (hxy, -1), (hyy, 0), (hyy, -1)):
        if not hom.window.contains(n):
            raise OutOfWindow(what=hom.name, degree=n, window=hom.window)
    restrict = precompose(f, hxy, hyy)

    phi_labels = list(hxy.basis(0))
    psi_labels = list(hyy.basis(-1))
    one = fld.one
    rows_top = _stack([(lab, [(hxy.differential, one)]) for lab in phi_labels]
                      + [(lab, []) for lab in psi_labels], list(hxy.basis(1)), fld)
    rows_bottom = _stack([(lab, [(restrict, one)]) for lab in phi_labels]
                         + [(lab, [(hyy.differential, -one)]) for lab in psi_labels], list(hyy.basis(0)), fld)
    system = rows_to_matrix(rows_top + rows_bottom, len(phi_labels) + len(psi_labels), fld.domain)
    ident = _identity_coordinates(hyy)
    rhs = [fld.zero] * len(rows_top) + [ident.get(lab, fld.zero) for lab in hyy.basis(0)]
    sol = solve(system, rhs)
    report.add("φ∘f - D(ψ) = id solvable", None if sol is not None else "no solution")
    if sol is None:
        return SplittingCertificate(m, y, x, None, True, report)
    phi = {lab: v for lab, v in zip(phi_labels, sol[: len(phi_labels)], strict=True) if v}
    psi = {lab: v for lab, v in zip(psi_labels, sol[len(phi_labels):], strict=True) if v}

    lift_labels = list(hxy.basis(-1))
    lift_rows = _stack([(lab, [(restrict, one)]) for lab in lift_labels], psi_labels, fld)
    lift = solve(rows_to_matrix(lift_rows, len(lift_labels), fld.domain),
                 [psi.get(lab, fld.zero) for lab in psi_labels])
    report.add("ψ lifts along f^*", None if lift is not None else "no lift")
    if lift is None:
        return SplittingCertificate(m, y, x, None, True, report)
    psi_lift = {lab: v for lab, v in zip(lift_labels, lift, strict=True) if v}

    r_coords = dict(phi)
    for lab, v in hxy.differential.apply(psi_lift).items():
        r_coords[lab] = r_coords.get(lab, fld.zero) - v
    r = hxy.to_modmap({k: v for k, v in r_coords.items() if v}, 0, name="r")
    report.add("r closed", r.differential().nonzero_witness())
    report.add("r∘f = id_Y", (r.map.compose(f.map) - GradedMap.identity(y.carrier, fld)).nonzero_witness())
    log.info("splitting certificate", extra={"module_name": m.name, "cogenerator": y.name, "passed": report.passed})
    return SplittingCertificate(m, y, x, r, True, report)


# ---------------------------------------------------------------------------
# contra side


def contra_consistency(cert: HomotopyCertificate, bar: TruncatedBar) -> AxiomReport:
    """Hom^τ(B, -) carries the contraction of cone(f) to a contraction of Hom^τ(B, cone f)."""
    report = AxiomReport(subject=f"Homτ({bar.coalgebra.name}, {cert.cone.name})", kind="certificate")
    if cert.contraction is None:
        report.add("contraction available", cert.map.name, note="map is not certified")
        return report
    h = twisted_contramodule(bar, cert.cone)
    s = twisted_contramodule_map(ModMap(cert.cone, cert.cone, cert.contraction, "s"), h, h)
    report.add("Homτ(B, s) compatible", s.compatibility_witness())
    report.add("D(Homτ(B, s)) = id",
               (s.differential() - GradedMap.identity(h.carrier, h.field)).nonzero_witness(),
               window=str(h.window), note=h.exact_note)
    return report
