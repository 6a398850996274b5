"""Contratensor product and the comodule-contramodule correspondence Φ ⊣ Ψ."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from cdgkit.cdg.hom import HomComplex, hom_complex, postcompose
from cdgkit.coalg.comodule import Comodule, RightComodule, regular_comodule, right_regular
from cdgkit.coalg.contramodule import Contramodule, hom_contraaction
from cdgkit.coalg.morphism import StructMap
from cdgkit.core.logging import get_logger
from cdgkit.linalg.elimination import Subquotients, quotient_by
from cdgkit.linalg.graded import GradedMap, Label, Vector, tensor_space, vec_add
from cdgkit.models.schemas import AxiomReport

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class PhiImage:
    """Φ(P) = C⊙_C P together with the projection C⊗P -> C⊙_C P."""

    source: Contramodule
    comodule: Comodule
    quotient: Subquotients

    def cls(self, c: Label, p: Vector) -> Vector:
        """The class of c⊗p."""
        return self.quotient.project({(c, x): v for x, v in p.items()})


@dataclass(frozen=True, eq=False)
class PsiImage:
    """Ψ(N) = Hom_C(C, N) together with its basis of comodule maps."""

    source: Comodule
    contramodule: Contramodule
    hom: HomComplex


def contratensor(n: RightComodule, p: Contramodule) -> Subquotients:
    """N⊙_C P: the coequalizer of N⊗Hom(C, P) ⇉ N⊗P.

    One map applies the contraaction, the other the coaction of N followed by
    evaluation, n⊗f ↦ (-1)^{|f||n₁|} n₀⊗f(n₁).
    """
    C = p.coalgebra
    space = tensor_space(n.carrier, p.carrier)
    split: dict[tuple[Label, Label], Vector] = {}
    for x, vec in n.coaction.items():
        for (x0, c), v in vec.items():
            split.setdefault((x, c), {})[x0] = v
    relations: list[Vector] = []
    for x in n.labels:
        for c in C.labels:
            tail = split.get((x, c), {})
            for q in p.labels:
                rel: Vector = {(x, r): v for r, v in p.contract_basis(c, q).items()}
                odd = (C.degree(c) * (p.degree(q) - C.degree(c))) % 2
                for x0, v in tail.items():
                    vec_add(rel, {(x0, q): v if odd else -v})
                if rel:
                    relations.append(rel)
    return quotient_by(space, relations, C.field, window=space.window)


def phi(p: Contramodule, *, name: str | None = None) -> PhiImage:
    """Φ(P) = C⊙_C P with the coaction and differential descended from C⊗P."""
    C = p.coalgebra
    fld = C.field
    sq = contratensor(right_regular(C), p)
    carrier = sq.cokernel.target
    coaction: dict[Label, Vector] = {}
    diff: dict[Label, Vector] = {}
    for q in carrier.labels:
        c, x = sq.cokernel_lift[q]
        rho: Vector = {}
        for (c1, c2), v in C.comult_basis(c).items():
            for q2, w in sq.project({(c2, x): fld.one}).items():
                vec_add(rho, {(c1, q2): v * w})
        coaction[q] = rho
        dvec: Vector = {(c2, x): v for c2, v in C.d.column(c).items()}
        odd = C.degree(c) % 2
        vec_add(dvec, {(c, y): (-v if odd else v) for y, v in p.d.column(x).items()})
        diff[q] = sq.project(dvec)
    comodule = Comodule.build(C, carrier, coaction, diff, name=name or f"Φ({p.name})")
    log.debug("phi", extra={"contramodule": p.name, "dims": carrier.dims()})
    return PhiImage(p, comodule, sq)


def psi(n: Comodule, *, name: str | None = None, verify: bool = True) -> PsiImage:
    """Ψ(N) = Hom_C(C, N), computed by solving for comodule maps C -> N.

    Pass ``verify=False`` over a truncated bar of a curved algebra, where D need
    not preserve Hom_C on the longest words.
    """
    C = n.coalgebra
    hom = hom_complex(regular_comodule(C), n, verify=verify, name=f"Hom_C({C.name}, {n.name})")
    contraaction: dict[tuple[Label, Label], Vector] = {}
    for lab in hom.space.labels:
        g = hom.maps[lab]
        for c in C.labels:
            image = hom_contraaction(C, c, g)
            if image.is_zero:
                continue
            coords = hom.coordinates(image)
            if coords:
                contraaction[(c, lab)] = coords
    contra = Contramodule(C, hom.space, contraaction, hom.differential, name or f"Ψ({n.name})")
    log.debug("psi", extra={"comodule": n.name, "dims": hom.space.dims()})
    return PsiImage(n, contra, hom)


def unit(image: PhiImage, back: PsiImage) -> StructMap:
    """η: P -> Ψ(Φ(P)), p ↦ (c ↦ (-1)^{|p||c|} [c⊗p])."""
    p = image.source
    C = p.coalgebra
    cols: dict[Label, Vector] = {}
    for x in p.labels:
        g_cols = {}
        for c in C.labels:
            val = image.cls(c, {x: C.field.one})
            if val:
                g_cols[c] = {q: -v for q, v in val.items()} if (p.degree(x) * C.degree(c)) % 2 else val
        g = GradedMap.from_columns(C.carrier, image.comodule.carrier, p.degree(x), g_cols, C.field,
                                   check_degrees=False)
        if not g.is_zero:
            cols[x] = back.hom.coordinates(g)
    gm = GradedMap.from_columns(p.carrier, back.contramodule.carrier, 0, cols, C.field)
    return StructMap(p, back.contramodule, gm, f"η_{p.name}")


def counit(image: PsiImage, forth: PhiImage) -> StructMap:
    """ε: Φ(Ψ(N)) -> N, [c⊗g] ↦ (-1)^{|c||g|} g(c)."""
    n = image.source
    C = n.coalgebra
    q_space = forth.comodule.carrier
    cols: dict[Label, Vector] = {}
    for q in q_space.labels:
        c, lab = forth.quotient.cokernel_lift[q]
        g = image.hom.maps[lab]
        val = g.column(c)
        if val:
            odd = (C.degree(c) * g.degree) % 2
            cols[q] = {y: -v for y, v in val.items()} if odd else val
    gm = GradedMap.from_columns(q_space, n.carrier, 0, cols, C.field)
    return StructMap(forth.comodule, n, gm, f"ε_{n.name}")


def phi_map(f: StructMap, src: PhiImage, tgt: PhiImage) -> StructMap:
    """Φ(f)[c⊗p] = (-1)^{|f||c|} [c⊗f(p)]."""
    C = src.source.coalgebra
    cols: dict[Label, Vector] = {}
    for q in src.comodule.labels:
        c, x = src.quotient.cokernel_lift[q]
        val = tgt.cls(c, f.map.column(x))
        if val:
            cols[q] = {r: -v for r, v in val.items()} if (f.degree * C.degree(c)) % 2 else val
    gm = GradedMap.from_columns(src.comodule.carrier, tgt.comodule.carrier, f.degree, cols, C.field)
    return StructMap(src.comodule, tgt.comodule, gm, f"Φ({f.name})")


def psi_map(g: StructMap, src: PsiImage, tgt: PsiImage) -> StructMap:
    """Ψ(g)(h) = g∘h."""
    gm = postcompose(g.map, src.hom, tgt.hom)
    return StructMap(src.contramodule, tgt.contramodule, gm, f"Ψ({g.name})")


def verify_phi_psi(
    contramodules: Sequence[Contramodule] = (),
    comodules: Sequence[Comodule] = (),
    *,
    subject: str = "Φ ⊣ Ψ",
) -> AxiomReport:
    """Unit and counit are closed structure maps and isomorphisms on the samples; triangles hold.

    Samples are expected to be free contramodules and cofree comodules.
    """
    report = AxiomReport(subject=subject, kind="adjunction")
    for p in contramodules:
        fp = phi(p)
        pfp = psi(fp.comodule)
        eta = unit(fp, pfp)
        report.add(f"unit {p.name}: compatible", eta.compatibility_witness())
        report.add(f"unit {p.name}: closed", eta.differential().nonzero_witness())
        report.add(f"unit {p.name}: isomorphism", None if eta.inverse() is not None else p.name)
        fpfp = phi(pfp.contramodule)
        eps = counit(pfp, fpfp)
        triangle = eps.compose(phi_map(eta, fp, fpfp))
        report.add(f"triangle Φ {p.name}",
                   None if triangle.equals(StructMap.identity(fp.comodule)) else triangle.map.nonzero_witness())
    for n in comodules:
        pn = psi(n)
        fpn = phi(pn.contramodule)
        eps = counit(pn, fpn)
        report.add(f"counit {n.name}: compatible", eps.compatibility_witness())
        report.add(f"counit {n.name}: closed", eps.differential().nonzero_witness())
        report.add(f"counit {n.name}: isomorphism", None if eps.inverse() is not None else n.name)
        pfpn = psi(fpn.comodule)
        eta = unit(fpn, pfpn)
        triangle = psi_map(eps, pfpn, pn).compose(eta)
        report.add(f"triangle Ψ {n.name}",
                   None if triangle.equals(StructMap.identity(pn.contramodule)) else triangle.map.nonzero_witness())
    return report
