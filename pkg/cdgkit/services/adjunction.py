"""The tensor-hom adjunction in two variables for bimodules.

    Hom_{A-B}(M, Hom_r(N, Z)) <-φr- Hom_{A-D}(M⊗_B N, Z) -φl-> Hom_{B-D}(N, Hom_l(M, Z))

with φr(Φ)(x)(y) = Φ([x⊗y]) and φl(Φ)(y)(x) = (-1)^{|y||x|} Φ([x⊗y]). Both are
realized as maps of Hom complexes and checked to be isomorphisms of complexes.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence

from cdgkit.cdg.bimodule import (
    Bimodules,
    HomBimodule,
    RelativeTensor,
    left_hom,
    relative_tensor,
    relative_tensor_map,
    right_hom,
)
from cdgkit.cdg.hom import HomComplex, hom_complex
from cdgkit.cdg.module import CDGModule, ModMap
from cdgkit.core.logging import get_logger
from cdgkit.linalg.elimination import invert
from cdgkit.linalg.graded import GradedMap, Label, Vector
from cdgkit.models.schemas import AxiomReport

log = get_logger(__name__)

Curry = Callable[[GradedMap], GradedMap]


def curry_right(t: RelativeTensor, hr: HomBimodule) -> Curry:
    """Φ ↦ (x ↦ (y ↦ Φ([x⊗y])))."""
    m, n = t.left, t.right

    def fn(phi: GradedMap) -> GradedMap:
        cols: dict[Label, Vector] = {}
        for x in m.labels:
            inner = {y: phi.apply(t.cls(x, y)) for y in n.labels}
            gm = GradedMap.from_columns(n.carrier, phi.target, phi.degree + m.degree(x), inner, phi.field,
                                        check_degrees=False)
            cols[x] = {} if gm.is_zero else hr.hom.coordinates(gm)
        return GradedMap.from_columns(m.carrier, hr.module.carrier, phi.degree, cols, phi.field,
                                      check_degrees=False)

    return fn


def curry_left(t: RelativeTensor, hl: HomBimodule) -> Curry:
    """Φ ↦ (y ↦ (x ↦ (-1)^{|y||x|} Φ([x⊗y])))."""
    m, n = t.left, t.right

    def fn(phi: GradedMap) -> GradedMap:
        cols: dict[Label, Vector] = {}
        for y in n.labels:
            inner: dict[Label, Vector] = {}
            for x in m.labels:
                val = phi.apply(t.cls(x, y))
                if (n.degree(y) * m.degree(x)) % 2:
                    val = {k: -v for k, v in val.items()}
                inner[x] = val
            gm = GradedMap.from_columns(m.carrier, phi.target, phi.degree + n.degree(y), inner, phi.field,
                                        check_degrees=False)
            cols[y] = {} if gm.is_zero else hl.hom.coordinates(gm)
        return GradedMap.from_columns(n.carrier, hl.module.carrier, phi.degree, cols, phi.field,
                                      check_degrees=False)

    return fn


def uncurry_right(t: RelativeTensor, hr: HomBimodule, z: CDGModule) -> Curry:
    """h ↦ ([x⊗y] ↦ h(x)(y)); well defined on M⊗_B N for A-B-linear h."""

    def fn(h: GradedMap) -> GradedMap:
        cols: dict[Label, Vector] = {}
        for q in t.module.labels:
            x, y = t.lift(q)
            value = hr.hom.to_map(h.column(x), h.degree + t.left.degree(x))
            cols[q] = value.column(y)
        return GradedMap.from_columns(t.module.carrier, z.carrier, h.degree, cols, h.field, check_degrees=False)

    return fn


def transport(fn: Curry, src: HomComplex, tgt: HomComplex) -> GradedMap:
    """The degree 0 map of Hom complexes induced by fn on basis maps."""
    cols: dict[Label, Vector] = {}
    for lab in src.space.labels:
        image = fn(src.maps[lab])
        cols[lab] = {} if image.is_zero else tgt.coordinates(image)
    return GradedMap.from_columns(src.space, tgt.space, 0, cols, src.source.field, check_degrees=False)


def _chain_map_witness(f: GradedMap, src: HomComplex, tgt: HomComplex) -> tuple[Label, Label] | None:
    return (tgt.differential.compose(f) - f.compose(src.differential)).nonzero_witness()


def tensor_hom_adjunction(
    first: Bimodules,
    second: Bimodules,
    m: CDGModule,
    n: CDGModule,
    z: CDGModule,
    *,
    maps: Sequence[ModMap] = (),
    degrees: Iterable[int] | None = None,
) -> AxiomReport:
    """Both bijections as isomorphisms of Hom complexes, their inverses, and naturality.

    ``maps`` are closed A-B-bimodule maps u: M' -> M for the naturality square
    φr(Φ∘(u⊗id)) = φr(Φ)∘u.
    """
    out = Bimodules.over(first.left, second.right)
    ab = Bimodules.over(first.left, first.right)
    bd = Bimodules.over(second.left, second.right)
    t = relative_tensor(first, second, m, n, out=out)
    hr = right_hom(second, n, z, ab)
    hl = left_hom(first, m, z, bd)
    wanted = None if degrees is None else sorted(set(degrees))
    h0 = hom_complex(t.module, z, wanted, name=f"Hom({t.module.name}, {z.name})")
    span = wanted if wanted is not None else list(h0.built)
    h1 = hom_complex(m, hr.module, span, name=f"Hom({m.name}, {hr.module.name})")
    h2 = hom_complex(n, hl.module, span, name=f"Hom({n.name}, {hl.module.name})")

    report = AxiomReport(subject=f"{m.name} ⊠ {n.name} -> {z.name}", kind="adjunction")
    report.add("degreewise dimensions agree",
               None if h0.dims() == h1.dims() == h2.dims() else (h0.dims(), h1.dims(), h2.dims()))
    phi_r = transport(curry_right(t, hr), h0, h1)
    phi_l = transport(curry_left(t, hl), h0, h2)
    for label, f, tgt in (("φr", phi_r, h1), ("φl", phi_l, h2)):
        report.add(f"{label} chain map", _chain_map_witness(f, h0, tgt))
        report.add(f"{label} bijective", None if invert(f) is not None else label)
    back = transport(uncurry_right(t, hr, z), h1, h0)
    report.add("φr∘uncurry = id", (phi_r.compose(back) - GradedMap.identity(h1.space, m.field)).nonzero_witness())
    report.add("uncurry∘φr = id", (back.compose(phi_r) - GradedMap.identity(h0.space, m.field)).nonzero_witness())

    for u in maps:
        u.require_closed()
        t2 = relative_tensor(first, second, u.source, n, out=out)
        u_id = relative_tensor_map(u, ModMap.identity(n), t2, t)
        hr_curry = curry_right(t2, hr)
        base = curry_right(t, hr)
        witness = None
        for lab in h0.space.labels:
            phi = h0.maps[lab]
            lhs = hr_curry(phi.compose(u_id.map))
            rhs = base(phi).compose(u.map)
            if not lhs.equals(rhs):
                witness = (lab, (lhs - rhs).nonzero_witness())
                break
        report.add(f"φr natural in {u.name}", witness)
    log.info("adjunction verified", extra={"subject": report.subject, "passed": report.passed,
                                           "dims": h0.dims()})
    return report
