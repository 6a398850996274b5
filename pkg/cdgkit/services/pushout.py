"""Pushout products of bimodule maps over ⊗_B.

For f: U -> V (A-B-bimodules) and g: W -> X (B-D-bimodules)

    Z = (V⊗_B W ⊕ U⊗_B X) / {(f(u)⊗w, -u⊗g(w))}
    f□g: Z -> V⊗_B X,  (v⊗w, u⊗x) ↦ v⊗g(w) + f(u)⊗x
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from cdgkit.cdg.bimodule import (
    Bimodules,
    QuotientModule,
    RelativeTensor,
    balancing_relations,
    quotient_module,
    relative_tensor,
    relative_tensor_map,
    tensor_bimodule,
)
from cdgkit.cdg.constructions import TwistedModule, direct_sum
from cdgkit.cdg.generators import random_closed_map, random_scalar
from cdgkit.cdg.hom import hom_complex
from cdgkit.cdg.module import CDGModule, ModMap
from cdgkit.core.logging import get_logger
from cdgkit.linalg.elimination import invert, rank
from cdgkit.linalg.graded import GradedMap, Label, Vector, vec_add
from cdgkit.models.schemas import AxiomReport

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class PushoutProduct:
    f: ModMap
    g: ModMap
    vw: RelativeTensor
    ux: RelativeTensor
    uw: RelativeTensor
    vx: RelativeTensor
    total: CDGModule
    quotient: QuotientModule
    box: ModMap

    @property
    def module(self) -> CDGModule:
        return self.quotient.module

    def coprojection(self, tag: str) -> ModMap:
        """V⊗_B W -> Z or U⊗_B X -> Z."""
        part = self.vw if tag == "VW" else self.ux
        cols = {q: self.quotient.quotient.project({(tag, q): part.module.field.one}) for q in part.module.labels}
        return ModMap.from_columns(part.module, self.module, 0, cols, name=f"in_{tag}")


def _embed(tag: str, vec: Vector) -> Vector:
    return {(tag, lab): v for lab, v in vec.items()}


def pushout_product(first: Bimodules, second: Bimodules, f: ModMap, g: ModMap, *,
                    out: Bimodules | None = None) -> PushoutProduct:
    """Z as the stated quotient of V⊗_B W ⊕ U⊗_B X, and f□g: Z -> V⊗_B X."""
    f.require_closed()
    g.require_closed()
    if f.degree or g.degree:
        raise ValueError("pushout products are formed from degree 0 maps")
    out = out or Bimodules.over(first.left, second.right)
    u, v, w, x = f.source, f.target, g.source, g.target
    vw = relative_tensor(first, second, v, w, out=out)
    ux = relative_tensor(first, second, u, x, out=out)
    uw = relative_tensor(first, second, u, w, out=out)
    vx = relative_tensor(first, second, v, x, out=out)
    id_u, id_v = ModMap.identity(u), ModMap.identity(v)
    id_w, id_x = ModMap.identity(w), ModMap.identity(x)
    f_w = relative_tensor_map(f, id_w, uw, vw)
    u_g = relative_tensor_map(id_u, g, uw, ux)

    total = direct_sum([("VW", vw.module), ("UX", ux.module)], name=f"{vw.module.name}⊕{ux.module.name}")
    relations = []
    for q in uw.module.labels:
        rel = _embed("VW", f_w.map.column(q))
        vec_add(rel, _embed("UX", u_g.map.column(q)), -total.field.one)
        if rel:
            relations.append(rel)
    quot = quotient_module(total, relations, name=f"Z({f.name},{g.name})")

    v_g = relative_tensor_map(id_v, g, vw, vx)
    f_x = relative_tensor_map(f, id_x, ux, vx)
    cols: dict[Label, Vector] = {}
    for z in quot.module.labels:
        tag, q = quot.lift(z)
        cols[z] = (v_g if tag == "VW" else f_x).map.column(q)
    box = ModMap.from_columns(quot.module, vx.module, 0, cols, name=f"{f.name}□{g.name}")
    log.info("pushout product", extra={"f": f.name, "g": g.name, "dims": quot.module.carrier.dims()})
    return PushoutProduct(f, g, vw, ux, uw, vx, total, quot, box)


def check(pp: PushoutProduct) -> AxiomReport:
    report = AxiomReport(subject=pp.box.name, kind="certificate")
    report.add("Z is a module", None if pp.module.check().passed else pp.module.name)
    report.add("f□g linear", pp.box.linearity_witness())
    report.add("f□g closed", pp.box.differential().nonzero_witness())
    return report


def colimit_oracle(first: Bimodules, second: Bimodules, pp: PushoutProduct, *,
                   out: Bimodules | None = None) -> AxiomReport:
    """Rebuild Z from the unbalanced tensors in a single quotient and compare.

    Z' = (V⊗W ⊕ U⊗X) / (balancing relations of both summands + (f(u)⊗w, -u⊗g(w))).
    The comparison Z -> Z' sends each class to the class of the same pure
    tensor; it must be an isomorphism commuting with both coprojections.
    """
    out = out or Bimodules.over(first.left, second.right)
    f, g = pp.f, pp.g
    u, v, w, x = f.source, f.target, g.source, g.target
    vw = tensor_bimodule(first, second, v, w, out)
    ux = tensor_bimodule(first, second, u, x, out)
    total = direct_sum([("VW", vw), ("UX", ux)])
    relations = [_embed("VW", r) for r in balancing_relations(first, second, v, w)]
    relations += [_embed("UX", r) for r in balancing_relations(first, second, u, x)]
    one = v.field.one
    for a in u.labels:
        for b in w.labels:
            rel = _embed("VW", {(c, b): s for c, s in f.map.column(a).items()})
            vec_add(rel, _embed("UX", {(a, c): s for c, s in g.map.column(b).items()}), -one)
            if rel:
                relations.append(rel)
    other = quotient_module(total, relations, name="Z'")

    cols: dict[Label, Vector] = {}
    for z in pp.module.labels:
        tag, q = pp.quotient.lift(z)
        pure = (pp.vw if tag == "VW" else pp.ux).lift(q)
        cols[z] = other.quotient.project({(tag, pure): one})
    theta = ModMap.from_columns(pp.module, other.module, 0, cols, name="θ")

    report = AxiomReport(subject=f"colimit of {pp.box.name}", kind="isomorphism")
    report.add("θ linear", theta.linearity_witness())
    report.add("θ closed", theta.differential().nonzero_witness())
    report.add("θ invertible", None if invert(theta.map) is not None else theta.name)
    for tag, part, full in (("VW", pp.vw, vw), ("UX", pp.ux, ux)):
        lhs = theta.map.compose(pp.coprojection(tag).map).compose(part.quotient.cokernel.restricted(full.carrier))
        rhs_cols = {lab: other.quotient.project({(tag, lab): one}) for lab in full.labels}
        rhs = GradedMap.from_columns(full.carrier, other.module.carrier, 0, rhs_cols, v.field)
        report.add(f"θ commutes with in_{tag}", (lhs - rhs).nonzero_witness())
    return report


def is_injective(f: ModMap) -> bool:
    return f.source.dim == 0 or rank(f.map.matrix) == f.source.dim


# ---------------------------------------------------------------------------
# generating shapes


def generating_cofibration(bm: Bimodules, degrees: list[int], extra: list[int], *,
                           name: str = "i") -> ModMap:
    """id_A⊗i⊗id_B: A⊗V⊗B -> A⊗V'⊗B for V ⊂ V' = V ⊕ span(extra)."""
    src = bm.free([(f"v{i}", d) for i, d in enumerate(degrees)], name=f"F{len(degrees)}")
    tgt = bm.free([(f"v{i}", d) for i, d in enumerate(degrees)]
                  + [(f"w{i}", d) for i, d in enumerate(extra)], name=f"F{len(degrees)}+{len(extra)}")
    unit = bm.algebra.unit
    images = {(unit, g): {(unit, g): 1} for g in src.generator_degrees}
    return ModMap.from_generators(src, tgt, 0, images, name=name)


@dataclass(frozen=True, eq=False)
class TrivialCofibration:
    """f: U -> U ⊕ A⊗(k·c ⊕ k·sc)⊗B with d(sc) = c, and its retraction f'."""

    f: ModMap
    retraction: ModMap
    homotopy: GradedMap


def generating_trivial_cofibration(bm: Bimodules, degrees: list[int], cell: int, *,
                                   name: str = "j") -> TrivialCofibration:
    gens = [(f"v{i}", d) for i, d in enumerate(degrees)]
    src = bm.free(gens, name=f"F{len(degrees)}")
    tgt: TwistedModule = bm.free(gens + [("c", cell), ("sc", cell - 1)], {"sc": {"c": 1}},
                                 name=f"F{len(degrees)}+D{cell}")
    unit = bm.algebra.unit
    f = ModMap.from_generators(src, tgt, 0, {(unit, g): {(unit, g): 1} for g, _ in gens}, name=name)
    back = ModMap.from_generators(tgt, src, 0, {(unit, g): {(unit, g): 1} for g, _ in gens}, name=f"{name}'")
    h = ModMap.from_generators(tgt, tgt, -1, {(unit, "c"): {(unit, "sc"): 1}}, name="h")
    return TrivialCofibration(f, back, h.map)


def homotopy_inverse(pp: PushoutProduct, retraction: ModMap) -> ModMap:
    """ψ: V⊗_B X -> Z, v⊗x ↦ (0, f'(v)⊗x)."""
    x = pp.g.target
    back = relative_tensor_map(retraction, ModMap.identity(x), pp.vx, pp.ux)
    cols = {q: pp.quotient.quotient.project(_embed("UX", back.map.column(q))) for q in pp.vx.module.labels}
    return ModMap.from_columns(pp.vx.module, pp.module, 0, cols, name="ψ")


def verify_homotopy_inverse(pp: PushoutProduct, retraction: ModMap) -> AxiomReport:
    """ψ is closed and both composites are homotopic to the identity."""
    psi = homotopy_inverse(pp, retraction)
    report = AxiomReport(subject=f"ψ for {pp.box.name}", kind="certificate")
    report.add("ψ linear", psi.linearity_witness())
    report.add("ψ closed", psi.differential().nonzero_witness())
    for label, comp, mod in (
        ("f□g∘ψ ≃ id", pp.box.map.compose(psi.map), pp.vx.module),
        ("ψ∘f□g ≃ id", psi.map.compose(pp.box.map), pp.module),
    ):
        diff = comp - GradedMap.identity(mod.carrier, mod.field)
        hom = hom_complex(mod, mod, [-1, 0])
        found = hom.null_homotopy(diff)
        report.add(label, None if found is not None else mod.name)
    return report


def random_instance(bm_first: Bimodules, bm_second: Bimodules, rng: random.Random) -> tuple[ModMap, ModMap]:
    """Random closed maps between random small free bimodules (uncurved algebras only)."""

    def free(bm: Bimodules, tag: str) -> TwistedModule:
        size = rng.choice([1, 2])
        degrees = sorted(rng.choice([-1, 0, 1]) for _ in range(size))
        gens = [(f"{tag}{i}", d) for i, d in enumerate(degrees)]
        diff: dict[Label, dict[Label, object]] = {}
        for i, (gi, di) in enumerate(gens):
            for gj, dj in gens[i + 1:]:
                if dj == di + 1 and rng.random() < 0.5:
                    diff[gi] = {gj: random_scalar(bm.algebra.field, rng)}
        return bm.free(gens, diff, name=tag)

    f = random_closed_map(free(bm_first, "u"), free(bm_first, "v"), rng, name="f")
    g = random_closed_map(free(bm_second, "w"), free(bm_second, "x"), rng, name="g")
    return f, g


def battery(first: Bimodules, second: Bimodules, rng: random.Random, samples: int) -> list[AxiomReport]:
    """Random instances against the colimit oracle, then the generating shapes."""
    reports: list[AxiomReport] = []
    for _ in range(samples):
        f, g = random_instance(first, second, rng)
        pp = pushout_product(first, second, f, g)
        reports += [check(pp), colimit_oracle(first, second, pp)]
    i = generating_cofibration(first, [0], [1])
    i2 = generating_cofibration(second, [0], [0, 1], name="i'")
    shapes = AxiomReport(subject="generating cofibrations", kind="certificate")
    box = pushout_product(first, second, i, i2).box
    shapes.add(f"{box.name} injective", None if is_injective(box) else box.name)
    with_id = pushout_product(first, second, i, ModMap.identity(i2.target)).box
    shapes.add(f"{with_id.name} invertible", None if invert(with_id.map) is not None else with_id.name)
    reports.append(shapes)
    j = generating_trivial_cofibration(first, [0], 1)
    reports.append(verify_homotopy_inverse(pushout_product(first, second, j.f, i2), j.retraction))
    log.info("pushout battery", extra={"samples": samples, "passed": all(r.passed for r in reports)})
    return reports
