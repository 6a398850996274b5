"""A module that is not cofibrant: X = Λ(ε)⊗k[x] with d(1⊗1) = ε⊗x, over F_p.

Everything is built over B = k[ε]/(ε²), |ε| = 1:

    X        generators g_j = 1⊗x^j (degree 0, j ≤ J), d(g_j) = ε g_{j+1}
    ψ        k[-1] -> X, 1 ↦ ε⊗1
    T_λ^(S)  generators e_{λ,s} (degree 1, s ≤ S), d(e_s) = λε e_s + ε e_{s-1}
    φ        T^(S) = ⊕_λ T_λ^(S) -> k[-1], e_{λ,1} ↦ 1

φ is a weak equivalence against the rank one modules B_μ (d(1) = με), while
every degree 0 map X -> T vanishes: a lift of ψ through φ cannot exist.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from cdgkit.cdg.algebra import CDGAlgebra
from cdgkit.cdg.constructions import TwistedModule, trivial_module, twisted_module
from cdgkit.cdg.examples import exterior, power_label, rank_one
from cdgkit.cdg.hom import hom_complex
from cdgkit.cdg.module import CDGModule, ModMap
from cdgkit.core.logging import get_logger
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import Label
from cdgkit.models.schemas import AxiomReport, WEReport
from cdgkit.services.families import TestFamily, projective_family
from cdgkit.services.oracles import Telescope, we_projective_stable

log = get_logger(__name__)

EPS = "e"


def exterior_algebra(fld: Field) -> CDGAlgebra:
    return exterior(fld, 1, var=EPS)


def x_module(algebra: CDGAlgebra, top: int) -> TwistedModule:
    """B⊗k[x]/(x^{top+1}); the quotient of B⊗k[x] by the dg-submodule B⊗x^{>top}."""
    gens = [(power_label("x", j), 0) for j in range(top + 1)]
    conn = {power_label("x", j): {power_label("x", j + 1): {EPS: 1}} for j in range(top)}
    return twisted_module(algebra, gens, conn, name=f"X≤{top}")


def psi_map(algebra: CDGAlgebra, x: CDGModule) -> ModMap:
    k1 = trivial_module(algebra, 1, name="k[-1]")
    return ModMap.from_columns(k1, x, 0, {"k": {(EPS, "1"): 1}}, name="ψ")


def _gen(lam: Scalar, s: int, fld: Field) -> Label:
    return ("e", fld.to_text(lam), s)


def telescope_stage(algebra: CDGAlgebra, lambdas: Sequence[Scalar], depth: int) -> TwistedModule:
    """⊕_λ T_λ^(depth) as one twisted module."""
    fld = algebra.field
    gens = [(_gen(lam, s, fld), 1) for lam in lambdas for s in range(1, depth + 1)]
    conn: dict[Label, dict[Label, dict[Label, Scalar]]] = {}
    for lam in lambdas:
        for s in range(1, depth + 1):
            row: dict[Label, dict[Label, Scalar]] = {}
            if lam:
                row[_gen(lam, s, fld)] = {EPS: lam}
            if s > 1:
                row[_gen(lam, s - 1, fld)] = {EPS: fld.one}
            if row:
                conn[_gen(lam, s, fld)] = row
    label = ",".join(fld.to_text(lam) for lam in lambdas)
    return twisted_module(algebra, gens, conn, name=f"T[{label}]^({depth})")


def stage_inclusion(src: TwistedModule, tgt: TwistedModule) -> ModMap:
    unit = src.algebra.unit
    images = {(unit, v): {(unit, v): 1} for v in src.generator_degrees}
    return ModMap.from_generators(src, tgt, 0, images, name=f"ι{src.rank}")


def phi_map(stage: TwistedModule, target: CDGModule, lambdas: Sequence[Scalar]) -> ModMap:
    fld = stage.field
    unit = stage.algebra.unit
    images = {(unit, _gen(lam, 1, fld)): {"k": 1} for lam in lambdas}
    return ModMap.from_generators(stage, target, 0, images, name="φ")


@dataclass(frozen=True, eq=False)
class NotCofibrant:
    algebra: CDGAlgebra
    lambdas: tuple[Scalar, ...]
    x: TwistedModule
    psi: ModMap
    target: CDGModule
    telescope: Telescope
    phis: tuple[ModMap, ...]

    @property
    def top(self) -> TwistedModule:
        stage = self.telescope.stages[-1]
        assert isinstance(stage, TwistedModule)
        return stage

    def family(self, mus: Iterable[Scalar] | None = None) -> TestFamily:
        """{B_μ}: rank one modules with d(1) = μ ε."""
        fld = self.algebra.field
        members = [
            rank_one(self.algebra, {EPS: mu} if mu else {}, name=f"B_{fld.to_text(mu)}")
            for mu in (self.lambdas if mus is None else mus)
        ]
        return projective_family(members, name="B_μ")


def build(fld: Field, *, depth: int = 8, top: int = 8, lambdas: Iterable[Scalar] | None = None) -> NotCofibrant:
    """The full example; λ ranges over F_p unless a finite set is given."""
    algebra = exterior_algebra(fld)
    lams = tuple(fld.convert(lam) for lam in lambdas) if lambdas is not None else tuple(fld.elements())
    x = x_module(algebra, top)
    target = trivial_module(algebra, 1, name="k[-1]")
    stages = [telescope_stage(algebra, lams, s) for s in range(1, depth + 1)]
    inclusions = tuple(stage_inclusion(stages[i], stages[i + 1]) for i in range(depth - 1))
    telescope = Telescope(tuple(stages), inclusions, name="T")
    phis = tuple(phi_map(st, target, lams) for st in stages)
    log.info("notcofib example built", extra={"field": fld.name, "lambdas": len(lams), "depth": depth})
    return NotCofibrant(algebra, lams, x, psi_map(algebra, x), target, telescope, phis)


def restricted(example: NotCofibrant, lam: Scalar) -> NotCofibrant:
    """The single summand T_λ with its own φ_λ."""
    return build(example.algebra.field, depth=example.telescope.depth, top=len(example.x.generator_degrees) - 1,
                 lambdas=[lam])


def check(example: NotCofibrant) -> AxiomReport:
    """Declared structure: d_X(1⊗1) = ε⊗x, ψ closed, φ closed, Hom^0(X, T) = 0."""
    report = AxiomReport(subject=f"notcofib over {example.algebra.field.name}", kind="certificate")
    x = example.x
    unit = example.algebra.unit
    d1 = x.diff({(unit, "1"): x.field.one})
    report.add("d(1⊗1) = ε⊗x", None if d1 == {(EPS, "x"): x.field.one} else d1)
    report.add("ψ closed", example.psi.differential().nonzero_witness())
    report.add("ψ linear", example.psi.linearity_witness())
    for phi in example.phis:
        report.add(f"{phi.name} on stage {phi.source.name} closed", phi.differential().nonzero_witness())
    hom = hom_complex(x, example.top, [0])
    dim = hom.space.component_dim(0)
    report.add("Hom^0(X, T) = 0", None if dim == 0 else dim, note="so every map ρ with φ∘ρ = ψ is zero")
    return report


def stable_verdict(example: NotCofibrant, family: TestFamily | None = None) -> WEReport:
    return we_projective_stable(example.telescope, example.phis, family or example.family(),
                                subject=f"φ on {example.telescope.name}")
