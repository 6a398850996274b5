"""Bimodules as left modules over A⊗B^op: relative tensor products and one-sided Hom.

An A-B-bimodule M is a left A⊗B^op-module with (a⊗b)·m = (-1)^{|b||m|} a m b,
so the right action is m·b = (-1)^{|b||m|} (1⊗b)·m.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

from cdgkit.cdg.algebra import CDGAlgebra, bimodule_algebra
from cdgkit.cdg.constructions import TwistedModule, twisted_module
from cdgkit.cdg.hom import HomComplex, hom_complex
from cdgkit.cdg.module import ActionTable, CDGModule, ModMap
from cdgkit.core.errors import VerificationFailed
from cdgkit.core.logging import get_logger
from cdgkit.linalg.elimination import Subquotients, quotient_by
from cdgkit.linalg.graded import GradedMap, Label, Vector, tensor_space, vec_add, vec_neg, vec_sub

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Bimodules:
    """The category of A-B-bimodules, i.e. left modules over ``algebra`` = A⊗B^op."""

    left: CDGAlgebra
    right: CDGAlgebra
    algebra: CDGAlgebra

    @classmethod
    def over(cls, left: CDGAlgebra, right: CDGAlgebra) -> Bimodules:
        return cls(left, right, bimodule_algebra(left, right))

    @property
    def name(self) -> str:
        return f"{self.left.name}-{self.right.name}"

    def left_label(self, a: Label) -> Label:
        return (a, self.right.unit)

    def right_label(self, b: Label) -> Label:
        return (self.left.unit, b)

    def left_action(self, m: CDGModule, a: Label) -> GradedMap:
        return m.action_map(self.left_label(a))

    def right_action(self, m: CDGModule, b: Label) -> GradedMap:
        """x ↦ x·b."""
        op = m.action_map(self.right_label(b))
        if self.right.degree(b) % 2 == 0:
            return op
        cols = {x: vec_neg(v) if m.degree(x) % 2 else v for x, v in op.columns.items()}
        return GradedMap.from_columns(m.carrier, m.carrier, op.degree, cols, m.field, check_degrees=False)

    def free(
        self,
        generators: Iterable[tuple[Label, int]],
        differential: Mapping[Label, Mapping[Label, Any]] | None = None,
        *,
        name: str = "F",
    ) -> TwistedModule:
        """A⊗V⊗B for a complex V given by its basis and differential."""
        unit = self.algebra.unit
        conn = {v: {w: {unit: c} for w, c in row.items()} for v, row in (differential or {}).items()}
        return twisted_module(self.algebra, generators, conn, name=name)


# ---------------------------------------------------------------------------
# quotients


@dataclass(frozen=True, eq=False)
class QuotientModule:
    source: CDGModule
    module: CDGModule
    quotient: Subquotients

    @property
    def projection(self) -> ModMap:
        return ModMap(self.source, self.module, self.quotient.cokernel, f"π_{self.module.name}")

    def lift(self, q: Label) -> Label:
        return self.quotient.cokernel_lift[q]


def quotient_module(m: CDGModule, relations: Sequence[Mapping[Label, Any]], *,
                    name: str | None = None) -> QuotientModule:
    """M / span(relations); the span must already be a dg-submodule."""
    fld = m.field
    sq = quotient_by(m.carrier, relations, fld, window=m.window)
    one = fld.one
    for i, rel in enumerate(relations):
        if sq.project(m.diff(rel)):
            raise VerificationFailed(check="relations are closed under d", witness=i)
        for a in m.algebra.reduced_labels():
            if sq.project(m.act({a: one}, rel)):
                raise VerificationFailed(check="relations are closed under the action", witness=(a, i))
    carrier = sq.cokernel.target
    action: ActionTable = {}
    diff: dict[Label, Vector] = {}
    for q in carrier.labels:
        x = sq.cokernel_lift[q]
        for a in m.algebra.reduced_labels():
            image = m.act_basis(a, x)
            if image:
                action[(a, q)] = sq.project(image)
        diff[q] = sq.project(m.d.column(x))
    module = CDGModule.build(m.algebra, carrier, action, diff, name=name or f"{m.name}/R")
    return QuotientModule(m, module, sq)


# ---------------------------------------------------------------------------
# relative tensor product


@dataclass(frozen=True, eq=False)
class RelativeTensor:
    """M⊗_B N together with the projection from M⊗N."""

    left: CDGModule
    right: CDGModule
    module: CDGModule
    quotient: Subquotients

    def cls(self, x: Label, y: Label) -> Vector:
        return self.quotient.project({(x, y): self.module.field.one})

    def lift(self, q: Label) -> tuple[Label, Label]:
        return self.quotient.cokernel_lift[q]


def tensor_bimodule(first: Bimodules, second: Bimodules, m: CDGModule, n: CDGModule, out: Bimodules) -> CDGModule:
    """M⊗N over k as an A-D-bimodule.

    (a⊗δ)·(x⊗y) = (-1)^{|δ||x|} (a·x)⊗((1⊗δ)·y) and d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy.
    """
    D = second.right
    carrier = tensor_space(m.carrier, n.carrier)

    action: ActionTable = {}
    for a, delta in out.algebra.reduced_labels():
        odd = D.degree(delta) % 2
        for x, y in carrier.labels:
            ny = n.act_basis(second.right_label(delta), y)
            if not ny:
                continue
            mx = m.act_basis(first.left_label(a), x)
            if not mx:
                continue
            sign = -1 if odd and m.degree(x) % 2 else 1
            col: Vector = {}
            for x2, u in mx.items():
                for y2, v in ny.items():
                    vec_add(col, {(x2, y2): sign * u * v})
            if col:
                action[((a, delta), (x, y))] = col

    diff: dict[Label, Vector] = {}
    for x, y in carrier.labels:
        col = {(x2, y): v for x2, v in m.d.column(x).items()}
        odd = m.degree(x) % 2
        vec_add(col, {(x, y2): (-v if odd else v) for y2, v in n.d.column(y).items()})
        diff[(x, y)] = col
    return CDGModule.build(out.algebra, carrier, action, diff, name=f"{m.name}⊗{n.name}")


def balancing_relations(first: Bimodules, second: Bimodules, m: CDGModule, n: CDGModule) -> list[Vector]:
    """(x·b)⊗y - x⊗(b·y) for basis x, y and reduced b in B."""
    relations: list[Vector] = []
    for b in first.right.reduced_labels():
        right_b = first.right_action(m, b)
        left_b = n.action_map(second.left_label(b))
        for x in m.labels:
            xb = right_b.column(x)
            for y in n.labels:
                by = left_b.column(y)
                rel = vec_sub({(x2, y): v for x2, v in xb.items()}, {(x, y2): v for y2, v in by.items()})
                if rel:
                    relations.append(rel)
    return relations


def relative_tensor(
    first: Bimodules,
    second: Bimodules,
    m: CDGModule,
    n: CDGModule,
    *,
    out: Bimodules | None = None,
    name: str | None = None,
) -> RelativeTensor:
    """M⊗_B N for M an A-B- and N a B-D-bimodule: the coequalizer of M⊗B⊗N ⇉ M⊗N."""
    out = out or Bimodules.over(first.left, second.right)
    relations = balancing_relations(first, second, m, n)
    label = name or f"{m.name}⊗_{first.right.name}{n.name}"
    full = tensor_bimodule(first, second, m, n, out)
    quot = quotient_module(full, relations, name=label)
    log.debug("relative tensor", extra={"left": m.name, "right": n.name, "dims": quot.module.carrier.dims(),
                                        "relations": len(relations)})
    return RelativeTensor(m, n, quot.module, quot.quotient)


def relative_tensor_map(f: ModMap, g: ModMap, src: RelativeTensor, tgt: RelativeTensor) -> ModMap:
    """f⊗_B g: [x⊗y] ↦ (-1)^{|g||x|} [f(x)⊗g(y)]."""
    cols: dict[Label, Vector] = {}
    for q in src.module.labels:
        x, y = src.lift(q)
        fx, gy = f.map.column(x), g.map.column(y)
        if not fx or not gy:
            continue
        odd = (g.degree * f.source.degree(x)) % 2
        vec = {(x2, y2): (-(u * v) if odd else u * v) for x2, u in fx.items() for y2, v in gy.items()}
        image = tgt.quotient.project(vec)
        if image:
            cols[q] = image
    return ModMap.from_columns(src.module, tgt.module, f.degree + g.degree, cols, name=f"{f.name}⊗{g.name}")


# ---------------------------------------------------------------------------
# one-sided Hom bimodules


@dataclass(frozen=True, eq=False)
class HomBimodule:
    """A one-sided Hom space with its induced bimodule structure; ``hom`` holds the maps."""

    module: CDGModule
    hom: HomComplex


def _hom_module(hom: HomComplex, out: Bimodules, act: Any, name: str) -> HomBimodule:
    action: ActionTable = {}
    for lab, d in zip(hom.space.labels, hom.space.degrees, strict=True):
        h = hom.maps[lab]
        for x in out.algebra.reduced_labels():
            image = act(x, h, d)
            if image.is_zero:
                continue
            action[(x, lab)] = hom.coordinates(image)
    module = CDGModule.build(out.algebra, hom.space, action, hom.differential.columns, name=name)
    return HomBimodule(module, hom)


def right_hom(second: Bimodules, n: CDGModule, z: CDGModule, out: Bimodules, *,
              name: str | None = None) -> HomBimodule:
    """Hom_{D^op}(N, Z) as an A-B-bimodule: ((a⊗b)·h)(y) = (-1)^{|b||h|} a·h(b·y).

    N is a B-D-bimodule, Z an A-D-bimodule, ``out`` the A-B-bimodules.
    """
    D = second.right
    ops = [(n.action_map(second.right_label(d)), z.action_map((out.left.unit, d))) for d in D.reduced_labels()]
    hom = hom_complex(n, z, operators=ops, name=f"Hom_r({n.name}, {z.name})")

    def act(x: Label, h: GradedMap, deg: int) -> GradedMap:
        a, b = x
        comp = z.action_map((a, D.unit)).compose(h.compose(n.action_map(second.left_label(b))))
        return -comp if (out.right.degree(b) * deg) % 2 else comp

    return _hom_module(hom, out, act, name or f"Hom_r({n.name}, {z.name})")


def left_hom(first: Bimodules, m: CDGModule, z: CDGModule, out: Bimodules, *,
             name: str | None = None) -> HomBimodule:
    """Hom_A(M, Z) as a B-D-bimodule: ((b⊗δ)·h)(x) = (-1)^{|b|(|h|+|δ|)} h((1⊗b)·x)·δ.

    M is an A-B-bimodule, Z an A-D-bimodule, ``out`` the B-D-bimodules.
    """
    A = first.left
    ops = [(first.left_action(m, a), z.action_map((a, out.right.unit))) for a in A.reduced_labels()]
    hom = hom_complex(m, z, operators=ops, name=f"Hom_l({m.name}, {z.name})")

    def act(x: Label, h: GradedMap, deg: int) -> GradedMap:
        b, delta = x
        comp = z.action_map((A.unit, delta)).compose(h.compose(m.action_map(first.right_label(b))))
        odd = (out.left.degree(b) * (deg + out.right.degree(delta))) % 2
        return -comp if odd else comp

    return _hom_module(hom, out, act, name or f"Hom_l({m.name}, {z.name})")
