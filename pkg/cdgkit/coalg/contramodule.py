from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Any

from cdgkit.cdg.module import CDGModule
from cdgkit.coalg.coalgebra import CDGCoalgebra, dual_algebra
from cdgkit.core.errors import DegreeMismatch, NotFiniteDimensional
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import (
    GradedMap,
    GradedSpace,
    Label,
    Vector,
    Window,
    vec_add,
    vec_clean,
    vec_neg,
    vec_restrict,
    vec_sub,
)
from cdgkit.models.schemas import AxiomReport

ContraAction = dict[tuple[Label, Label], Vector]
"""(c, p) -> α(e_{c,p}), where e_{c,p} sends c to p and the other basis vectors to 0."""


@dataclass(frozen=True, eq=False)
class Contramodule:
    """A left CDG-contramodule with contraaction α: Hom_k(C, P) -> P.

    Contraassociativity identifies Hom(C⊗C, P) with Hom(C, Hom(C, P)) by
    f ↦ (c' ↦ (c ↦ (-1)^{|c||c'|} f(c⊗c'))). The natural C*-action is
    c*·p = (-1)^{|p||c|} α(e_{c,p}).

    When ``exact`` is set, identities are checked on those labels only and
    compared after projecting onto them.
    """

    coalgebra: CDGCoalgebra
    carrier: GradedSpace
    contraaction: ContraAction
    d: GradedMap
    name: str = "P"
    exact: frozenset[Label] | None = None
    exact_note: str | None = None

    @classmethod
    def build(
        cls,
        coalgebra: CDGCoalgebra,
        basis: Iterable[tuple[Label, int]] | GradedSpace,
        contraaction: Mapping[tuple[Label, Label], Mapping[Label, Any]],
        differential: Mapping[Label, Mapping[Label, Any]],
        *,
        name: str = "P",
        window: Window | None = None,
        exact: Iterable[Label] | None = None,
        exact_note: str | None = None,
    ) -> Contramodule:
        fld = coalgebra.field
        carrier = basis if isinstance(basis, GradedSpace) else GradedSpace.from_pairs(basis, window)
        cdeg, pdeg = coalgebra.carrier.degree_of, carrier.degree_of
        table: ContraAction = {}
        for (c, p), value in contraaction.items():
            vec = vec_clean({lab: fld.convert(v) for lab, v in value.items()})
            for q in vec:
                if pdeg[q] != pdeg[p] - cdeg[c]:
                    raise DegreeMismatch(what=f"contraaction on e_{{{c!r},{p!r}}}", expected=pdeg[p] - cdeg[c],
                                         actual=pdeg[q])
            if vec:
                table[(c, p)] = vec
        d = GradedMap.from_columns(carrier, carrier, 1, differential, fld)
        return cls(coalgebra, carrier, table, d, name, None if exact is None else frozenset(exact), exact_note)

    # -- structure ---------------------------------------------------------

    @property
    def field(self) -> Field:
        return self.coalgebra.field

    @property
    def window(self) -> Window:
        return self.carrier.window

    @property
    def labels(self) -> tuple[Label, ...]:
        return self.carrier.labels

    @property
    def dim(self) -> int:
        return self.carrier.dim

    def degree(self, label: Label) -> int:
        return self.carrier.degree_of[label]

    def contract_basis(self, c: Label, p: Label) -> Vector:
        return self.contraaction.get((c, p), {})

    def contract(self, c: Label, vec: Mapping[Label, Scalar]) -> Vector:
        """α(e_{c,v}) for a vector v, linear in v."""
        out: Vector = {}
        for p, x in vec.items():
            val = self.contraaction.get((c, p))
            if val:
                vec_add(out, val, x)
        return out

    def diff(self, vec: Mapping[Label, Scalar]) -> Vector:
        return self.d.apply(vec)

    def curvature_action(self, vec: Mapping[Label, Scalar]) -> Vector:
        """h·v = α(c ↦ h(c)v)."""
        out: Vector = {}
        for c, hc in self.coalgebra.h.items():
            vec_add(out, self.contract(c, vec), hc)
        return out

    @cached_property
    def _operators(self) -> dict[Label, GradedMap]:
        C = self.coalgebra
        out: dict[Label, GradedMap] = {}
        for c in C.labels:
            odd_c = C.degree(c) % 2
            cols = {}
            for p in self.labels:
                val = self.contract_basis(c, p)
                if val:
                    cols[p] = vec_neg(val) if odd_c and self.degree(p) % 2 else val
            out[c] = GradedMap.from_columns(self.carrier, self.carrier, -C.degree(c), cols, self.field,
                                            check_degrees=False)
        return out

    def dual_operator(self, c: Label) -> GradedMap:
        """p ↦ c*·p, of degree -|c|."""
        return self._operators[c]

    def structure_maps(self) -> dict[Label, GradedMap]:
        return self._operators

    def checkable(self) -> tuple[Label, ...]:
        if self.exact is None:
            return self.labels
        return tuple(p for p in self.labels if p in self.exact)

    def renamed(self, name: str) -> Contramodule:
        return Contramodule(self.coalgebra, self.carrier, self.contraaction, self.d, name,
                            self.exact, self.exact_note)

    def __repr__(self) -> str:
        return f"Contramodule({self.name} over {self.coalgebra.name}, dims={self.carrier.dims()})"

    # -- axioms ------------------------------------------------------------

    def check(self) -> AxiomReport:
        C = self.coalgebra
        report = AxiomReport(subject=self.name, kind="contramodule")
        window = str(self.window)
        note = self.exact_note if self.exact is not None else None
        keep = self.exact
        cdeg = C.carrier.degree_of
        one = self.field.one

        # (c, c') -> Σ_{c''} Δ^{(c,c')}_{c''} c''
        cotable: dict[tuple[Label, Label], Vector] = {}
        for x, delta in C.comult.items():
            for pair, v in delta.items():
                vec_add(cotable.setdefault(pair, {}), {x: v})
        # c -> {c'': [d c'']_c}
        d_transpose: dict[Label, Vector] = {}
        for x, col in C.d.columns.items():
            for c, v in col.items():
                d_transpose.setdefault(c, {})[x] = v

        def counity_fail() -> Any:
            for p in self.labels:
                out: Vector = {}
                for c, e in C.counit.items():
                    vec_add(out, self.contract_basis(c, p), e)
                if vec_sub(out, {p: one}):
                    return p
            return None

        def contraassoc_fail() -> Any:
            for (c, cp), coeffs in cotable.items():
                sign_odd = (cdeg[c] * cdeg[cp]) % 2
                for p in self.labels:
                    lhs: Vector = {}
                    for x, v in coeffs.items():
                        vec_add(lhs, self.contract_basis(x, p), v)
                    rhs = self.contract(cp, self.contract_basis(c, p))
                    if vec_sub(lhs, vec_neg(rhs) if sign_odd else rhs):
                        return (c, cp, p)
            return None

        def closed_fail() -> Any:
            for c in C.labels:
                for p in self.checkable():
                    lhs = self.diff(self.contract_basis(c, p))
                    rhs = self.contract(c, self.d.column(p))
                    odd = (self.degree(p) - cdeg[c]) % 2
                    for x, v in d_transpose.get(c, {}).items():
                        vec_add(rhs, self.contract_basis(x, p), v if odd else -v)
                    if vec_restrict(vec_sub(lhs, rhs), keep):
                        return (c, p)
            return None

        def curvature_fail() -> Any:
            for p in self.checkable():
                residual = vec_sub(self.diff(self.d.column(p)), self.curvature_action({p: one}))
                if vec_restrict(residual, keep):
                    return p
            return None

        report.add("counity", counity_fail(), window=window)
        report.add("contraassociativity", contraassoc_fail(), window=window)
        report.add("closed contraaction", closed_fail(), window=window, note=note)
        report.add("d squared = h", curvature_fail(), window=window, note=note)
        return report


# ---------------------------------------------------------------------------
# constructions

Twist = Callable[[Label, Label], Mapping[Label, Scalar]]
"""(y, v) -> extra terms of D(e_{y,v}) on a Hom_k(C, V) carrier."""


def hom_carrier(coalgebra: CDGCoalgebra, space: GradedSpace) -> GradedSpace:
    """Hom_k(C, V) with basis e_{y,v} = (y, v) in degree |v| - |y|."""
    pairs = [((y, v), space.degree_of[v] - coalgebra.degree(y)) for y in coalgebra.labels for v in space.labels]
    window = Window()
    for y in coalgebra.labels:
        window = window.intersect(space.window.shifted(coalgebra.degree(y)))
    return GradedSpace.from_pairs(pairs, window)


def free_contramodule(
    coalgebra: CDGCoalgebra,
    space: GradedSpace,
    d: GradedMap | None = None,
    *,
    twist: Twist | None = None,
    name: str | None = None,
    exact: Iterable[Label] | None = None,
    exact_note: str | None = None,
) -> Contramodule:
    """Hom_k(C, V) with α(e_{c, e_{y,v}}) = (-1)^{|y||c|} Σ_x Δ^{(y,c)}_x e_{x,v}.

    The differential is D(f) = d_V∘f - (-1)^{|f|} f∘d_C plus the optional
    twist; without a twist this is a CDG-contramodule only for uncurved C.
    """
    C = coalgebra
    fld = C.field
    carrier = hom_carrier(C, space)
    contraaction: ContraAction = {}
    for x, delta in C.comult.items():
        for (y, c), v in delta.items():
            coeff = -v if (C.degree(y) * C.degree(c)) % 2 else v
            for w in space.labels:
                vec_add(contraaction.setdefault((c, (y, w)), {}), {(x, w): coeff})
    d_transpose: dict[Label, Vector] = {}
    for x, col in C.d.columns.items():
        for y, v in col.items():
            d_transpose.setdefault(y, {})[x] = v
    diff: dict[Label, Vector] = {}
    for y, w in carrier.labels:
        col: Vector = {}
        if d is not None:
            col.update({(y, u): v for u, v in d.column(w).items()})
        odd = (space.degree_of[w] - C.degree(y)) % 2
        for x, v in d_transpose.get(y, {}).items():
            vec_add(col, {(x, w): v if odd else -v})
        if twist is not None:
            vec_add(col, twist(y, w))
        diff[(y, w)] = col
    return Contramodule.build(C, carrier, contraaction, diff, name=name or f"Hom({C.name}, V)",
                              exact=exact, exact_note=exact_note)


def hom_contraaction(coalgebra: CDGCoalgebra, c: Label, g: GradedMap) -> GradedMap:
    """α(e_{c,g})(x) = Σ (-1)^{|c||x₁|} Δ^{(x₁,c)}_x g(x₁) for a map g: C -> N."""
    C = coalgebra
    cols: dict[Label, Vector] = {}
    for x, delta in C.comult.items():
        for (x1, c2), v in delta.items():
            if c2 != c:
                continue
            val = g.column(x1)
            if val:
                coeff = -v if (C.degree(c) * C.degree(x1)) % 2 else v
                vec_add(cols.setdefault(x, {}), val, coeff)
    return GradedMap.from_columns(g.source, g.target, g.degree - C.degree(c), cols, g.field, check_degrees=False)


def _require_finite(coalgebra: CDGCoalgebra) -> None:
    if coalgebra.exact is not None:
        raise NotFiniteDimensional(what=f"{coalgebra.name} (only exact on a window)")


def to_dual_module(p: Contramodule, *, algebra: Any = None) -> CDGModule:
    """P as a left C*-module, c*·p = (-1)^{|p||c|} α(e_{c,p})."""
    C = p.coalgebra
    _require_finite(C)
    dual = algebra if algebra is not None else dual_algebra(C)
    action = {}
    for c in C.labels:
        for q, col in p.dual_operator(c).columns.items():
            action[(("*", c), q)] = col
    return CDGModule.build(dual, p.carrier, action, p.d.columns, name=f"{p.name}*")


def from_dual_module(coalgebra: CDGCoalgebra, module: CDGModule, *, name: str | None = None) -> Contramodule:
    """The inverse translation α(e_{c,p}) = (-1)^{|p||c|} c*·p."""
    _require_finite(coalgebra)
    C = coalgebra
    contraaction: ContraAction = {}
    for c in C.labels:
        star = ("*", c)
        odd_c = C.degree(c) % 2
        for q in module.labels:
            val = module.act_basis(star, q)
            if val:
                contraaction[(c, q)] = vec_neg(val) if odd_c and module.degree(q) % 2 else dict(val)
    return Contramodule(C, module.carrier, contraaction, module.d, name or module.name)
