from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Any

from cdgkit.cdg.algebra import CDGAlgebra, ProductTable
from cdgkit.core.errors import DegreeMismatch
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import GradedMap, GradedSpace, Label, Vector, Window, vec_add, vec_clean, vec_sub
from cdgkit.models.schemas import AxiomReport

Comultiplication = dict[Label, Vector]
"""c -> Σ coefficient·(c₁, c₂)."""


@dataclass(frozen=True, eq=False)
class CDGCoalgebra:
    """A curved DG coalgebra with a finite basis.

    ``h`` is the curvature functional, nonzero only on degree -2, and the
    axioms read d²(c) = h(c₁)c₂ - c₁h(c₂) and h∘d = 0.

    ``exact`` is None for an honest coalgebra. Truncations whose
    differential leaves the carrier set it to the labels on which every
    identity involving d can be evaluated; ``exact_note`` says why.
    """

    field: Field
    carrier: GradedSpace
    comult: Comultiplication
    counit: Vector
    d: GradedMap
    h: Vector
    name: str = "C"
    exact: frozenset[Label] | None = None
    exact_note: str | None = None

    @classmethod
    def build(
        cls,
        fld: Field,
        basis: Iterable[tuple[Label, int]],
        comult: Mapping[Label, Mapping[tuple[Label, Label], Any]],
        counit: Mapping[Label, Any],
        differential: Mapping[Label, Mapping[Label, Any]] | None = None,
        curvature: Mapping[Label, Any] | None = None,
        *,
        name: str = "C",
        window: Window | None = None,
        exact: Iterable[Label] | None = None,
        exact_note: str | None = None,
    ) -> CDGCoalgebra:
        carrier = GradedSpace.from_pairs(basis, window)
        deg = carrier.degree_of
        table: Comultiplication = {}
        for c, value in comult.items():
            vec = vec_clean({pair: fld.convert(v) for pair, v in value.items()})
            for a, b in vec:
                if deg[a] + deg[b] != deg[c]:
                    raise DegreeMismatch(what=f"comultiplication of {c!r}", expected=deg[c], actual=deg[a] + deg[b])
            if vec:
                table[c] = vec
        eps = vec_clean({c: fld.convert(v) for c, v in counit.items()})
        for c in eps:
            if deg[c] != 0:
                raise DegreeMismatch(what="counit", expected=0, actual=deg[c])
        h = vec_clean({c: fld.convert(v) for c, v in (curvature or {}).items()})
        for c in h:
            if deg[c] != -2:
                raise DegreeMismatch(what="curvature functional", expected=-2, actual=deg[c])
        d = GradedMap.from_columns(carrier, carrier, 1, differential or {}, fld)
        return cls(fld, carrier, table, eps, d, h, name,
                   None if exact is None else frozenset(exact), exact_note)

    # -- structure ---------------------------------------------------------

    @property
    def window(self) -> Window:
        return self.carrier.window

    @property
    def labels(self) -> tuple[Label, ...]:
        return self.carrier.labels

    @property
    def dim(self) -> int:
        return self.carrier.dim

    @property
    def is_curved(self) -> bool:
        return bool(self.h)

    def degree(self, label: Label) -> int:
        return self.carrier.degree_of[label]

    def comult_basis(self, c: Label) -> Vector:
        return self.comult.get(c, {})

    def comultiply(self, vec: Mapping[Label, Scalar]) -> Vector:
        out: Vector = {}
        for c, x in vec.items():
            vec_add(out, self.comult_basis(c), x)
        return out

    def diff(self, vec: Mapping[Label, Scalar]) -> Vector:
        return self.d.apply(vec)

    def evaluate(self, functional: Mapping[Label, Scalar], vec: Mapping[Label, Scalar]) -> Scalar:
        total = self.field.zero
        for c, x in vec.items():
            y = functional.get(c)
            if y:
                total += x * y
        return total

    def checkable(self) -> tuple[Label, ...]:
        if self.exact is None:
            return self.labels
        return tuple(c for c in self.labels if c in self.exact)

    def curvature_terms(self, c: Label) -> Vector:
        """h(c₁)c₂ - c₁h(c₂)."""
        out: Vector = {}
        for (a, b), x in self.comult_basis(c).items():
            ha, hb = self.h.get(a), self.h.get(b)
            if ha:
                vec_add(out, {b: x * ha})
            if hb:
                vec_add(out, {a: -(x * hb)})
        return vec_clean(out)

    def renamed(self, name: str) -> CDGCoalgebra:
        return CDGCoalgebra(self.field, self.carrier, self.comult, self.counit, self.d, self.h, name,
                            self.exact, self.exact_note)

    def __repr__(self) -> str:
        return f"CDGCoalgebra({self.name}, dims={self.carrier.dims()}, curved={self.is_curved})"

    # -- axioms ------------------------------------------------------------

    def check(self) -> AxiomReport:
        report = AxiomReport(subject=self.name, kind="coalgebra")
        window = str(self.window)
        note = self.exact_note if self.exact is not None else None
        deg = self.carrier.degree_of
        one = self.field.one

        def coassoc_fail() -> Any:
            for c in self.labels:
                left: Vector = {}
                right: Vector = {}
                for (a, b), x in self.comult_basis(c).items():
                    for (a1, a2), y in self.comult_basis(a).items():
                        vec_add(left, {(a1, a2, b): x * y})
                    for (b1, b2), y in self.comult_basis(b).items():
                        vec_add(right, {(a, b1, b2): x * y})
                if vec_sub(left, right):
                    return c
            return None

        def counit_fail() -> Any:
            for c in self.labels:
                left: Vector = {}
                right: Vector = {}
                for (a, b), x in self.comult_basis(c).items():
                    ea, eb = self.counit.get(a), self.counit.get(b)
                    if ea:
                        vec_add(left, {b: x * ea})
                    if eb:
                        vec_add(right, {a: x * eb})
                if vec_sub(left, {c: one}) or vec_sub(right, {c: one}):
                    return c
            return None

        def coleibniz_fail() -> Any:
            for c in self.checkable():
                lhs = self.comultiply(self.d.column(c))
                rhs: Vector = {}
                for (a, b), x in self.comult_basis(c).items():
                    for a2, y in self.d.column(a).items():
                        vec_add(rhs, {(a2, b): x * y})
                    sign = -x if deg[a] % 2 else x
                    for b2, y in self.d.column(b).items():
                        vec_add(rhs, {(a, b2): sign * y})
                if vec_sub(lhs, rhs):
                    return c
            return None

        report.add("coassociativity", coassoc_fail(), window=window)
        report.add("counit", counit_fail(), window=window)
        report.add("co-leibniz", coleibniz_fail(), window=window, note=note)
        report.add("curvature degree", _first(c for c in self.h if deg[c] != -2), window=window)
        report.add("curvature closed", _first(
            c for c in self.checkable() if self.evaluate(self.h, self.d.column(c))
        ), window=window, note=note)
        report.add("d squared", _first(
            c for c in self.checkable()
            if vec_sub(self.diff(self.d.column(c)), self.curvature_terms(c))
        ), window=window, note=note)
        return report


def _first(it: Iterable[Any]) -> Any:
    return next(iter(it), None)


def _dual_window(window: Window) -> Window:
    return Window(None if window.hi is None else -window.hi, None if window.lo is None else -window.lo)


def dual_coalgebra(algebra: CDGAlgebra, *, name: str | None = None) -> CDGCoalgebra:
    """A* with x* in degree -|x|.

    Δ(x*) = Σ m^x_{ab} b*⊗a* where ab = Σ m^x_{ab} x, d(x*) = -Σ (-1)^{|a|} [da]_x a*
    and h(x*) is the coefficient of x in h_A; the dual algebra of A* is A again.
    """
    fld = algebra.field
    star = {a: ("*", a) for a in algebra.labels}
    basis = [(star[a], -algebra.degree(a)) for a in algebra.labels]
    comult: dict[Label, Vector] = {}
    for (a, b), prod in algebra.table.items():
        for x, m in prod.items():
            vec_add(comult.setdefault(star[x], {}), {(star[b], star[a]): m})
    diff: dict[Label, Vector] = {}
    for a in algebra.labels:
        sign = 1 if algebra.degree(a) % 2 else -1
        for x, v in algebra.d.column(a).items():
            vec_add(diff.setdefault(star[x], {}), {star[a]: sign * v})
    curvature = {star[x]: v for x, v in algebra.h.items()}
    return CDGCoalgebra.build(
        fld, basis, comult, {star[algebra.unit]: 1}, diff, curvature,
        name=name or f"{algebra.name}*", window=_dual_window(algebra.window),
    )


def dual_algebra(coalgebra: CDGCoalgebra, *, name: str | None = None) -> CDGAlgebra:
    """C* with (φψ)(c) = ψ(c₁)φ(c₂), d(φ) = -(-1)^{|φ|} φ∘d and curvature h.

    The unit is the counit, so the counit has to be a single dual basis vector.
    """
    if len(coalgebra.counit) != 1 or next(iter(coalgebra.counit.values())) != coalgebra.field.one:
        raise ValueError(f"the counit of {coalgebra.name} is not a dual basis vector")
    fld = coalgebra.field
    star = {c: ("*", c) for c in coalgebra.labels}
    basis = [(star[c], -coalgebra.degree(c)) for c in coalgebra.labels]
    products: ProductTable = {}
    for x, delta in coalgebra.comult.items():
        for (a, b), v in delta.items():
            # c*·c'* picks out the (c', c) component of Δ
            vec_add(products.setdefault((star[b], star[a]), {}), {star[x]: v})
    diff: dict[Label, Vector] = {}
    for x in coalgebra.labels:
        for c, v in coalgebra.d.column(x).items():
            sign = 1 if coalgebra.degree(c) % 2 else -1
            vec_add(diff.setdefault(star[c], {}), {star[x]: sign * v})
    (unit,) = coalgebra.counit
    return CDGAlgebra.build(
        fld, basis, star[unit], products, diff, {star[c]: v for c, v in coalgebra.h.items()},
        name=name or f"{coalgebra.name}*", window=_dual_window(coalgebra.window),
    )

