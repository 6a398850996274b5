from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from cdgkit.core.errors import DegreeMismatch
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import (
    GradedMap,
    GradedSpace,
    Label,
    Vector,
    Window,
    tensor_space,
    vec_add,
    vec_clean,
    vec_neg,
    vec_sub,
)
from cdgkit.models.schemas import AxiomReport

ProductTable = dict[tuple[Label, Label], Vector]


@dataclass(frozen=True, eq=False)
class CDGAlgebra:
    """A curved DG algebra with a finite basis.

    Infinite nonnegatively graded algebras are represented by the quotient
    A/A^{>hi}; ``carrier.window`` then records the degrees on which the
    quotient agrees with A, and ``regenerate(hi)`` rebuilds it at another hi.
    """

    field: Field
    carrier: GradedSpace
    unit: Label
    table: ProductTable
    d: GradedMap
    h: Vector
    name: str = "A"
    regenerate: Callable[[int], CDGAlgebra] | None = field(default=None, repr=False)

    @classmethod
    def build(
        cls,
        fld: Field,
        basis: Iterable[tuple[Label, int]],
        unit: Label,
        products: Mapping[tuple[Label, Label], Mapping[Label, Any]],
        differential: Mapping[Label, Mapping[Label, Any]] | None = None,
        curvature: Mapping[Label, Any] | None = None,
        *,
        name: str = "A",
        window: Window | None = None,
        regenerate: Callable[[int], CDGAlgebra] | None = None,
    ) -> CDGAlgebra:
        carrier = GradedSpace.from_pairs(basis, window)
        if unit not in carrier or carrier.degree_of[unit] != 0:
            raise ValueError(f"unit {unit!r} must be a basis element of degree 0")
        deg = carrier.degree_of
        table: ProductTable = {}
        for (a, b), value in products.items():
            vec = vec_clean({lab: fld.convert(v) for lab, v in value.items()})
            for lab in vec:
                if deg[lab] != deg[a] + deg[b]:
                    raise DegreeMismatch(what=f"product {a!r}*{b!r}", expected=deg[a] + deg[b], actual=deg[lab])
            if vec:
                table[(a, b)] = vec
        for a in carrier.labels:
            table[(unit, a)] = {a: fld.one}
            table[(a, unit)] = {a: fld.one}
        d = GradedMap.from_columns(carrier, carrier, 1, differential or {}, fld)
        h = vec_clean({lab: fld.convert(v) for lab, v in (curvature or {}).items()})
        for lab in h:
            if deg[lab] != 2:
                raise DegreeMismatch(what="curvature", expected=2, actual=deg[lab])
        return cls(fld, carrier, unit, table, d, h, name, regenerate)

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

    def one(self) -> Vector:
        return {self.unit: self.field.one}

    def mul_basis(self, a: Label, b: Label) -> Vector:
        return self.table.get((a, b), {})

    def mul(self, u: Mapping[Label, Scalar], v: Mapping[Label, Scalar]) -> Vector:
        out: Vector = {}
        for a, x in u.items():
            for b, y in v.items():
                prod = self.table.get((a, b))
                if prod:
                    vec_add(out, prod, x * y)
        return out

    def diff(self, u: Mapping[Label, Scalar]) -> Vector:
        return self.d.apply(u)

    def commutator_h(self, u: Mapping[Label, Scalar]) -> Vector:
        return vec_sub(self.mul(self.h, u), self.mul(u, self.h))

    def reduced_labels(self) -> tuple[Label, ...]:
        """Basis of Ā = ker(ν) for the coordinate retraction onto the unit line."""
        return tuple(lab for lab in self.labels if lab != self.unit)

    @cached_property
    def _left_maps(self) -> dict[Label, GradedMap]:
        return {}

    def left_map(self, a: Label) -> GradedMap:
        """x ↦ a·x as a map of degree |a|."""
        cached = self._left_maps.get(a)
        if cached is None:
            cached = GradedMap.from_columns(
                self.carrier, self.carrier, self.degree(a),
                {b: self.mul_basis(a, b) for b in self.labels}, self.field, check_degrees=False,
            )
            self._left_maps[a] = cached
        return cached

    def at(self, hi: int) -> CDGAlgebra:
        if self.regenerate is None:
            raise ValueError(f"{self.name} has no regeneration rule")
        return self.regenerate(hi)

    def renamed(self, name: str) -> CDGAlgebra:
        return CDGAlgebra(self.field, self.carrier, self.unit, self.table, self.d, self.h, name, self.regenerate)

    def with_table(self, table: ProductTable) -> CDGAlgebra:
        return CDGAlgebra(self.field, self.carrier, self.unit, table, self.d, self.h, self.name, self.regenerate)

    def __repr__(self) -> str:
        return f"CDGAlgebra({self.name}, dims={self.carrier.dims()}, curved={self.is_curved})"

    # -- axioms ------------------------------------------------------------

    def check(self) -> AxiomReport:
        report = AxiomReport(subject=self.name, kind="algebra")
        window = str(self.window)
        labels = self.labels
        deg = self.carrier.degree_of
        basis = {lab: {lab: self.field.one} for lab in labels}

        report.add("unit", _first(
            a for a in labels
            if self.mul(self.one(), basis[a]) != basis[a] or self.mul(basis[a], self.one()) != basis[a]
        ), window=window)

        report.add("product degrees", _first(
            (a, b) for (a, b), v in self.table.items() if any(deg[c] != deg[a] + deg[b] for c in v)
        ), window=window)

        def assoc_fail() -> Any:
            for a, b, c in itertools.product(labels, repeat=3):
                left = self.mul(self.mul_basis(a, b), basis[c])
                right = self.mul(basis[a], self.mul_basis(b, c))
                if vec_sub(left, right):
                    return (a, b, c)
            return None

        report.add("associativity", assoc_fail(), window=window)

        def leibniz_fail() -> Any:
            for a, b in itertools.product(labels, repeat=2):
                lhs = self.diff(self.mul_basis(a, b))
                rhs = self.mul(self.diff(basis[a]), basis[b])
                term = self.mul(basis[a], self.diff(basis[b]))
                vec_add(rhs, term if deg[a] % 2 == 0 else vec_neg(term))
                if vec_sub(lhs, rhs):
                    return (a, b)
            return None

        report.add("leibniz", leibniz_fail(), window=window)
        report.add("curvature degree", _first(lab for lab in self.h if deg[lab] != 2), window=window)
        report.add("curvature closed", self.diff(self.h) or None, window=window)
        report.add("d squared", _first(
            a for a in labels
            if vec_sub(self.diff(self.diff(basis[a])), self.commutator_h(basis[a]))
        ), window=window)
        return report

    def check_operators(self) -> bool:
        """The axioms again, recomputed with left multiplication operators.

        An independent route to the same verdict as ``check`` for algebras
        whose product degrees are consistent.
        """
        fld = self.field
        left = {x: self.left_map(x) for x in self.labels}

        def comb(vec: Mapping[Label, Scalar], degree: int) -> GradedMap:
            out = GradedMap.zero(self.carrier, self.carrier, degree, fld)
            for c, v in vec.items():
                out = out + left[c].scaled(v)
            return out

        for x in self.labels:
            for y in self.labels:
                if not left[x].compose(left[y]).equals(comb(self.mul_basis(x, y), self.degree(x) + self.degree(y))):
                    return False
            leib = self.d.compose(left[x]) - left[x].compose(self.d).scaled(fld.sign(self.degree(x)))
            if not leib.equals(comb(self.diff({x: fld.one}), self.degree(x) + 1)):
                return False
        right_h = GradedMap.from_columns(self.carrier, self.carrier, 2,
                                         {b: self.mul({b: fld.one}, self.h) for b in self.labels},
                                         fld, check_degrees=False)
        if not self.d.compose(self.d).equals(comb(dict(self.h), 2) - right_h):
            return False
        return not self.diff(self.h)


def _first(it: Iterable[Any]) -> Any:
    return next(iter(it), None)


def opposite(b: CDGAlgebra) -> CDGAlgebra:
    """B^op: b·b' = (-1)^{|b||b'|} b'b, same d, curvature -h."""
    deg = b.carrier.degree_of
    table: ProductTable = {}
    for (x, y), v in b.table.items():
        table[(y, x)] = vec_neg(v) if (deg[x] * deg[y]) % 2 else dict(v)
    return CDGAlgebra(b.field, b.carrier, b.unit, table, b.d, vec_neg(b.h), f"{b.name}^op")


def tensor_algebra(a: CDGAlgebra, b: CDGAlgebra, *, name: str | None = None) -> CDGAlgebra:
    """A⊗B with (a⊗b)(a'⊗b') = (-1)^{|b||a'|} aa'⊗bb', d = d⊗1 + 1⊗d, h = h⊗1 + 1⊗h."""
    fld = a.field
    da, db = a.carrier.degree_of, b.carrier.degree_of
    carrier = tensor_space(a.carrier, b.carrier)
    table: ProductTable = {}
    for (x, xp), u in a.table.items():
        for (y, yp), v in b.table.items():
            odd = (db[y] * da[xp]) % 2
            table[((x, y), (xp, yp))] = {
                (p, q): -(s * t) if odd else s * t for p, s in u.items() for q, t in v.items()
            }
    diff: dict[Label, Vector] = {}
    for x in a.labels:
        dx = a.d.column(x)
        for y in b.labels:
            col: Vector = {(p, y): v for p, v in dx.items()}
            dy = b.d.column(y)
            odd = da[x] % 2
            vec_add(col, {(x, q): (-v if odd else v) for q, v in dy.items()})
            diff[(x, y)] = col
    h: Vector = {}
    vec_add(h, {(p, b.unit): v for p, v in a.h.items()})
    vec_add(h, {(a.unit, q): v for q, v in b.h.items()})
    window = carrier.window
    return CDGAlgebra.build(
        fld,
        zip(carrier.labels, carrier.degrees, strict=True),
        (a.unit, b.unit),
        table,
        diff,
        h,
        name=name or f"{a.name}⊗{b.name}",
        window=window,
    )


def bimodule_algebra(a: CDGAlgebra, b: CDGAlgebra) -> CDGAlgebra:
    """A⊗B^op, whose left modules are the A-B-bimodules."""
    return tensor_algebra(a, opposite(b), name=f"{a.name}⊗{b.name}^op")
