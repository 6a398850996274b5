from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Any

from cdgkit.cdg.algebra import CDGAlgebra
from cdgkit.core.errors import DegreeMismatch, NotClosed
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

ActionTable = dict[tuple[Label, Label], Vector]
FreeBasis = dict[Label, tuple[Label, Label, int]]
"""carrier label m -> (a, g, sign) meaning m = sign * a·g with g a generator."""


@dataclass(frozen=True, eq=False)
class CDGModule:
    """A left CDG-module: d(am) = d(a)m + (-1)^{|a|} a d(m) and d²m = hm.

    ``free_basis`` is set for graded-free modules (twisted modules and
    everything built from them by shifts, sums and cones); Hom complexes out
    of such a module are computed on generators.
    """

    algebra: CDGAlgebra
    carrier: GradedSpace
    action: ActionTable
    d: GradedMap
    name: str = "M"
    free_basis: FreeBasis | None = None
    exact: frozenset[Label] | None = None
    exact_note: str | None = None

    @classmethod
    def build(
        cls,
        algebra: CDGAlgebra,
        basis: Iterable[tuple[Label, int]] | GradedSpace,
        action: Mapping[tuple[Label, Label], Mapping[Label, Any]],
        differential: Mapping[Label, Mapping[Label, Any]],
        *,
        name: str = "M",
        window: Window | None = None,
        free_basis: FreeBasis | None = None,
    ) -> CDGModule:
        fld = algebra.field
        carrier = basis if isinstance(basis, GradedSpace) else GradedSpace.from_pairs(basis, window)
        adeg, mdeg = algebra.carrier.degree_of, carrier.degree_of
        table: ActionTable = {}
        for (a, m), value in action.items():
            vec = vec_clean({lab: fld.convert(v) for lab, v in value.items()})
            for lab in vec:
                if mdeg[lab] != adeg[a] + mdeg[m]:
                    raise DegreeMismatch(what=f"action {a!r}.{m!r}", expected=adeg[a] + mdeg[m], actual=mdeg[lab])
            if vec:
                table[(a, m)] = vec
        for m in carrier.labels:
            table[(algebra.unit, m)] = {m: fld.one}
        d = GradedMap.from_columns(carrier, carrier, 1, differential, fld)
        return cls(algebra, carrier, table, d, name, free_basis)

    # -- structure ---------------------------------------------------------

    @property
    def field(self) -> Field:
        return self.algebra.field

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

    @property
    def generators(self) -> list[Label]:
        if self.free_basis is None:
            return []
        unit = self.algebra.unit
        return [m for m, (a, g, s) in self.free_basis.items() if a == unit and g == m and s == 1]

    def act_basis(self, a: Label, m: Label) -> Vector:
        return self.action.get((a, m), {})

    def act(self, u: Mapping[Label, Scalar], v: Mapping[Label, Scalar]) -> Vector:
        out: Vector = {}
        for a, x in u.items():
            for m, y in v.items():
                prod = self.action.get((a, m))
                if prod:
                    vec_add(out, prod, x * y)
        return out

    def diff(self, v: Mapping[Label, Scalar]) -> Vector:
        return self.d.apply(v)

    @cached_property
    def _action_maps(self) -> dict[Label, GradedMap]:
        return {}

    def action_map(self, a: Label) -> GradedMap:
        """m ↦ a·m, of degree |a|."""
        cached = self._action_maps.get(a)
        if cached is None:
            cached = GradedMap.from_columns(
                self.carrier, self.carrier, self.algebra.degree(a),
                {m: self.act_basis(a, m) for m in self.labels}, self.field, check_degrees=False,
            )
            self._action_maps[a] = cached
        return cached

    def structure_maps(self) -> dict[Label, GradedMap]:
        return {a: self.action_map(a) for a in self.algebra.reduced_labels()}

    def checkable(self) -> tuple[Label, ...]:
        if self.exact is None:
            return self.labels
        return tuple(m for m in self.labels if m in self.exact)

    def renamed(self, name: str) -> CDGModule:
        return CDGModule(self.algebra, self.carrier, self.action, self.d, name, self.free_basis,
                         self.exact, self.exact_note)

    def __repr__(self) -> str:
        return f"CDGModule({self.name} over {self.algebra.name}, dims={self.carrier.dims()})"

    # -- axioms ------------------------------------------------------------

    def check(self) -> AxiomReport:
        A = self.algebra
        report = AxiomReport(subject=self.name, kind="module")
        window = str(self.window)
        adeg = A.carrier.degree_of
        one = self.field.one
        note = self.exact_note if self.exact is not None else None
        keep = self.exact

        def assoc_fail() -> Any:
            for a, b in itertools.product(A.labels, repeat=2):
                ab = A.mul_basis(a, b)
                for m in self.labels:
                    left = self.act({a: one}, self.act_basis(b, m))
                    if vec_sub(left, self.act(ab, {m: one})):
                        return (a, b, m)
            return None

        def leibniz_fail() -> Any:
            for a in A.labels:
                da = A.d.column(a)
                for m in self.checkable():
                    lhs = self.diff(self.act_basis(a, m))
                    rhs = self.act(da, {m: one})
                    term = self.act({a: one}, self.d.column(m))
                    vec_add(rhs, vec_neg(term) if adeg[a] % 2 else term)
                    if vec_restrict(vec_sub(lhs, rhs), keep):
                        return (a, m)
            return None

        def curvature_fail() -> Any:
            for m in self.checkable():
                if vec_restrict(vec_sub(self.diff(self.d.column(m)), self.act(A.h, {m: one})), keep):
                    return m
            return None

        report.add("unit", next(
            (m for m in self.labels if self.act_basis(A.unit, m) != {m: one}), None), window=window)
        report.add("associativity", assoc_fail(), window=window)
        report.add("leibniz", leibniz_fail(), window=window, note=note)
        report.add("d squared = h", curvature_fail(), window=window, note=note)
        return report


@dataclass(frozen=True, eq=False)
class ModMap:
    """A graded A-linear map f(am) = (-1)^{|f||a|} a f(m)."""

    source: CDGModule
    target: CDGModule
    map: GradedMap
    name: str = "f"

    @property
    def degree(self) -> int:
        return self.map.degree

    @property
    def field(self) -> Field:
        return self.source.field

    @classmethod
    def from_columns(cls, source: CDGModule, target: CDGModule, degree: int,
                     columns: Mapping[Label, Mapping[Label, Any]], *, name: str = "f") -> ModMap:
        gm = GradedMap.from_columns(source.carrier, target.carrier, degree, columns, source.field)
        return cls(source, target, gm, name)

    @classmethod
    def from_generators(cls, source: CDGModule, target: CDGModule, degree: int,
                        images: Mapping[Label, Mapping[Label, Any]], *, name: str = "f") -> ModMap:
        """Extend values on the generators of a graded-free source A-linearly."""
        if source.free_basis is None:
            raise ValueError(f"{source.name} is not graded-free")
        fld = source.field
        imgs = {g: {lab: fld.convert(v) for lab, v in img.items()} for g, img in images.items()}
        columns = extend_from_generators(source, target, degree, imgs)
        return cls.from_columns(source, target, degree, columns, name=name)

    @classmethod
    def identity(cls, module: CDGModule) -> ModMap:
        return cls(module, module, GradedMap.identity(module.carrier, module.field), f"id_{module.name}")

    @classmethod
    def zero(cls, source: CDGModule, target: CDGModule, degree: int = 0) -> ModMap:
        return cls(source, target, GradedMap.zero(source.carrier, target.carrier, degree, source.field), "0")

    def apply(self, vec: Mapping[Label, Scalar]) -> Vector:
        return self.map.apply(vec)

    def linearity_witness(self) -> tuple[Label, Label] | None:
        A = self.source.algebra
        n = self.degree
        one = self.field.one
        for a in A.reduced_labels():
            odd = (n * A.degree(a)) % 2
            for m in self.source.labels:
                lhs = self.apply(self.source.act_basis(a, m))
                rhs = self.target.act({a: one}, self.map.column(m))
                if vec_sub(lhs, vec_neg(rhs) if odd else rhs):
                    return (a, m)
        return None

    def differential(self) -> GradedMap:
        """D(f) = d_N∘f - (-1)^{|f|} f∘d_M."""
        first = self.target.d.compose(self.map)
        second = self.map.compose(self.source.d)
        return first - second if self.degree % 2 == 0 else first + second

    @property
    def is_closed(self) -> bool:
        return self.differential().is_zero

    def require_closed(self) -> None:
        dm = self.differential()
        if not dm.is_zero:
            raise NotClosed(name=self.name, witness=dm.nonzero_witness())

    def check(self) -> AxiomReport:
        report = AxiomReport(subject=self.name, kind="map")
        report.add("graded linear", self.linearity_witness())
        report.add("closed", self.differential().nonzero_witness())
        return report

    def compose(self, other: ModMap) -> ModMap:
        """self ∘ other."""
        return ModMap(other.source, self.target, self.map.compose(other.map), f"{self.name}∘{other.name}")

    def __matmul__(self, other: ModMap) -> ModMap:
        return self.compose(other)

    def __add__(self, other: ModMap) -> ModMap:
        return ModMap(self.source, self.target, self.map + other.map, f"{self.name}+{other.name}")

    def __sub__(self, other: ModMap) -> ModMap:
        return ModMap(self.source, self.target, self.map - other.map, f"{self.name}-{other.name}")

    def __neg__(self) -> ModMap:
        return ModMap(self.source, self.target, -self.map, f"-{self.name}")

    def scaled(self, c: Any) -> ModMap:
        return ModMap(self.source, self.target, self.map.scaled(c), self.name)

    def equals(self, other: ModMap) -> bool:
        return self.map.equals(other.map)

    def renamed(self, name: str) -> ModMap:
        return ModMap(self.source, self.target, self.map, name)

    def __repr__(self) -> str:
        return f"ModMap({self.name}: {self.source.name} -> {self.target.name}, degree={self.degree})"


def extend_from_generators(source: CDGModule, target: CDGModule, degree: int,
                           images: Mapping[Label, Mapping[Label, Scalar]]) -> dict[Label, Vector]:
    """Columns of the A-linear map with f(g) = images[g]; f(s·a·g) = s(-1)^{n|a|} a f(g)."""
    assert source.free_basis is not None
    A = source.algebra
    one = source.field.one
    columns: dict[Label, Vector] = {}
    for m, (a, g, sign) in source.free_basis.items():
        img = images.get(g)
        if not img:
            continue
        val = target.act({a: one}, img)
        if (sign < 0) != bool((degree * A.degree(a)) % 2):
            val = vec_neg(val)
        columns[m] = val
    return columns
