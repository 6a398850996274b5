from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any

from cdgkit.coalg.coalgebra import CDGCoalgebra
from cdgkit.coalg.morphism import StructMap
from cdgkit.core.errors import DegreeMismatch, NotExact
from cdgkit.core.logging import get_logger
from cdgkit.linalg.elimination import subquotients
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
    vec_sub,
)
from cdgkit.models.schemas import AxiomReport

log = get_logger(__name__)

Coaction = dict[Label, Vector]
"""n -> Σ coefficient·(c, n'), i.e. ρ(n) = n₋₁⊗n₀."""


@dataclass(frozen=True, eq=False)
class Comodule:
    """A left CDG-comodule: ρ(dn) = d(n₋₁)⊗n₀ + (-1)^{|n₋₁|} n₋₁⊗d(n₀), d²n = h(n₋₁)n₀."""

    coalgebra: CDGCoalgebra
    carrier: GradedSpace
    coaction: Coaction
    d: GradedMap
    name: str = "N"
    exact: frozenset[Label] | None = None
    exact_note: str | None = None

    @classmethod
    def build(
        cls,
        coalgebra: CDGCoalgebra,
        basis: Iterable[tuple[Label, int]] | GradedSpace,
        coaction: Mapping[Label, Mapping[tuple[Label, Label], Any]],
        differential: Mapping[Label, Mapping[Label, Any]],
        *,
        name: str = "N",
        window: Window | None = None,
        exact: Iterable[Label] | None = None,
        exact_note: str | None = None,
    ) -> Comodule:
        fld = coalgebra.field
        carrier = basis if isinstance(basis, GradedSpace) else GradedSpace.from_pairs(basis, window)
        cdeg, ndeg = coalgebra.carrier.degree_of, carrier.degree_of
        table: Coaction = {}
        for n, value in coaction.items():
            vec = vec_clean({pair: fld.convert(v) for pair, v in value.items()})
            for c, m in vec:
                if cdeg[c] + ndeg[m] != ndeg[n]:
                    raise DegreeMismatch(what=f"coaction of {n!r}", expected=ndeg[n], actual=cdeg[c] + ndeg[m])
            if vec:
                table[n] = vec
        d = GradedMap.from_columns(carrier, carrier, 1, differential, fld, check_degrees=False)
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

    def coact_basis(self, n: Label) -> Vector:
        return self.coaction.get(n, {})

    def coact(self, vec: Mapping[Label, Scalar]) -> Vector:
        out: Vector = {}
        for n, x in vec.items():
            vec_add(out, self.coact_basis(n), x)
        return out

    def diff(self, vec: Mapping[Label, Scalar]) -> Vector:
        return self.d.apply(vec)

    @cached_property
    def _components(self) -> dict[Label, GradedMap]:
        cols: dict[Label, dict[Label, Vector]] = {c: {} for c in self.coalgebra.labels}
        for n, vec in self.coaction.items():
            for (c, m), x in vec.items():
                cols[c].setdefault(n, {})[m] = x
        return {
            c: GradedMap.from_columns(self.carrier, self.carrier, -self.coalgebra.degree(c), col,
                                      self.field, check_degrees=False)
            for c, col in cols.items()
        }

    def structure_maps(self) -> dict[Label, GradedMap]:
        return self._components

    def checkable(self) -> tuple[Label, ...]:
        if self.exact is None:
            return self.labels
        return tuple(n for n in self.labels if n in self.exact)

    def renamed(self, name: str) -> Comodule:
        return Comodule(self.coalgebra, self.carrier, self.coaction, self.d, name, self.exact, self.exact_note)

    def __repr__(self) -> str:
        return f"Comodule({self.name} over {self.coalgebra.name}, dims={self.carrier.dims()})"

    # -- axioms ------------------------------------------------------------

    def check(self) -> AxiomReport:
        C = self.coalgebra
        report = AxiomReport(subject=self.name, kind="comodule")
        window = str(self.window)
        note = self.exact_note if self.exact is not None else None
        cdeg = C.carrier.degree_of
        one = self.field.one

        def coassoc_fail() -> Any:
            for n in self.labels:
                left: Vector = {}
                right: Vector = {}
                for (c, m), x in self.coact_basis(n).items():
                    for (c1, c2), y in C.comult_basis(c).items():
                        vec_add(left, {(c1, c2, m): x * y})
                    for (c2, m2), y in self.coact_basis(m).items():
                        vec_add(right, {(c, c2, m2): x * y})
                if vec_sub(left, right):
                    return n
            return None

        def counit_fail() -> Any:
            for n in self.labels:
                out: Vector = {}
                for (c, m), x in self.coact_basis(n).items():
                    e = C.counit.get(c)
                    if e:
                        vec_add(out, {m: x * e})
                if vec_sub(out, {n: one}):
                    return n
            return None

        def coleibniz_fail() -> Any:
            for n in self.checkable():
                lhs = self.coact(self.d.column(n))
                rhs: Vector = {}
                for (c, m), x in self.coact_basis(n).items():
                    for c2, y in C.d.column(c).items():
                        vec_add(rhs, {(c2, m): x * y})
                    sign = -x if cdeg[c] % 2 else x
                    for m2, y in self.d.column(m).items():
                        vec_add(rhs, {(c, m2): sign * y})
                if vec_sub(lhs, rhs):
                    return n
            return None

        def curvature_fail() -> Any:
            for n in self.checkable():
                rhs: Vector = {}
                for (c, m), x in self.coact_basis(n).items():
                    hc = C.h.get(c)
                    if hc:
                        vec_add(rhs, {m: x * hc})
                if vec_sub(self.diff(self.d.column(n)), rhs):
                    return n
            return None

        report.add("coassociativity", coassoc_fail(), window=window)
        report.add("counit", counit_fail(), window=window)
        report.add("co-leibniz", coleibniz_fail(), window=window, note=note)
        report.add("d squared = h", curvature_fail(), window=window, note=note)
        return report


@dataclass(frozen=True, eq=False)
class RightComodule:
    """A right comodule, ρ(n) = n₀⊗n₁, stored as n -> Σ coefficient·(n', c)."""

    coalgebra: CDGCoalgebra
    carrier: GradedSpace
    coaction: Coaction
    d: GradedMap
    name: str = "N"

    @property
    def labels(self) -> tuple[Label, ...]:
        return self.carrier.labels

    def degree(self, label: Label) -> int:
        return self.carrier.degree_of[label]


def right_regular(coalgebra: CDGCoalgebra) -> RightComodule:
    """C as a right comodule over itself through Δ."""
    return RightComodule(coalgebra, coalgebra.carrier, dict(coalgebra.comult), coalgebra.d, coalgebra.name)


def regular_comodule(coalgebra: CDGCoalgebra) -> Comodule:
    """C as a left comodule through Δ.

    Its square of d is h(c₁)c₂ - c₁h(c₂), so this is a CDG-comodule only when
    C is uncurved; it still serves as the source of Hom_C(C, N).
    """
    return Comodule(coalgebra, coalgebra.carrier, dict(coalgebra.comult), coalgebra.d, coalgebra.name,
                    coalgebra.exact, coalgebra.exact_note)


def cofree_comodule(coalgebra: CDGCoalgebra, space: GradedSpace, d: GradedMap | None = None,
                    *, name: str | None = None) -> Comodule:
    """C⊗V with ρ(c⊗v) = c₁⊗(c₂⊗v) and d(c⊗v) = dc⊗v + (-1)^{|c|} c⊗dv; needs h = 0."""
    fld = coalgebra.field
    carrier = tensor_space(coalgebra.carrier, space)
    coaction: Coaction = {}
    diff: dict[Label, Vector] = {}
    for c, v in carrier.labels:
        coaction[(c, v)] = {(c1, (c2, v)): x for (c1, c2), x in coalgebra.comult_basis(c).items()}
        col: Vector = {(c2, v): x for c2, x in coalgebra.d.column(c).items()}
        if d is not None:
            odd = coalgebra.degree(c) % 2
            vec_add(col, {(c, w): (-x if odd else x) for w, x in d.column(v).items()})
        diff[(c, v)] = col
    return Comodule.build(coalgebra, carrier, coaction, diff, name=name or f"{coalgebra.name}⊗V")


def shift_comodule(n: Comodule, k: int, *, name: str | None = None) -> Comodule:
    """N[k]: degrees drop by k, d picks up (-1)^k, ρ(s^k n) = (-1)^{k|n₋₁|} n₋₁⊗s^k n₀."""
    C = n.coalgebra
    carrier = GradedSpace(n.carrier.labels, tuple(d - k for d in n.carrier.degrees), n.window.shifted(k))
    coaction: Coaction = {}
    for x, vec in n.coaction.items():
        coaction[x] = {(c, m): (-v if (k * C.degree(c)) % 2 else v) for (c, m), v in vec.items()}
    d = GradedMap(carrier, carrier, 1, -n.d.matrix if k % 2 else n.d.matrix, n.field)
    return Comodule(C, carrier, coaction, d, name or f"{n.name}[{k}]", n.exact, n.exact_note)


def comodule_sum(parts: Sequence[tuple[Hashable, Comodule]], *, name: str | None = None) -> Comodule:
    C = parts[0][1].coalgebra
    pairs: list[tuple[Label, int]] = []
    coaction: Coaction = {}
    diff: dict[Label, Vector] = {}
    window = Window()
    for tag, mod in parts:
        window = window.intersect(mod.window)
        pairs.extend(((tag, x), d) for x, d in zip(mod.labels, mod.carrier.degrees, strict=True))
        for x, vec in mod.coaction.items():
            coaction[(tag, x)] = {(c, (tag, m)): v for (c, m), v in vec.items()}
        for x in mod.labels:
            diff[(tag, x)] = {(tag, y): v for y, v in mod.d.column(x).items()}
    carrier = GradedSpace.from_pairs(pairs, window)
    d = GradedMap.from_columns(carrier, carrier, 1, diff, C.field, check_degrees=False)
    return Comodule(C, carrier, coaction, d, name or "⊕".join(m.name for _, m in parts))


def comodule_cone(f: StructMap, *, name: str | None = None) -> Comodule:
    """cone(f: M -> N) = N ⊕ M[1] with d(n, sm) = (dn + f(m), -s dm)."""
    if f.degree != 0:
        raise ValueError("cone needs a degree 0 map")
    f.require_closed()
    m, n = f.source, f.target
    assert isinstance(m, Comodule) and isinstance(n, Comodule)
    C = m.coalgebra
    pairs: list[tuple[Label, int]] = [(("N", y), n.degree(y)) for y in n.labels]
    pairs += [(("M", x), m.degree(x) - 1) for x in m.labels]
    coaction: Coaction = {}
    for y, vec in n.coaction.items():
        coaction[("N", y)] = {(c, ("N", z)): v for (c, z), v in vec.items()}
    for x, vec in m.coaction.items():
        coaction[("M", x)] = {(c, ("M", z)): (-v if C.degree(c) % 2 else v) for (c, z), v in vec.items()}
    diff: dict[Label, Vector] = {}
    for y in n.labels:
        diff[("N", y)] = {("N", z): v for z, v in n.d.column(y).items()}
    for x in m.labels:
        col: Vector = {("N", z): v for z, v in f.map.column(x).items()}
        vec_add(col, {("M", z): -v for z, v in m.d.column(x).items()})
        diff[("M", x)] = col
    carrier = GradedSpace.from_pairs(pairs, n.window.intersect(m.window.shifted(1)))
    d = GradedMap.from_columns(carrier, carrier, 1, diff, C.field, check_degrees=False)
    return Comodule(C, carrier, coaction, d, name or f"cone({f.name})")


def _require_exact(f: StructMap, g: StructMap) -> None:
    if not g.map.compose(f.map).is_zero:
        raise NotExact(stage="g∘f", witness=g.map.compose(f.map).nonzero_witness())
    sf, sg = subquotients(f.map), subquotients(g.map)
    if sf.kernel.source.dim:
        raise NotExact(stage=f.source.name, witness=sf.kernel.source.labels[0])
    if sg.cokernel.target.dim:
        raise NotExact(stage=g.target.name, witness=sg.cokernel.target.labels[0])
    ker_g, im_f = sg.kernel.source.dims(), sf.image.source.dims()
    for deg in sorted(set(ker_g) | set(im_f)):
        if ker_g.get(deg, 0) != im_f.get(deg, 0):
            raise NotExact(stage=f.target.name, witness=deg)


def totalize_ses(f: StructMap, g: StructMap, *, name: str = "Tot") -> Comodule:
    """Totalization of 0 -> X -f-> Y -g-> Z -> 0: the cone of cone(f) -> Z, (y, sx) ↦ g(y)."""
    _require_exact(f, g)
    inner = comodule_cone(f, name=f"cone({f.name})")
    z = g.target
    cols = {("N", y): g.map.column(y) for y in g.source.labels}
    q = StructMap(inner, z, GradedMap.from_columns(inner.carrier, z.carrier, 0, cols, inner.field), "q")
    total = comodule_cone(q, name=name)
    log.debug("totalized", extra={"total": name, "dims": total.carrier.dims()})
    return total
