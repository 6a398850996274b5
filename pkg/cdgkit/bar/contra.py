"""Contramodules over the non-conilpotent bar construction, presented by letter operators."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Any

from cdgkit.bar.bar import BarLetters
from cdgkit.core.errors import DegreeMismatch
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import GradedMap, GradedSpace, Label, Vector, Window, vec_add, vec_neg, vec_sub
from cdgkit.models.schemas import AxiomReport


@dataclass(frozen=True, eq=False)
class BarContramodule:
    """A finite-dimensional complex W with one operator t_a of degree 1 - |a| per letter a.

    Such data is a contramodule over the non-conilpotent bar construction
    exactly when

        d t_a - (-1)^{|t_a|} t_a d = -(-1)^{|t_a|} (θ_a + Σ_y [b₁y]_a t_y + Σ_{y,z} [b₂(y,z)]_a t_z t_y)
        d² = Σ_y h_B(y) t_y + Σ_{y,z} h_B(y|z) t_z t_y

    where θ_a is the coefficient of a in the inserted letter. The contraaction
    on one-letter words is α(e_{[a],w}) = (-1)^{|w||sa|} t_a(w).
    """

    letters: BarLetters
    carrier: GradedSpace
    operators: dict[Label, GradedMap]
    d: GradedMap
    name: str = "W"

    @classmethod
    def build(
        cls,
        letters: BarLetters,
        basis: Iterable[tuple[Label, int]] | GradedSpace,
        operators: Mapping[Label, Mapping[Label, Mapping[Label, Any]]],
        differential: Mapping[Label, Mapping[Label, Any]] | None = None,
        *,
        name: str = "W",
    ) -> BarContramodule:
        fld = letters.field
        carrier = basis if isinstance(basis, GradedSpace) else GradedSpace.from_pairs(basis)
        ops: dict[Label, GradedMap] = {}
        for a, cols in operators.items():
            if a not in letters.letters:
                raise KeyError(f"{a!r} is not a letter of {letters.algebra.name}")
            try:
                ops[a] = GradedMap.from_columns(carrier, carrier, -letters.letter_degree(a), cols, fld)
            except DegreeMismatch as exc:
                raise DegreeMismatch(what=f"operator t_{a}", expected=exc.expected, actual=exc.actual) from exc
        d = GradedMap.from_columns(carrier, carrier, 1, differential or {}, fld)
        return cls(letters, carrier, ops, d, name)

    # -- structure ---------------------------------------------------------

    @property
    def field(self) -> Field:
        return self.letters.field

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

    def operator(self, a: Label) -> GradedMap:
        op = self.operators.get(a)
        if op is None:
            return GradedMap.zero(self.carrier, self.carrier, -self.letters.letter_degree(a), self.field)
        return op

    def act(self, a: Label, vec: Mapping[Label, Scalar]) -> Vector:
        op = self.operators.get(a)
        return {} if op is None else op.apply(vec)

    def letter_contraaction(self, a: Label, q: Label) -> Vector:
        """α(e_{[a],q})."""
        val = self.act(a, {q: self.field.one})
        if self.letters.letter_degree(a) % 2 and self.degree(q) % 2:
            return vec_neg(val)
        return val

    def structure_maps(self) -> dict[Label, GradedMap]:
        return {a: self.operator(a) for a in self.letters.letters}

    def __repr__(self) -> str:
        return f"BarContramodule({self.name}, dims={self.carrier.dims()})"

    # -- axioms ------------------------------------------------------------

    def derivation_defect(self, a: Label, q: Label) -> Vector:
        """(d t_a - (-1)^{|t_a|} t_a d - t(d t_a)) applied to q."""
        L = self.letters
        one = self.field.one
        odd = L.letter_degree(a) % 2
        base = {q: one}
        out = self.d.apply(self.act(a, base))
        vec_add(out, self.act(a, self.d.apply(base)), one if odd else -one)
        rhs: Vector = {}
        theta = L.theta.get(a)
        if theta:
            vec_add(rhs, base, theta)
        for y in L.letters:
            c = L.m1[y].get(a)
            if c:
                vec_add(rhs, self.act(y, base), c)
            for z in L.letters:
                c = L.m2(y, z).get(a)
                if c:
                    vec_add(rhs, self.act(z, self.act(y, base)), c)
        # t(d t_a) = -(-1)^{|t_a|} rhs
        vec_add(out, rhs, -one if odd else one)
        return out

    def curvature_defect(self, q: Label) -> Vector:
        L = self.letters
        base = {q: self.field.one}
        out = self.d.apply(self.d.apply(base))
        total: Vector = {}
        for y in L.letters:
            c = L.h_one(y)
            if c:
                vec_add(total, self.act(y, base), c)
            for z in L.letters:
                c = L.h_two(y, z)
                if c:
                    vec_add(total, self.act(z, self.act(y, base)), c)
        return vec_sub(out, total)

    @property
    def is_valid(self) -> bool:
        return self.check().passed

    def check(self) -> AxiomReport:
        report = AxiomReport(subject=self.name, kind="bar-contramodule")

        def derivation_fail() -> Any:
            for a in self.letters.letters:
                for q in self.labels:
                    if self.derivation_defect(a, q):
                        return (a, q)
            return None

        def curvature_fail() -> Any:
            for q in self.labels:
                if self.curvature_defect(q):
                    return q
            return None

        report.add("letter derivation", derivation_fail())
        report.add("d squared = h", curvature_fail())
        return report
