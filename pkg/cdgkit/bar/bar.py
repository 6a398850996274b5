"""Word-length truncated bar construction and its twisting cochain."""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Any

from cdgkit.cdg.algebra import CDGAlgebra
from cdgkit.coalg.coalgebra import CDGCoalgebra
from cdgkit.core.errors import DegreeMismatch
from cdgkit.core.logging import get_logger
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import Label, Vector, Window, vec_add, vec_clean, vec_sub
from cdgkit.models.schemas import AxiomReport

log = get_logger(__name__)

Word = tuple[Label, ...]
"""A bar word [sa_1|...|sa_n], stored as the tuple of letters a_i of Ā."""


@dataclass(frozen=True, eq=False)
class BarLetters:
    """The letter-level data of the bar construction for a fixed retraction ν: A -> k.

    Letters are the non-unit basis vectors a, standing for sā with
    ā = a - ν(a)1 and |sā| = |a| - 1. Everything here is independent of the
    word-length truncation.
    """

    algebra: CDGAlgebra
    nu: Vector

    @classmethod
    def build(cls, algebra: CDGAlgebra, nu: Mapping[Label, Any] | None = None) -> BarLetters:
        fld = algebra.field
        retraction = vec_clean({a: fld.convert(v) for a, v in (nu or {algebra.unit: 1}).items()})
        if retraction.get(algebra.unit) != fld.one:
            raise ValueError("ν must send the unit to 1")
        for a in retraction:
            if algebra.degree(a) != 0:
                raise DegreeMismatch(what="ν", expected=0, actual=algebra.degree(a))
        return cls(algebra, retraction)

    @property
    def field(self) -> Field:
        return self.algebra.field

    @cached_property
    def letters(self) -> tuple[Label, ...]:
        return self.algebra.reduced_labels()

    def letter_degree(self, a: Label) -> int:
        return self.algebra.degree(a) - 1

    def word_degree(self, w: Word) -> int:
        return sum(self.letter_degree(a) for a in w)

    def nu_of(self, x: Mapping[Label, Scalar]) -> Scalar:
        total = self.field.zero
        for c, v in x.items():
            r = self.nu.get(c)
            if r:
                total += v * r
        return total

    def bar_part(self, x: Mapping[Label, Scalar]) -> Vector:
        """x - ν(x)1 in letter coordinates."""
        unit = self.algebra.unit
        return vec_clean({c: v for c, v in x.items() if c != unit})

    def reduced(self, a: Label) -> Vector:
        """ā = a - ν(a)1 as an element of A."""
        out: Vector = {a: self.field.one}
        r = self.nu.get(a)
        if r:
            vec_add(out, {self.algebra.unit: -r})
        return out

    @cached_property
    def theta(self) -> Vector:
        """The inserted letter s h̄."""
        return self.bar_part(self.algebra.h)

    @cached_property
    def m1(self) -> dict[Label, Vector]:
        """b₁(sa) = s(overline{da})."""
        return {a: self.bar_part(self.algebra.diff(self.reduced(a))) for a in self.letters}

    @cached_property
    def products(self) -> dict[tuple[Label, Label], Vector]:
        A = self.algebra
        return {(a, b): A.mul(self.reduced(a), self.reduced(b)) for a in self.letters for b in self.letters}

    def m2(self, a: Label, b: Label) -> Vector:
        """b₂(sa⊗sb) = (-1)^{|a|-1} s(overline{āb̄})."""
        part = self.bar_part(self.products[(a, b)])
        if self.letter_degree(a) % 2:
            return {c: -v for c, v in part.items()}
        return part

    def h_one(self, a: Label) -> Scalar:
        """h_B([sa]) = ν(da)."""
        return self.nu_of(self.algebra.diff(self.reduced(a)))

    def h_two(self, a: Label, b: Label) -> Scalar:
        """h_B([sa|sb]) = (-1)^{|a|-1} ν(āb̄)."""
        val = self.nu_of(self.products[(a, b)])
        return -val if self.letter_degree(a) % 2 else val

    def tau(self, a: Label) -> Vector:
        """τ(sa) = (-1)^{|a|-1} ā."""
        red = self.reduced(a)
        if self.letter_degree(a) % 2:
            return {c: -v for c, v in red.items()}
        return red


@dataclass(frozen=True, eq=False)
class TruncatedBar:
    """⊕_{n ≤ N} (sĀ)^{⊗n} with deconcatenation, D = b₀ + b₁ + b₂ and curvature h_B.

    Without curvature on A this is an honest subcoalgebra of the tensor
    coalgebra. With curvature b₀ raises word length, so the coalgebra is
    only exact on words of length at most N - 1.
    """

    letters: BarLetters
    length: int
    coalgebra: CDGCoalgebra

    @property
    def algebra(self) -> CDGAlgebra:
        return self.letters.algebra

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def window_mode(self) -> bool:
        return self.algebra.is_curved

    @property
    def words(self) -> tuple[Label, ...]:
        return self.coalgebra.labels

    def degree(self, w: Word) -> int:
        return self.letters.word_degree(w)

    def check_tau(self) -> AxiomReport:
        """The curved Maurer-Cartan equation δτ + τ∗τ = h_B·1 - h_A·ε on every word.

        δτ = d_A∘τ + τ∘D and (τ∗τ)(w) = (-1)^{|w₁|} τ(w₁)τ(w₂).
        """
        A = self.algebra
        B = self.coalgebra
        L = self.letters
        report = AxiomReport(subject=f"τ for {B.name}", kind="map")

        def tau_of(vec: Mapping[Label, Scalar]) -> Vector:
            out: Vector = {}
            for w, v in vec.items():
                if len(w) == 1:
                    vec_add(out, L.tau(w[0]), v)
            return out

        def fail() -> Any:
            for w in B.labels:
                lhs = A.diff(tau_of({w: self.field.one}))
                vec_add(lhs, tau_of(B.diff({w: self.field.one})))
                for (w1, w2), v in B.comult_basis(w).items():
                    if len(w1) == 1 and len(w2) == 1:
                        prod = A.mul(L.tau(w1[0]), L.tau(w2[0]))
                        vec_add(lhs, prod, -v if self.degree(w1) % 2 else v)
                rhs: Vector = {}
                hb = B.h.get(w)
                if hb:
                    rhs[A.unit] = hb
                if not w:
                    vec_add(rhs, A.h, -self.field.one)
                if vec_sub(lhs, rhs):
                    return w
            return None

        report.add("maurer-cartan", fail(), window=str(B.window))
        return report

    def __repr__(self) -> str:
        return f"TruncatedBar({self.algebra.name}, N={self.length}, dims={self.coalgebra.carrier.dims()})"


def _bar_window(letters: BarLetters, length: int) -> Window:
    """Degrees in which the truncation agrees with the conilpotent bar construction."""
    if not letters.letters:
        return Window()
    low = min(letters.letter_degree(a) for a in letters.letters)
    if low < 1:
        return Window.empty()
    hi = (length + 1) * low - 1
    a_hi = letters.algebra.window.hi
    if a_hi is not None:
        hi = min(hi, a_hi - 2)
    return Window(None, hi)


def bar(algebra: CDGAlgebra, length: int, *, nu: Mapping[Label, Any] | None = None,
        name: str | None = None) -> TruncatedBar:
    """The bar construction truncated at word length ``length``."""
    if length < 0:
        raise ValueError("word length must be nonnegative")
    L = BarLetters.build(algebra, nu)
    fld = algebra.field
    words: list[Word] = [w for n in range(length + 1) for w in itertools.product(L.letters, repeat=n)]
    basis = [(w, L.word_degree(w)) for w in words]
    comult = {w: {(w[:i], w[i:]): 1 for i in range(len(w) + 1)} for w in words}

    diff: dict[Label, Vector] = {}
    for w in words:
        col: Vector = {}
        n = len(w)
        before = 0
        for i in range(n + 1):
            sign = -1 if before % 2 else 1
            if L.theta and n < length:
                for t, v in L.theta.items():
                    vec_add(col, {w[:i] + (t,) + w[i:]: sign * v})
            if i < n:
                for t, v in L.m1[w[i]].items():
                    vec_add(col, {w[:i] + (t,) + w[i + 1:]: sign * v})
                if i + 1 < n:
                    for t, v in L.m2(w[i], w[i + 1]).items():
                        vec_add(col, {w[:i] + (t,) + w[i + 2:]: sign * v})
                before += L.letter_degree(w[i])
        diff[w] = col

    curvature: Vector = {}
    for a in L.letters:
        if L.letter_degree(a) == -2:
            curvature[(a,)] = L.h_one(a)
    if length >= 2:
        for a in L.letters:
            for b in L.letters:
                if L.letter_degree(a) + L.letter_degree(b) == -2:
                    curvature[(a, b)] = L.h_two(a, b)

    exact = None
    note = None
    if algebra.is_curved:
        exact = [w for w in words if len(w) <= length - 1]
        note = f"window mode: words of length <= {length - 1}"
    coalgebra = CDGCoalgebra.build(
        fld, basis, comult, {(): 1}, diff, curvature,
        name=name or f"B≤{length}({algebra.name})", window=_bar_window(L, length),
        exact=exact, exact_note=note,
    )
    log.debug("bar built", extra={"algebra": algebra.name, "length": length, "dims": coalgebra.carrier.dims()})
    return TruncatedBar(L, length, coalgebra)
