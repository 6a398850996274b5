"""Named algebras and modules used throughout the suite."""

from __future__ import annotations

from typing import Any

from cdgkit.cdg.algebra import CDGAlgebra
from cdgkit.cdg.constructions import TwistedModule, regular_module, trivial_module, twisted_module
from cdgkit.cdg.module import CDGModule, ModMap
from cdgkit.linalg.field import Field
from cdgkit.linalg.graded import Label, Window


def power_label(var: str, n: int) -> str:
    if n == 0:
        return "1"
    return var if n == 1 else f"{var}^{n}"


def ground(fld: Field) -> CDGAlgebra:
    return CDGAlgebra.build(fld, [("1", 0)], "1", {}, name="k")


def polynomial(fld: Field, hi: int, *, degree: int = 1, d_coeff: Any = 0, var: str = "x") -> CDGAlgebra:
    """k[x]/(x^{>hi}) for |x| = degree >= 1, exact in degrees <= hi.

    For |x| = 1 the differential d(x) = c·x² extends to d(x^n) = c·x^{n+1}
    for odd n and 0 for even n.
    """
    if degree < 1:
        raise ValueError("generator degree must be positive")
    top = hi // degree
    basis = [(power_label(var, n), n * degree) for n in range(top + 1)]
    products = {
        (power_label(var, i), power_label(var, j)): {power_label(var, i + j): 1}
        for i in range(top + 1) for j in range(top + 1) if i + j <= top
    }
    c = fld.convert(d_coeff)
    if c and degree != 1:
        raise ValueError("d(x) = c x^2 needs |x| = 1")
    diff = {
        power_label(var, n): {power_label(var, n + 1): c}
        for n in range(1, top) if c and n % 2 == 1
    }
    name = f"k[{var}]" if not c else f"k[{var}],d{var}={fld.to_text(c)}{var}^2"
    return CDGAlgebra.build(
        fld, basis, "1", products, diff, name=name, window=Window(None, hi),
        regenerate=lambda h: polynomial(fld, h, degree=degree, d_coeff=d_coeff, var=var),
    )


def truncated_polynomial(fld: Field, degree: int, nilpotency: int, *, var: str = "e") -> CDGAlgebra:
    """k[e]/(e^nilpotency) with |e| = degree, zero differential."""
    basis = [(power_label(var, n), n * degree) for n in range(nilpotency)]
    products: dict[tuple[Label, Label], dict[Label, Any]] = {}
    for i in range(nilpotency):
        for j in range(nilpotency):
            if i + j < nilpotency:
                products[(power_label(var, i), power_label(var, j))] = {power_label(var, i + j): 1}
    return CDGAlgebra.build(fld, basis, "1", products, name=f"k[{var}]/({var}^{nilpotency})")


def exterior(fld: Field, degree: int = 1, *, var: str = "e") -> CDGAlgebra:
    """The free graded-commutative algebra on one odd generator, k[e]/(e²)."""
    return truncated_polynomial(fld, degree, 2, var=var).renamed(f"Λ({var})")


def rank_one(algebra: CDGAlgebra, entry: dict[Label, Any], *, degree: int = 0, name: str = "T") -> TwistedModule:
    """Free rank one module with d(1) = α·1."""
    conn = {"v": {"v": entry}} if entry else {}
    return twisted_module(algebra, [("v", degree)], conn, name=name)


def kx_twisted(algebra: CDGAlgebra) -> TwistedModule:
    """A^x over k[x] with d(x) = -x²: the rank one twisted module with connection -x.

    Over a left module the Maurer-Cartan equation for α = λx reads
    λ(λ + 1) = 0, so λ = -1 is the nontrivial solution.
    """
    return rank_one(algebra, {"x": -1}, name="A^x")


def augmentation(algebra: CDGAlgebra, source: CDGModule | None = None) -> ModMap:
    """A -> k, 1 ↦ 1."""
    src = source or regular_module(algebra)
    k = trivial_module(algebra)
    (g,) = src.generators
    return ModMap.from_generators(src, k, 0, {g: {"k": 1}}, name="ε")
