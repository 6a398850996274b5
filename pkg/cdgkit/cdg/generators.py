"""Seeded random CDG-algebras, modules and closed maps for the property batteries."""

from __future__ import annotations

import random
from collections.abc import Callable, Sequence
from typing import Any

from sympy.polys.matrices import DomainMatrix

from cdgkit.cdg.algebra import CDGAlgebra, ProductTable, tensor_algebra
from cdgkit.cdg.constructions import TwistedModule, cone, regular_module, shift_module, twisted_module
from cdgkit.cdg.examples import exterior, truncated_polynomial
from cdgkit.cdg.hom import hom_complex
from cdgkit.cdg.module import CDGModule, ModMap
from cdgkit.core.errors import InvalidConnection
from cdgkit.linalg.elimination import rank as matrix_rank
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import Label, Vector, vec_add, vec_clean

SMALL_COEFFS = (-2, -1, 1, 2, 3)


def random_scalar(fld: Field, rng: random.Random, coeffs: Sequence[int] = SMALL_COEFFS) -> Scalar:
    if fld.is_finite:
        return fld.convert(rng.randrange(1, fld.characteristic))
    return fld.convert(rng.choice(coeffs))


# ---------------------------------------------------------------------------
# templates


def square_zero_pair(fld: Field, c: Any = 1, lam: Any = 0) -> CDGAlgebra:
    """k[x, e]/(x², e²), |e| = 1, |x| = 2, d(e) = c·x, curvature λ·x."""
    basis = [("1", 0), ("e", 1), ("x", 2), ("xe", 3)]
    products = {("x", "e"): {"xe": 1}, ("e", "x"): {"xe": 1}}
    diff = {"e": {"x": c}}
    return CDGAlgebra.build(fld, basis, "1", products, diff, {"x": lam}, name=f"k[x,e]/(x²,e²),c={c},h={lam}x")


def path_algebra(fld: Field) -> CDGAlgebra:
    """Lower triangular 3x3 matrices with d = [δ, -], δ = E10 + E21 and h = δ² = E20."""
    labels = ["1", "E11", "E22", "E10", "E21", "E20"]
    degrees = {"1": 0, "E11": 0, "E22": 0, "E10": 1, "E21": 1, "E20": 2}
    units = {"E11": (1, 1), "E22": (2, 2), "E10": (1, 0), "E21": (2, 1), "E20": (2, 0)}

    def matrix(lab: str) -> dict[tuple[int, int], int]:
        if lab == "1":
            return {(0, 0): 1, (1, 1): 1, (2, 2): 1}
        return {units[lab]: 1}

    def decompose(mat: dict[tuple[int, int], int]) -> dict[str, int]:
        m00 = mat.get((0, 0), 0)
        out = {"1": m00, "E11": mat.get((1, 1), 0) - m00, "E22": mat.get((2, 2), 0) - m00}
        out.update({lab: mat.get(ij, 0) for lab, ij in units.items() if lab not in ("E11", "E22")})
        return {k: v for k, v in out.items() if v}

    def mult(p: dict[tuple[int, int], int], q: dict[tuple[int, int], int]) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for (i, j), x in p.items():
            for (k, l), y in q.items():
                if j == k:
                    out[(i, l)] = out.get((i, l), 0) + x * y
        return out

    products = {(a, b): decompose(mult(matrix(a), matrix(b))) for a in labels for b in labels}
    delta = {(1, 0): 1, (2, 1): 1}
    diff = {}
    for a in labels:
        left = mult(delta, matrix(a))
        right = mult(matrix(a), delta)
        sign = -1 if degrees[a] % 2 else 1
        comm = dict(left)
        for ij, v in right.items():
            comm[ij] = comm.get(ij, 0) - sign * v
        diff[a] = decompose(comm)
    return CDGAlgebra.build(fld, [(lab, degrees[lab]) for lab in labels], "1", products, diff,
                            {"E20": 1}, name="path(3)")


def _uncurved_templates(fld: Field, rng: random.Random) -> list[Callable[[], CDGAlgebra]]:
    return [
        lambda: truncated_polynomial(fld, rng.choice([1, 2]), rng.randint(2, 6), var="x"),
        lambda: exterior(fld, rng.choice([1, 3])),
        lambda: square_zero_pair(fld, random_scalar(fld, rng), 0),
        lambda: tensor_algebra(exterior(fld, 1, var="a"), exterior(fld, 1, var="b")),
        lambda: tensor_algebra(truncated_polynomial(fld, 2, 2, var="u"), truncated_polynomial(fld, 1, 3, var="t")),
    ]


def _curved_templates(fld: Field, rng: random.Random) -> list[Callable[[], CDGAlgebra]]:
    return [
        lambda: square_zero_pair(fld, random_scalar(fld, rng), random_scalar(fld, rng)),
        lambda: square_zero_pair(fld, 0, random_scalar(fld, rng)),
        lambda: path_algebra(fld),
    ]


def random_algebra(fld: Field, rng: random.Random, *, curved: bool | None = None,
                   basis_change: bool = True) -> CDGAlgebra:
    """A random CDG-algebra of dimension at most 6 from the template list."""
    if curved is None:
        curved = rng.random() < 0.5
    templates = _curved_templates(fld, rng) if curved else _uncurved_templates(fld, rng)
    algebra = rng.choice(templates)()
    if basis_change:
        algebra = change_basis(algebra, rng)
    return algebra


def _random_invertible(fld: Field, rng: random.Random, n: int, *, fix_first: bool) -> DomainMatrix:
    K = fld.domain
    while True:
        rows = [[random_scalar(fld, rng) if rng.random() < 0.6 else K.zero for _ in range(n)] for _ in range(n)]
        for i in range(n):
            if not rows[i][i]:
                rows[i][i] = K.one
        if fix_first:
            rows[0] = [K.one] + [K.zero] * (n - 1)
            for i in range(1, n):
                rows[i][0] = K.zero
        mat = DomainMatrix(rows, (n, n), K).to_sparse()
        if matrix_rank(mat) == n:
            return mat


def change_basis(algebra: CDGAlgebra, rng: random.Random) -> CDGAlgebra:
    """The same algebra written in a random unit-preserving homogeneous basis.

    New basis vector i of degree n is Σ_j P[j][i] old_j; the unit is kept
    (non-unit vectors in degree 0 may still pick up a unit component).
    """
    fld = algebra.field
    carrier = algebra.carrier
    new_of: dict[Label, Vector] = {}
    old_to_new: dict[Label, Vector] = {}
    for deg in carrier.support:
        labels = list(carrier.component(deg))
        if deg == 0:
            labels.remove(algebra.unit)
            labels.insert(0, algebra.unit)
        n = len(labels)
        p = _random_invertible(fld, rng, n, fix_first=(deg == 0))
        if deg == 0:
            # unit stays put; others may mix in the unit
            rows = p.to_dod()
            for i in range(1, n):
                if rng.random() < 0.5:
                    rows.setdefault(0, {})[i] = random_scalar(fld, rng)
            p = DomainMatrix.from_dod(rows, (n, n), fld.domain)
        pinv = p.to_dense().inv().to_sparse()
        pd, qd = p.to_dod(), pinv.to_dod()
        for i, lab in enumerate(labels):
            new_of[("b", lab)] = {labels[j]: pd[j][i] for j in range(n) if pd.get(j, {}).get(i)}
        for j, lab in enumerate(labels):
            old_to_new[lab] = {("b", labels[i]): qd[i][j] for i in range(n) if qd.get(i, {}).get(j)}

    def to_new(vec: Vector) -> Vector:
        out: Vector = {}
        for lab, c in vec.items():
            vec_add(out, old_to_new[lab], c)
        return out

    new_labels = list(new_of)
    unit = ("b", algebra.unit)
    products: ProductTable = {}
    for a in new_labels:
        for b in new_labels:
            prod = to_new(algebra.mul(new_of[a], new_of[b]))
            if prod:
                products[(a, b)] = prod
    diff = {a: to_new(algebra.diff(new_of[a])) for a in new_labels}
    h = to_new(algebra.h)
    degree = {("b", lab): carrier.degree_of[lab] for lab in carrier.labels}
    return CDGAlgebra.build(fld, [(lab, degree[lab]) for lab in new_labels], unit, products, diff, h,
                            name=f"{algebra.name}'", window=carrier.window)


def mutate(algebra: CDGAlgebra, rng: random.Random) -> CDGAlgebra:
    """Perturb one structure constant between non-unit basis elements."""
    fld = algebra.field
    deg = algebra.carrier.degree_of
    reduced = algebra.reduced_labels()
    choices = [
        (a, b, c) for a in reduced for b in reduced for c in algebra.labels
        if deg[c] == deg[a] + deg[b]
    ]
    if not choices:
        return algebra
    a, b, c = rng.choice(choices)
    table = dict(algebra.table)
    prod = dict(table.get((a, b), {}))
    vec_add(prod, {c: random_scalar(fld, rng)})
    table[(a, b)] = vec_clean(prod)
    return algebra.with_table(table).renamed(f"{algebra.name}~")


# ---------------------------------------------------------------------------
# modules


def koszul_module(algebra: CDGAlgebra, degree: int = 0, *, name: str = "K(h)") -> TwistedModule:
    """Generators v (degree n), w (degree n+1) with d(v) = w, d(w) = h·v; valid whenever dh = 0."""
    conn: dict[Label, dict[Label, Vector]] = {"v": {"w": {algebra.unit: 1}}}
    if algebra.h:
        conn["w"] = {"v": dict(algebra.h)}
    return twisted_module(algebra, [("v", degree), ("w", degree + 1)], conn, name=name)


def search_twisted(algebra: CDGAlgebra, rng: random.Random, *, rank: int = 1,
                   degrees: Sequence[int] = (0,), tries: int = 40, name: str = "T") -> TwistedModule | None:
    """Random connections, kept when (d + α)² = h holds on generators."""
    fld = algebra.field
    gens = [(f"v{i}", rng.choice(list(degrees))) for i in range(rank)]
    gdeg = dict(gens)
    for _ in range(tries):
        conn: dict[Label, dict[Label, Vector]] = {}
        for v, dv in gens:
            for w, dw in gens:
                slots = algebra.carrier.component(dv + 1 - dw)
                entry = {a: random_scalar(fld, rng) for a in slots if rng.random() < 0.5}
                if entry:
                    conn.setdefault(v, {})[w] = entry
        try:
            return twisted_module(algebra, gens, conn, name=name)
        except InvalidConnection:
            continue
    if not algebra.h:
        return twisted_module(algebra, list(gdeg.items()), name=name)
    return None


def random_module(algebra: CDGAlgebra, rng: random.Random, *, name: str = "M") -> CDGModule:
    kinds = ["koszul", "search"] + ([] if algebra.h else ["regular", "shift"])
    kind = rng.choice(kinds)
    if kind == "search":
        found = search_twisted(algebra, rng, rank=rng.choice([1, 2]), degrees=(-1, 0, 1), name=name)
        if found is not None:
            return found
        kind = "koszul"
    if kind == "regular":
        return regular_module(algebra, name=name)
    if kind == "shift":
        return shift_module(regular_module(algebra), rng.choice([-1, 1]), name=name)
    return koszul_module(algebra, rng.choice([-1, 0]), name=name)


def random_closed_map(source: CDGModule, target: CDGModule, rng: random.Random,
                      degree: int = 0, *, name: str = "f") -> ModMap:
    """A random combination of a basis of closed maps of the given degree."""
    hom = hom_complex(source, target, [degree - 1, degree, degree + 1])
    closed = hom.closed_maps(degree)
    fld = source.field
    total = ModMap.zero(source, target, degree)
    for z in closed:
        if rng.random() < 0.7:
            total = total + ModMap(source, target, z.scaled(random_scalar(fld, rng)))
    return total.renamed(name)


def random_cone(algebra: CDGAlgebra, rng: random.Random, *, name: str = "C") -> CDGModule:
    m = random_module(algebra, rng, name="M")
    n = random_module(algebra, rng, name="N")
    return cone(random_closed_map(m, n, rng), name=name)
