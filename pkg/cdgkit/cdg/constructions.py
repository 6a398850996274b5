from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from cdgkit.cdg.algebra import CDGAlgebra
from cdgkit.cdg.module import ActionTable, CDGModule, FreeBasis, ModMap
from cdgkit.core.errors import DegreeMismatch, InvalidConnection
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

Connection = dict[Label, dict[Label, Vector]]
"""generator v -> {generator v': element α_{v,v'} of A}, so α(v) = Σ α_{v,v'}⊗v'."""


@dataclass(frozen=True, eq=False)
class TwistedModule(CDGModule):
    """A⊗V with d(a⊗v) = d_A(a)⊗v + (-1)^{|a|} a·α(v)."""

    generator_degrees: dict[Label, int] = field(default_factory=dict)
    connection: Connection = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.generator_degrees)


def twisted_module(
    algebra: CDGAlgebra,
    generators: Iterable[tuple[Label, int]],
    connection: Mapping[Label, Mapping[Label, Mapping[Label, Any]]] | None = None,
    *,
    name: str = "T",
    check: bool = True,
) -> TwistedModule:
    fld = algebra.field
    gens = list(generators)
    gdeg = dict(gens)
    vspace = GradedSpace.from_pairs(gens)
    carrier = tensor_space(algebra.carrier, vspace)
    alpha: Connection = {}
    for v, row in (connection or {}).items():
        for vp, entry in row.items():
            vec = vec_clean({a: fld.convert(c) for a, c in entry.items()})
            for a in vec:
                want = gdeg[v] + 1 - gdeg[vp]
                if algebra.degree(a) != want:
                    raise DegreeMismatch(what=f"connection entry {v!r}->{vp!r}", expected=want,
                                         actual=algebra.degree(a))
            if vec:
                alpha.setdefault(v, {})[vp] = vec
    action: ActionTable = {}
    for b in algebra.labels:
        for a, v in carrier.labels:
            prod = algebra.mul_basis(b, a)
            if prod:
                action[(b, (a, v))] = {(c, v): x for c, x in prod.items()}
    one = fld.one
    diff: dict[Label, Vector] = {}
    for a, v in carrier.labels:
        col: Vector = {(c, v): x for c, x in algebra.d.column(a).items()}
        odd = algebra.degree(a) % 2
        for vp, entry in alpha.get(v, {}).items():
            prod = algebra.mul({a: one}, entry)
            vec_add(col, {(c, vp): (-x if odd else x) for c, x in prod.items()})
        diff[(a, v)] = col
    free: FreeBasis = {(a, v): (a, (algebra.unit, v), 1) for a, v in carrier.labels}
    base = CDGModule.build(algebra, carrier, action, diff, name=name, free_basis=free)
    module = TwistedModule(
        base.algebra, base.carrier, base.action, base.d, name, free,
        generator_degrees=dict(gdeg), connection=alpha,
    )
    if check:
        for v in gdeg:
            g = {(algebra.unit, v): one}
            residual = vec_sub(module.diff(module.diff(g)), module.act(algebra.h, g))
            if residual:
                raise InvalidConnection(witness=v, residual=residual)
    return module


def regular_module(algebra: CDGAlgebra, *, name: str | None = None) -> TwistedModule:
    """A as a left module over itself (free on one generator of degree 0)."""
    return twisted_module(algebra, [("1", 0)], name=name or algebra.name)


def trivial_module(algebra: CDGAlgebra, degree: int = 0, *, name: str = "k") -> CDGModule:
    """k in one degree, with A acting through the coefficient of the unit."""
    fld = algebra.field
    action = {(a, "k"): {"k": fld.one} for a in algebra.labels if a == algebra.unit}
    return CDGModule.build(algebra, [("k", degree)], action, {}, name=name)


def shift_module(m: CDGModule, n: int, *, name: str | None = None) -> CDGModule:
    """M[n]: degrees drop by n, d picks up (-1)^n, a·s^n m = (-1)^{n|a|} s^n(am)."""
    A = m.algebra
    carrier = GradedSpace(m.carrier.labels, tuple(d - n for d in m.carrier.degrees), m.window.shifted(n))
    action: ActionTable = {}
    for (a, x), vec in m.action.items():
        action[(a, x)] = vec_neg(vec) if (n * A.degree(a)) % 2 else dict(vec)
    d = GradedMap(carrier, carrier, 1, -m.d.matrix if n % 2 else m.d.matrix, m.field)
    free = None
    if m.free_basis is not None:
        free = {x: (a, g, -s if (n * A.degree(a)) % 2 else s) for x, (a, g, s) in m.free_basis.items()}
    return CDGModule(A, carrier, action, d, name or f"{m.name}[{n}]", free)


def direct_sum(modules: Sequence[tuple[Hashable, CDGModule]], *, name: str | None = None) -> CDGModule:
    A = modules[0][1].algebra
    fld = A.field
    pairs: list[tuple[Label, int]] = []
    action: ActionTable = {}
    diff: dict[Label, Vector] = {}
    window = Window()
    free: FreeBasis | None = {}
    for tag, mod in modules:
        window = window.intersect(mod.window)
        pairs.extend(((tag, x), d) for x, d in zip(mod.labels, mod.carrier.degrees, strict=True))
        for (a, x), vec in mod.action.items():
            action[(a, (tag, x))] = {(tag, y): v for y, v in vec.items()}
        for x in mod.labels:
            diff[(tag, x)] = {(tag, y): v for y, v in mod.d.column(x).items()}
        if free is not None and mod.free_basis is not None:
            free.update({(tag, x): (a, (tag, g), s) for x, (a, g, s) in mod.free_basis.items()})
        else:
            free = None
    carrier = GradedSpace.from_pairs(pairs, window)
    d = GradedMap.from_columns(carrier, carrier, 1, diff, fld, check_degrees=False)
    label = name or "⊕".join(mod.name for _, mod in modules)
    return CDGModule(A, carrier, action, d, label, free)


def cone(f: ModMap, *, name: str | None = None) -> CDGModule:
    """cone(f: M -> N) = N ⊕ M[1] with d(n, sm) = (dn + f(m), -s dm)."""
    if f.degree != 0:
        raise ValueError("cone needs a degree 0 map")
    f.require_closed()
    m, n = f.source, f.target
    A = m.algebra
    pairs: list[tuple[Label, int]] = [(("N", y), n.degree(y)) for y in n.labels]
    pairs += [(("M", x), m.degree(x) - 1) for x in m.labels]
    action: ActionTable = {}
    for (a, y), vec in n.action.items():
        action[(a, ("N", y))] = {("N", z): v for z, v in vec.items()}
    for (a, x), vec in m.action.items():
        odd = A.degree(a) % 2
        action[(a, ("M", x))] = {("M", z): (-v if odd else v) for z, v in vec.items()}
    diff: dict[Label, Vector] = {}
    for y in n.labels:
        diff[("N", y)] = {("N", z): v for z, v in n.d.column(y).items()}
    for x in m.labels:
        col: Vector = {("N", z): v for z, v in f.map.column(x).items()}
        vec_add(col, {("M", z): -v for z, v in m.d.column(x).items()})
        diff[("M", x)] = col
    free: FreeBasis | None = None
    if m.free_basis is not None and n.free_basis is not None:
        free = {("N", y): (a, ("N", g), s) for y, (a, g, s) in n.free_basis.items()}
        free.update({
            ("M", x): (a, ("M", g), -s if A.degree(a) % 2 else s) for x, (a, g, s) in m.free_basis.items()
        })
    window = n.window.intersect(m.window.shifted(1))
    carrier = GradedSpace.from_pairs(pairs, window)
    d = GradedMap.from_columns(carrier, carrier, 1, diff, m.field, check_degrees=False)
    return CDGModule(A, carrier, action, d, name or f"cone({f.name})", free)


def cone_inclusion(f: ModMap, c: CDGModule) -> ModMap:
    """N -> cone(f)."""
    return ModMap.from_columns(f.target, c, 0, {y: {("N", y): 1} for y in f.target.labels}, name="i")


def fold_map(x: CDGModule) -> tuple[CDGModule, ModMap]:
    """X⊕X and the fold map X⊕X -> X."""
    xx = direct_sum([("0", x), ("1", x)], name=f"{x.name}⊕{x.name}")
    fold = ModMap.from_columns(xx, x, 0, {(t, y): {y: 1} for t in ("0", "1") for y in x.labels}, name="fold")
    return xx, fold


def cylinder(x: CDGModule) -> tuple[ModMap, CDGModule, ModMap]:
    """Cyl(X) = X⊕X⊕X[1], d(a,b,c) = (da + c, db - c, -dc), with j: X⊕X -> Cyl and p: Cyl -> X.

    Cyl is the cone of (id, -id): X -> X⊕X, so p∘j is the fold map.
    """
    xx, _ = fold_map(x)
    diag = ModMap.from_columns(
        x, xx, 0, {y: {("0", y): 1, ("1", y): -1} for y in x.labels}, name="(1,-1)"
    )
    cyl = cone(diag, name=f"Cyl({x.name})")
    j = ModMap.from_columns(xx, cyl, 0, {lab: {("N", lab): 1} for lab in xx.labels}, name="j")
    p_cols = {("N", (t, y)): {y: 1} for t in ("0", "1") for y in x.labels}
    p = ModMap.from_columns(cyl, x, 0, p_cols, name="p")
    return j, cyl, p
