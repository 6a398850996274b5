"""Twisted tensor and Hom functors along the twisting cochain τ: B -> A.

Module side to comodule and contramodule side:
    M ↦ B⊗^τ M          (left comodule)
    M ↦ Hom^τ(B, M)     (left contramodule)
and back:
    N ↦ A⊗^τ N          (left module, graded free)
    P ↦ Hom^τ(A, P)     (left module)
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import replace

from cdgkit.bar.bar import BarLetters, TruncatedBar
from cdgkit.bar.contra import BarContramodule
from cdgkit.cdg.algebra import CDGAlgebra
from cdgkit.cdg.module import ActionTable, CDGModule, FreeBasis, ModMap
from cdgkit.coalg.comodule import Coaction, Comodule
from cdgkit.coalg.contramodule import Contramodule, free_contramodule
from cdgkit.coalg.morphism import StructMap
from cdgkit.core.logging import get_logger
from cdgkit.linalg.graded import GradedMap, GradedSpace, Label, Vector, Window, tensor_space, vec_add

log = get_logger(__name__)

LetterAction = Callable[[Label, Label], Vector]
"""(a, p) -> α(e_{[a],p})."""


def _pairs_exact(left: frozenset[Label] | None, right: frozenset[Label] | None,
                 labels: tuple[Label, ...]) -> frozenset[Label] | None:
    if left is None and right is None:
        return None
    return frozenset((x, y) for x, y in labels if (left is None or x in left) and (right is None or y in right))


# ---------------------------------------------------------------------------
# module side -> coalgebra side


def twisted_comodule(bar: TruncatedBar, m: CDGModule, *, name: str | None = None) -> Comodule:
    """B⊗^τ M with d(c⊗m) = Dc⊗m + (-1)^{|c|} c⊗dm + Σ_{c = c'a} (-1)^{|c'|} c'⊗τ(a)m."""
    C = bar.coalgebra
    L = bar.letters
    carrier = tensor_space(C.carrier, m.carrier)
    coaction: Coaction = {}
    diff: dict[Label, Vector] = {}
    for w, x in carrier.labels:
        coaction[(w, x)] = {(w[:i], (w[i:], x)): 1 for i in range(len(w) + 1)}
        col: Vector = {(w2, x): v for w2, v in C.d.column(w).items()}
        odd = C.degree(w) % 2
        vec_add(col, {(w, y): (-v if odd else v) for y, v in m.d.column(x).items()})
        if w:
            head = w[:-1]
            acted = m.act(L.tau(w[-1]), {x: m.field.one})
            vec_add(col, {(head, y): (-v if bar.degree(head) % 2 else v) for y, v in acted.items()})
        diff[(w, x)] = col
    exact = _pairs_exact(C.exact, m.exact, carrier.labels)
    note = C.exact_note or m.exact_note if exact is not None else None
    out = Comodule.build(C, carrier, coaction, diff, name=name or f"{C.name}⊗τ{m.name}",
                         exact=exact, exact_note=note)
    log.debug("twisted comodule", extra={"module_name": m.name, "dims": carrier.dims()})
    return out


def twisted_contramodule(bar: TruncatedBar, m: CDGModule, *, name: str | None = None) -> Contramodule:
    """Hom^τ(B, M): D(f)(c) = d f(c) - (-1)^{|f|} f(Dc) + (-1)^{|f||c₁|} τ(c₁)f(c₂).

    With curvature on A the twisted differential of e_{y,m} is only complete
    for words y of length at most N - 2.
    """
    C = bar.coalgebra
    L = bar.letters
    one = m.field.one

    def twist(y: Label, v: Label) -> Vector:
        out: Vector = {}
        fdeg = m.degree(v) - bar.degree(y)
        for a in L.letters:
            x = (a,) + y
            if x not in C.carrier:
                continue
            acted = m.act(L.tau(a), {v: one})
            odd = (fdeg * L.letter_degree(a)) % 2
            vec_add(out, {(x, u): (-c if odd else c) for u, c in acted.items()})
        return out

    exact = None
    note = None
    if bar.window_mode or m.exact is not None:
        exact = [
            (y, v) for y in C.labels for v in m.labels
            if (not bar.window_mode or len(y) <= bar.length - 2) and (m.exact is None or v in m.exact)
        ]
        note = f"window mode: words of length <= {bar.length - 2}" if bar.window_mode else m.exact_note
    return free_contramodule(C, m.carrier, m.d, twist=twist, name=name or f"Homτ({C.name}, {m.name})",
                             exact=exact, exact_note=note)


# ---------------------------------------------------------------------------
# coalgebra side -> module side


def twisted_module(bar: TruncatedBar, n: Comodule, *, name: str | None = None) -> CDGModule:
    """A⊗^τ N with d(a⊗n) = da⊗n + (-1)^{|a|} a⊗dn + (-1)^{|a|+1} aτ(n₋₁)⊗n₀; free on 1⊗N."""
    A = bar.algebra
    L = bar.letters
    if n.coalgebra is not bar.coalgebra:
        raise ValueError(f"{n.name} is not a comodule over {bar.coalgebra.name}")
    carrier = tensor_space(A.carrier, n.carrier)
    one = A.field.one
    action: ActionTable = {}
    for b in A.labels:
        for a, y in carrier.labels:
            prod = A.mul_basis(b, a)
            if prod:
                action[(b, (a, y))] = {(c, y): v for c, v in prod.items()}
    diff: dict[Label, Vector] = {}
    for a, y in carrier.labels:
        col: Vector = {(c, y): v for c, v in A.d.column(a).items()}
        odd = A.degree(a) % 2
        vec_add(col, {(a, z): (-v if odd else v) for z, v in n.d.column(y).items()})
        for (w, y0), v in n.coact_basis(y).items():
            if len(w) != 1:
                continue
            prod = A.mul({a: one}, L.tau(w[0]))
            vec_add(col, {(c, y0): (x * v if odd else -(x * v)) for c, x in prod.items()})
        diff[(a, y)] = col
    free: FreeBasis = {(a, y): (a, (A.unit, y), 1) for a, y in carrier.labels}
    module = CDGModule.build(A, carrier, action, diff, name=name or f"{A.name}⊗τ{n.name}", free_basis=free)
    if n.exact is not None:
        module = replace(module, exact=frozenset((a, y) for a, y in carrier.labels if y in n.exact),
                         exact_note=n.exact_note)
    return module


def _letter_action(p: Contramodule | BarContramodule) -> LetterAction:
    if isinstance(p, BarContramodule):
        return p.letter_contraaction
    return lambda a, q: p.contract_basis((a,), q)


def _hom_window(algebra: CDGAlgebra, target: GradedSpace) -> Window:
    window = Window()
    for b in algebra.labels:
        window = window.intersect(target.window.shifted(algebra.degree(b)))
    hi = algebra.window.hi
    top = target.max_degree
    if hi is not None and top is not None:
        window = window.intersect(Window(top - hi, None))
    return window


def twisted_hom_module(letters: BarLetters, p: Contramodule | BarContramodule, *,
                       name: str | None = None) -> CDGModule:
    """Hom^τ(A, P) with (a·f)(b) = (-1)^{|a|(|f|+|b|)} f(ba) and

    d(f)(a) = d_P f(a) - (-1)^{|f|} f(da) + α(c ↦ (-1)^{|f|+1+|c||a|} f(τ(c)a)).

    Basis (b, q) is the map sending b to q; only one-letter words reach τ.
    """
    A = letters.algebra
    fld = A.field
    one = fld.one
    alpha = _letter_action(p)
    pairs = [((b, q), p.degree(q) - A.degree(b)) for b in A.labels for q in p.labels]
    carrier = GradedSpace.from_pairs(pairs, _hom_window(A, p.carrier))

    action: ActionTable = {}
    for a in A.labels:
        for b2 in A.labels:
            prod = A.mul_basis(b2, a)
            if not prod:
                continue
            for b, c in prod.items():
                for q in p.labels:
                    fdeg = p.degree(q) - A.degree(b)
                    odd = (A.degree(a) * (fdeg + A.degree(b2))) % 2
                    vec_add(action.setdefault((a, (b, q)), {}), {(b2, q): -c if odd else c})

    d_transpose: dict[Label, Vector] = {}
    for a2, col in A.d.columns.items():
        for b, v in col.items():
            d_transpose.setdefault(b, {})[a2] = v
    # (letter, b) -> {a': [τ(letter)a']_b}
    tau_transpose: dict[tuple[Label, Label], Vector] = {}
    for c in letters.letters:
        tc = letters.tau(c)
        for a2 in A.labels:
            for b, v in A.mul(tc, {a2: one}).items():
                tau_transpose.setdefault((c, b), {})[a2] = v

    diff: dict[Label, Vector] = {}
    for b, q in carrier.labels:
        fdeg = p.degree(q) - A.degree(b)
        col: Vector = {(b, u): v for u, v in p.d.column(q).items()}
        for a2, v in d_transpose.get(b, {}).items():
            vec_add(col, {(a2, q): v if fdeg % 2 else -v})
        for c in letters.letters:
            images = tau_transpose.get((c, b))
            if not images:
                continue
            contracted = alpha(c, q)
            if not contracted:
                continue
            for a2, v in images.items():
                odd = (fdeg + 1 + letters.letter_degree(c) * A.degree(a2)) % 2
                vec_add(col, {(a2, u): (-(v * x) if odd else v * x) for u, x in contracted.items()})
        diff[(b, q)] = col
    module = CDGModule.build(A, carrier, action, diff, name=name or f"Homτ({A.name}, {p.name})")
    if isinstance(p, Contramodule) and p.exact is not None:
        keep = p.exact
        module = replace(module, exact=frozenset((b, q) for b, q in carrier.labels if q in keep),
                         exact_note=p.exact_note)
    return module


# ---------------------------------------------------------------------------
# functoriality


def twisted_comodule_map(u: ModMap, src: Comodule, tgt: Comodule) -> StructMap:
    """B⊗^τ u: c⊗m ↦ (-1)^{|u||c|} c⊗u(m)."""
    C = src.coalgebra
    cols: dict[Label, Vector] = {}
    for w, x in src.labels:
        odd = (u.degree * C.degree(w)) % 2
        cols[(w, x)] = {(w, y): (-v if odd else v) for y, v in u.map.column(x).items()}
    gm = GradedMap.from_columns(src.carrier, tgt.carrier, u.degree, cols, C.field)
    return StructMap(src, tgt, gm, f"B⊗τ{u.name}")


def twisted_contramodule_map(u: ModMap, src: Contramodule, tgt: Contramodule) -> StructMap:
    """Hom^τ(B, u): f ↦ u∘f."""
    cols: dict[Label, Vector] = {}
    for y, x in src.labels:
        cols[(y, x)] = {(y, z): v for z, v in u.map.column(x).items()}
    gm = GradedMap.from_columns(src.carrier, tgt.carrier, u.degree, cols, src.field)
    return StructMap(src, tgt, gm, f"Homτ(B, {u.name})")


def twisted_module_map(g: StructMap, src: CDGModule, tgt: CDGModule) -> ModMap:
    """A⊗^τ g: a⊗n ↦ (-1)^{|g||a|} a⊗g(n)."""
    A = src.algebra
    cols: dict[Label, Vector] = {}
    for a, y in src.labels:
        odd = (g.degree * A.degree(a)) % 2
        cols[(a, y)] = {(a, z): (-v if odd else v) for z, v in g.map.column(y).items()}
    return ModMap.from_columns(src, tgt, g.degree, cols, name=f"A⊗τ{g.name}")


def twisted_hom_module_map(g: StructMap, src: CDGModule, tgt: CDGModule) -> ModMap:
    """Hom^τ(A, g): f ↦ g∘f."""
    cols: dict[Label, Vector] = {}
    for b, q in src.labels:
        cols[(b, q)] = {(b, z): v for z, v in g.map.column(q).items()}
    return ModMap.from_columns(src, tgt, g.degree, cols, name=f"Homτ(A, {g.name})")
