from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Protocol

from cdgkit.cdg.module import CDGModule, ModMap, extend_from_generators
from cdgkit.core.errors import OutOfWindow, VerificationFailed
from cdgkit.core.logging import get_logger
from cdgkit.linalg.complexes import Cohomology, cohomology
from cdgkit.linalg.elimination import nullspace, row_vectors, rows_to_matrix, solve_columns, vectors_matrix
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import GradedMap, GradedSpace, Label, Vector, Window, vec_add, vec_clean

log = get_logger(__name__)

Operator = tuple[GradedMap, GradedMap]
"""An operator acting on the source and on the target with the same degree."""


class DGObject(Protocol):
    """Anything with a graded carrier, a differential and structure operators.

    Morphisms are the graded linear maps f with f∘P = (-1)^{|f||P|} P∘f for
    every structure operator P: module actions, comodule coaction components
    and contramodule operations all take this form.
    """

    name: str
    carrier: GradedSpace
    d: GradedMap

    @property
    def field(self) -> Field: ...

    @property
    def window(self) -> Window: ...

    @property
    def labels(self) -> tuple[Label, ...]: ...

    @property
    def dim(self) -> int: ...

    def degree(self, label: Label) -> int: ...

    def structure_maps(self) -> dict[Label, GradedMap]: ...


@dataclass(frozen=True, eq=False)
class HomComplex:
    """Hom(M, N) of graded linear maps commuting with the given operators.

    Each basis element is stored as an honest map M -> N, together with the
    matrix entry ``lead`` that is 1 on it and 0 on the other basis maps of
    the same degree; coordinates of any element are read off the leads.
    """

    source: DGObject
    target: DGObject
    space: GradedSpace
    differential: GradedMap
    maps: dict[Label, GradedMap]
    leads: dict[Label, tuple[Label, Label]]
    built: tuple[int, ...]
    name: str = "Hom"
    natural: tuple[int, int] | None = None

    @property
    def window(self) -> Window:
        return self.space.window

    def dims(self) -> dict[int, int]:
        return self.space.dims()

    def basis(self, degree: int) -> tuple[Label, ...]:
        return self.space.component(degree)

    def computed(self, degree: int) -> bool:
        """Built, or outside the range where Hom can be nonzero (a zero component)."""
        if not self.window.contains(degree):
            return False
        if degree in self.built or self.natural is None:
            return True
        lo, hi = self.natural
        return not lo <= degree <= hi

    def require(self, degree: int) -> None:
        if not self.computed(degree):
            raise OutOfWindow(what=self.name, degree=degree, window=self.window)

    def to_map(self, vec: Mapping[Label, Scalar], degree: int) -> GradedMap:
        columns: dict[Label, Vector] = {}
        for lab, c in vec.items():
            for m, col in self.maps[lab].columns.items():
                vec_add(columns.setdefault(m, {}), col, c)
        return GradedMap.from_columns(self.source.carrier, self.target.carrier, degree, columns,
                                      self.source.field, check_degrees=False)

    def to_modmap(self, vec: Mapping[Label, Scalar], degree: int, name: str = "f") -> ModMap:
        assert isinstance(self.source, CDGModule) and isinstance(self.target, CDGModule)
        return ModMap(self.source, self.target, self.to_map(vec, degree), name)

    def coordinates(self, f: GradedMap | ModMap, *, verify: bool = True) -> Vector:
        gm = _plain(f)
        if not self.computed(gm.degree):
            raise OutOfWindow(what=self.name, degree=gm.degree, window=self.window)
        cols = gm.columns
        vec = vec_clean({
            lab: cols.get(m, {}).get(y, self.source.field.zero)
            for lab in self.basis(gm.degree)
            for m, y in [self.leads[lab]]
        })
        if verify and not self.to_map(vec, gm.degree).equals(gm):
            raise VerificationFailed(check=f"element of {self.name} in degree {gm.degree}",
                                     witness=gm.nonzero_witness())
        return vec

    def contains(self, f: GradedMap) -> bool:
        try:
            self.coordinates(f)
        except VerificationFailed:
            return False
        return True

    def cohomology(self, degrees: Iterable[int] | None = None) -> Cohomology:
        return cohomology(self.differential, degrees, check=False)

    def closed_maps(self, degree: int) -> list[GradedMap]:
        self.require(degree)
        labels = self.basis(degree)
        if not labels:
            return []
        block = self.differential.block(degree)
        basis, _ = nullspace(block)
        return [self.to_map(v, degree) for v in row_vectors(basis, labels)]

    def null_homotopy(self, f: GradedMap | ModMap) -> GradedMap | None:
        """ψ of degree |f|-1 with D(ψ) = f, or None when no such ψ exists."""
        gm = _plain(f)
        n = gm.degree
        self.require(n)
        self.require(n - 1)
        coords = self.coordinates(gm)
        target_labels = self.basis(n)
        src_labels = self.basis(n - 1)
        if not coords:
            return GradedMap.zero(self.source.carrier, self.target.carrier, n - 1, self.source.field)
        if not src_labels:
            return None
        a = self.differential.block(n - 1)
        b = vectors_matrix([coords], target_labels, self.source.field).transpose()
        (x,) = solve_columns(a, b)
        if x is None:
            return None
        return self.to_map({lab: v for lab, v in zip(src_labels, x, strict=True) if v}, n - 1)


def _generic_window(m: DGObject, n: DGObject) -> Window:
    window = Window()
    for i in m.carrier.support:
        window = window.intersect(n.window.shifted(i))
    if m.window.hi is not None and n.dim:
        if n.window.hi is not None:
            return Window.empty()
        window = window.intersect(Window(n.carrier.max_degree - m.window.hi, None))
    if m.window.lo is not None and n.dim:
        if n.window.lo is not None:
            return Window.empty()
        window = window.intersect(Window(None, n.carrier.min_degree - m.window.lo))
    return window


def _free_window(m: CDGModule, n: DGObject) -> Window:
    window = Window()
    for g in m.generators:
        window = window.intersect(n.window.shifted(m.degree(g)))
    return window


def default_operators(m: DGObject, n: DGObject) -> list[Operator]:
    """Pairs of structure maps with the same key on both sides."""
    ms, ns = m.structure_maps(), n.structure_maps()
    if set(ms) != set(ns):
        raise ValueError(f"{m.name} and {n.name} live over different structures")
    return [(ms[k], ns[k]) for k in ms]


def _generic_component(m: DGObject, n: DGObject, degree: int,
                       operators: Sequence[Operator]) -> list[tuple[dict[Label, Vector], tuple[Label, Label]]]:
    """Basis of linear maps M -> N of the given degree commuting with the operators."""
    fld = m.field
    coords = [(x, y) for x in m.labels for y in n.carrier.component(m.degree(x) + degree)]
    if not coords:
        return []
    pos = {c: i for i, c in enumerate(coords)}
    rows: list[dict[int, Scalar]] = []
    for pm, pn in operators:
        odd = (degree * pm.degree) % 2
        pm_cols = pm.columns
        pn_cols = pn.columns
        # f(P x) - (-1)^{|f||P|} P f(x) = 0, one equation per (x, z)
        for x in m.labels:
            eqs: dict[Label, dict[int, Scalar]] = {}
            for xp, c in pm_cols.get(x, {}).items():
                for z in n.carrier.component(m.degree(xp) + degree):
                    row = eqs.setdefault(z, {})
                    j = pos[(xp, z)]
                    row[j] = row.get(j, fld.zero) + c
            for y in n.carrier.component(m.degree(x) + degree):
                for z, c in pn_cols.get(y, {}).items():
                    row = eqs.setdefault(z, {})
                    j = pos[(x, y)]
                    row[j] = row.get(j, fld.zero) + (c if odd else -c)
            rows.extend(r for r in eqs.values() if any(r.values()))
    if rows:
        matrix = rows_to_matrix(rows, len(coords), fld.domain)
        basis, free = nullspace(matrix)
        vectors = row_vectors(basis, coords)
    else:
        vectors = [{c: fld.one} for c in coords]
        free = tuple(range(len(coords)))
    out: list[tuple[dict[Label, Vector], tuple[Label, Label]]] = []
    for vec, fcol in zip(vectors, free, strict=True):
        cols: dict[Label, Vector] = {}
        for (x, y), v in vec.items():
            cols.setdefault(x, {})[y] = v
        out.append((cols, coords[fcol]))
    return out


def hom_complex(
    m: DGObject,
    n: DGObject,
    degrees: Iterable[int] | None = None,
    *,
    operators: Sequence[Operator] | None = None,
    verify: bool = True,
    name: str | None = None,
) -> HomComplex:
    """The complex of graded A-linear maps M -> N with D(f) = d_N f - (-1)^{|f|} f d_M.

    Computed on generators when M is graded-free and no custom operators are
    given; otherwise by solving the linearity equations degree by degree.
    """
    fld = m.field
    name = name or f"Hom({m.name}, {n.name})"
    free = operators is None and isinstance(m, CDGModule) and m.free_basis is not None
    if free:
        src_degrees = [m.degree(g) for g in m.generators]
        window = _free_window(m, n)
    else:
        src_degrees = m.carrier.support
        window = _generic_window(m, n)
    if not src_degrees or not n.dim:
        natural: list[int] = []
    else:
        natural = list(range(n.carrier.min_degree - max(src_degrees), n.carrier.max_degree - min(src_degrees) + 1))
    wanted = natural if degrees is None else sorted(set(degrees))
    built = tuple(d for d in wanted if not natural or natural[0] <= d <= natural[-1])
    if degrees is not None and natural and wanted:
        lo = None if wanted[0] <= natural[0] else wanted[0]
        hi = None if wanted[-1] >= natural[-1] else wanted[-1]
        window = window.intersect(Window(lo, hi))

    pairs: list[tuple[Label, int]] = []
    maps: dict[Label, GradedMap] = {}
    leads: dict[Label, tuple[Label, Label]] = {}
    ops = operators if operators is not None else (None if free else default_operators(m, n))
    for deg in built:
        if free:
            for g in m.generators:
                for y in n.carrier.component(m.degree(g) + deg):
                    lab = ("hom", g, y)
                    cols = extend_from_generators(m, n, deg, {g: {y: fld.one}})
                    maps[lab] = GradedMap.from_columns(m.carrier, n.carrier, deg, cols, fld, check_degrees=False)
                    leads[lab] = (g, y)
                    pairs.append((lab, deg))
        else:
            assert ops is not None
            for i, (cols, lead) in enumerate(_generic_component(m, n, deg, ops)):
                lab = ("hom", deg, i)
                maps[lab] = GradedMap.from_columns(m.carrier, n.carrier, deg, cols, fld, check_degrees=False)
                leads[lab] = lead
                pairs.append((lab, deg))
    space = GradedSpace.from_pairs(pairs, window)

    built_set = set(built)
    columns: dict[Label, Vector] = {}
    for lab, deg in pairs:
        if deg + 1 not in built_set:
            continue
        f = maps[lab]
        df = n.d.compose(f)
        df = df - f.compose(m.d) if deg % 2 == 0 else df + f.compose(m.d)
        dcols = df.columns
        coords = vec_clean({
            mu: dcols.get(x, {}).get(y, fld.zero)
            for mu in space.component(deg + 1)
            for x, y in [leads[mu]]
        })
        columns[lab] = coords
        if verify:
            rebuilt: dict[Label, Vector] = {}
            for mu, c in coords.items():
                for x, col in maps[mu].columns.items():
                    vec_add(rebuilt.setdefault(x, {}), col, c)
            check = GradedMap.from_columns(m.carrier, n.carrier, deg + 1, rebuilt, fld, check_degrees=False)
            if not check.equals(df):
                raise VerificationFailed(check=f"D maps {name} into itself (degree {deg})", witness=lab)
    differential = GradedMap.from_columns(space, space, 1, columns, fld, check_degrees=False)
    log.debug("hom complex built", extra={"hom": name, "dims": space.dims(), "window": str(window)})
    span = (natural[0], natural[-1]) if natural else None
    return HomComplex(m, n, space, differential, maps, leads, built, name, span)


def _transport(src: HomComplex, tgt: HomComplex, degree: int, fn) -> GradedMap:  # type: ignore[no-untyped-def]
    columns: dict[Label, Vector] = {}
    for lab, d in zip(src.space.labels, src.space.degrees, strict=True):
        if d + degree not in tgt.built:
            continue
        columns[lab] = tgt.coordinates(fn(src.maps[lab], d))
    return GradedMap.from_columns(src.space, tgt.space, degree, columns, src.source.field, check_degrees=False)


def _plain(f: GradedMap | ModMap) -> GradedMap:
    return f.map if isinstance(f, ModMap) else f


def postcompose(g: GradedMap | ModMap, src: HomComplex, tgt: HomComplex) -> GradedMap:
    """g_*: Hom(T, M) -> Hom(T, N), f ↦ g∘f."""
    gm = _plain(g)
    return _transport(src, tgt, gm.degree, lambda f, d: gm.compose(f))


def precompose(f: GradedMap | ModMap, src: HomComplex, tgt: HomComplex) -> GradedMap:
    """f^*: Hom(N, V) -> Hom(M, V), h ↦ (-1)^{|h||f|} h∘f."""
    fm = _plain(f)

    def fn(h: GradedMap, d: int) -> GradedMap:
        comp = h.compose(fm)
        return -comp if (d * fm.degree) % 2 else comp

    return _transport(src, tgt, fm.degree, fn)
