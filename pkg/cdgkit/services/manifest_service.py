"""Manifest parsing, object construction and serialization.

A manifest is a JSON document validated against ``cdgkit.models.schemas.Manifest``.
Parsing never raises anything but ``ManifestError`` subclasses on malformed input.
"""

from __future__ import annotations

import json
from collections.abc import Iterator, Mapping, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from cdgkit.bar.bar import BarLetters
from cdgkit.bar.contra import BarContramodule
from cdgkit.cdg.algebra import CDGAlgebra
from cdgkit.cdg.constructions import TwistedModule, regular_module, trivial_module, twisted_module
from cdgkit.cdg.examples import exterior, ground, polynomial, truncated_polynomial
from cdgkit.cdg.module import CDGModule, ModMap
from cdgkit.coalg.coalgebra import CDGCoalgebra, dual_coalgebra
from cdgkit.core.config import Settings, get_settings
from cdgkit.core.errors import (
    DegreeMismatch,
    DimensionMismatch,
    ManifestError,
    ManifestSyntaxError,
    UnknownName,
)
from cdgkit.core.logging import get_logger
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import GradedSpace, Label, Vector, Window, vec_add
from cdgkit.models.schemas import (
    AlgebraSpec,
    BarContramoduleSpec,
    BasisEntry,
    BlockSpec,
    CoalgebraSpec,
    ConnectionEntry,
    CoproductSpec,
    FamilySpec,
    ImageSpec,
    LetterActionSpec,
    Manifest,
    MapSpec,
    ModuleSpec,
    ProductSpec,
    TensorTermSpec,
    TermSpec,
    WindowSpec,
)
from cdgkit.services.families import (
    TestFamily,
    enumerate_bar_contramodules,
    enumerate_twisted,
    injective_family,
    projective_family,
)

log = get_logger(__name__)


# ---------------------------------------------------------------------------
# parsing


def parse_manifest(text: str) -> Manifest:
    """Validate manifest text; every referenced name must be defined."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ManifestSyntaxError(e.msg, line=e.lineno, col=e.colno) from e
    except RecursionError as e:
        raise ManifestSyntaxError("nesting too deep", line=1, col=1) from e
    if not isinstance(raw, dict):
        raise ManifestError("a manifest is a JSON object")
    try:
        manifest = Manifest.model_validate(raw)
    except ValidationError as e:
        issues = e.errors()
        first = ".".join(str(p) for p in issues[0]["loc"])
        message = "; ".join(f"{'.'.join(str(p) for p in i['loc'])}: {i['msg']}" for i in issues)
        raise ManifestError(message, path=first) from e
    check_names(manifest)
    return manifest


def load_manifest(path: str | Path) -> Manifest:
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        before = data[: e.start]
        line = before.count(b"\n") + 1
        col = e.start - (before.rfind(b"\n") + 1) + 1
        raise ManifestSyntaxError("invalid UTF-8", line=line, col=col) from e
    return parse_manifest(text)


def _require(name: str | None, table: Mapping[str, Any], path: str) -> None:
    if name is not None and name not in table:
        raise UnknownName(name=name, path=path)


def check_names(manifest: Manifest) -> None:
    for name, c in manifest.coalgebras.items():
        _require(c.dual_of, manifest.algebras, f"coalgebras.{name}.dual_of")
    for name, m in manifest.modules.items():
        _require(m.algebra, manifest.algebras, f"modules.{name}.algebra")
    for name, f in manifest.maps.items():
        _require(f.source, manifest.modules, f"maps.{name}.source")
        _require(f.target, manifest.modules, f"maps.{name}.target")
    for name, w in manifest.contramodules.items():
        _require(w.algebra, manifest.algebras, f"contramodules.{name}.algebra")
    for name, fam in manifest.families.items():
        _require(fam.algebra, manifest.algebras, f"families.{name}.algebra")
        pool = manifest.modules if fam.kind == "projective" else manifest.contramodules
        for i, member in enumerate(fam.members):
            _require(member, pool, f"families.{name}.members.{i}")
    ids = [t.id for t in manifest.tasks]
    if len(set(ids)) != len(ids):
        dup = next(i for i in ids if ids.count(i) > 1)
        raise ManifestError(f"duplicate task id {dup!r}", path="tasks")
    objects = {**manifest.algebras, **manifest.coalgebras, **manifest.modules, **manifest.maps,
               **manifest.contramodules}
    for i, t in enumerate(manifest.tasks):
        _require(t.target, objects, f"tasks.{i}.target")
        _require(t.family, manifest.families, f"tasks.{i}.family")
        _require(t.injective_family, manifest.families, f"tasks.{i}.injective_family")
        for j, dep in enumerate(t.after):
            if dep not in ids:
                raise UnknownName(name=dep, path=f"tasks.{i}.after.{j}")


# ---------------------------------------------------------------------------
# construction


def to_label(spec: Any) -> Label:
    """JSON arrays become tuples, recursively."""
    if isinstance(spec, list):
        return tuple(to_label(x) for x in spec)
    return spec


def from_label(lab: Label) -> Any:
    if isinstance(lab, tuple):
        return [from_label(x) for x in lab]
    return lab


def _terms(fld: Field, terms: Sequence[TermSpec]) -> Vector:
    out: Vector = {}
    for t in terms:
        lab = to_label(t.label)
        out[lab] = out.get(lab, fld.zero) + fld.convert(t.coeff)
    return {k: v for k, v in out.items() if v}


def _basis(entries: Sequence[BasisEntry]) -> list[tuple[Label, int]]:
    return [(to_label(e.label), e.degree) for e in entries]


def _window(spec: WindowSpec | None) -> Window | None:
    return None if spec is None else Window(spec.lo, spec.hi)


@contextmanager
def _at(path: str) -> Iterator[None]:
    """Re-raise construction errors as ManifestError at ``path``."""
    try:
        yield
    except ManifestError:
        raise
    except (DegreeMismatch, KeyError, ValueError, TypeError, ZeroDivisionError) as e:
        raise ManifestError(str(e), path=path) from e


def _dense(fld: Field, rows: list[list[Any]], src: list[Label], tgt: list[Label], obj: str,
           degree: int) -> dict[Label, Vector]:
    actual = (len(rows), max((len(r) for r in rows), default=0))
    ragged = any(len(r) != actual[1] for r in rows)
    if ragged or actual != (len(tgt), len(src)):
        raise DimensionMismatch(obj=obj, degree=degree, expected=(len(tgt), len(src)), actual=actual)
    cols: dict[Label, Vector] = {}
    for i, row in enumerate(rows):
        for j, raw in enumerate(row):
            v = fld.convert(raw)
            if v:
                cols.setdefault(src[j], {})[tgt[i]] = v
    return cols


def _blocks(fld: Field, basis: list[tuple[Label, int]], blocks: Sequence[BlockSpec], obj: str
            ) -> dict[Label, Vector]:
    out: dict[Label, Vector] = {}
    for b in blocks:
        src = [lab for lab, d in basis if d == b.degree]
        tgt = [lab for lab, d in basis if d == b.degree + 1]
        for lab, col in _dense(fld, b.rows, src, tgt, obj, b.degree).items():
            vec_add(out.setdefault(lab, {}), col)
    return out


def build_algebra(fld: Field, name: str, spec: AlgebraSpec, *, window: int) -> CDGAlgebra:
    deg = spec.generator_degree
    if spec.preset == "ground":
        return ground(fld).renamed(name)
    if spec.preset == "polynomial":
        hi = spec.window.hi if spec.window and spec.window.hi is not None else window
        return polynomial(fld, hi, degree=deg or 1, d_coeff=spec.differential_coeff or 0).renamed(name)
    if spec.preset == "exterior":
        return exterior(fld, 1 if deg is None else deg).renamed(name)
    if spec.preset == "truncated-polynomial":
        return truncated_polynomial(fld, 2 if deg is None else deg, spec.nilpotency or 3).renamed(name)
    basis = _basis(spec.basis)
    products = {(to_label(p.left), to_label(p.right)): _terms(fld, p.value) for p in spec.products}
    diff = {to_label(i.source): _terms(fld, i.value) for i in spec.differential}
    for lab, col in _blocks(fld, basis, spec.differential_blocks, f"algebras.{name}").items():
        diff.setdefault(lab, {}).update(col)
    return CDGAlgebra.build(fld, basis, to_label(spec.unit), products, diff, _terms(fld, spec.curvature),
                            name=name, window=_window(spec.window))


def build_coalgebra(fld: Field, name: str, spec: CoalgebraSpec, algebras: Mapping[str, CDGAlgebra]
                    ) -> CDGCoalgebra:
    if spec.dual_of is not None:
        return dual_coalgebra(algebras[spec.dual_of], name=name)
    comult = {
        to_label(c.source): {(to_label(t.left), to_label(t.right)): fld.convert(t.coeff) for t in c.value}
        for c in spec.comultiplication
    }
    diff = {to_label(i.source): _terms(fld, i.value) for i in spec.differential}
    return CDGCoalgebra.build(fld, _basis(spec.basis), comult, _terms(fld, spec.counit), diff,
                              _terms(fld, spec.curvature), name=name)


def build_module(name: str, spec: ModuleSpec, algebra: CDGAlgebra) -> CDGModule:
    if spec.kind == "trivial":
        return trivial_module(algebra, spec.degree, name=name)
    if spec.kind == "regular":
        return regular_module(algebra, name=name)
    fld = algebra.field
    conn: dict[Label, dict[Label, Vector]] = {}
    for e in spec.connection:
        conn.setdefault(to_label(e.source), {})[to_label(e.target)] = _terms(fld, e.value)
    return twisted_module(algebra, _basis(spec.generators), conn, name=name)


def build_map(name: str, spec: MapSpec, source: CDGModule, target: CDGModule) -> ModMap:
    if spec.kind == "identity":
        if source is not target:
            raise ValueError("an identity map needs source == target")
        return ModMap(source, source, ModMap.identity(source).map, name)
    fld = source.field
    if spec.kind == "augmentation":
        if not isinstance(source, TwistedModule) or source.rank != 1 or target.dim != 1:
            raise ValueError("an augmentation runs from a rank one twisted module to a one-dimensional module")
        (g,) = source.generators
        return ModMap.from_generators(source, target, spec.degree, {g: {target.labels[0]: 1}}, name=name)
    images = {to_label(i.source): _terms(fld, i.value) for i in spec.images}
    if isinstance(source, TwistedModule):
        unit = source.algebra.unit
        return ModMap.from_generators(source, target, spec.degree, {(unit, v): img for v, img in images.items()},
                                      name=name)
    return ModMap.from_columns(source, target, spec.degree, images, name=name)


def build_contramodule(name: str, spec: BarContramoduleSpec, letters: BarLetters) -> BarContramodule:
    fld = letters.field
    basis = _basis(spec.basis)
    labels = [lab for lab, _ in basis]
    ops = {}
    for entry in spec.letters:
        a = to_label(entry.letter)
        ops[a] = _dense(fld, entry.rows, labels, labels, f"contramodules.{name}.t_{a}", -letters.letter_degree(a))
    diff = None if spec.differential is None else _dense(fld, spec.differential, labels, labels,
                                                         f"contramodules.{name}.d", 1)
    return BarContramodule.build(letters, basis, ops, diff, name=name)


def build_family(name: str, spec: FamilySpec, ws: Workspace) -> TestFamily:
    algebra = ws.algebras[spec.algebra]
    bounds: dict[str, Any] = {"min_degree": spec.min_degree, "max_degree": spec.max_degree,
                              "coefficients": spec.coefficients, "settings": ws.settings, "name": name}
    if spec.kind == "projective":
        if spec.enumerate:
            return enumerate_twisted(algebra, max_rank=spec.max_rank, **bounds)
        members = [ws.modules[m] for m in spec.members]
        for m in members:
            if m.algebra is not algebra:
                raise ValueError(f"{m.name} is not a module over {spec.algebra}")
        return projective_family(members, name=name)
    letters = ws.letters(spec.algebra)
    if spec.enumerate:
        return enumerate_bar_contramodules(letters, max_dim=spec.max_rank, **bounds)
    contra = [ws.contramodules[w] for w in spec.members]
    for w in contra:
        if w.letters is not letters:
            raise ValueError(f"{w.name} is not a contramodule over the bar construction of {spec.algebra}")
    return injective_family(contra, name=name)


@dataclass
class Workspace:
    """Every object a manifest declares, constructed over one field."""

    manifest: Manifest
    field: Field
    settings: Settings
    window: int
    algebras: dict[str, CDGAlgebra] = field(default_factory=dict)
    coalgebras: dict[str, CDGCoalgebra] = field(default_factory=dict)
    modules: dict[str, CDGModule] = field(default_factory=dict)
    maps: dict[str, ModMap] = field(default_factory=dict)
    contramodules: dict[str, BarContramodule] = field(default_factory=dict)
    families: dict[str, TestFamily] = field(default_factory=dict)
    _letters: dict[str, BarLetters] = field(default_factory=dict, repr=False)

    def letters(self, algebra: str) -> BarLetters:
        if algebra not in self._letters:
            self._letters[algebra] = BarLetters.build(self.algebras[algebra])
        return self._letters[algebra]

    def algebra_name(self, algebra: CDGAlgebra) -> str:
        for name, a in self.algebras.items():
            if a is algebra:
                return name
        raise KeyError(algebra.name)

    def lookup(self, name: str) -> Any:
        for table in (self.algebras, self.coalgebras, self.modules, self.maps, self.contramodules):
            if name in table:
                return table[name]
        raise UnknownName(name=name, path="target")


def build_workspace(manifest: Manifest, *, settings: Settings | None = None,
                    window: int | None = None) -> Workspace:
    settings = settings or get_settings()
    with _at("field"):
        fld = Field.parse(manifest.field or settings.field)
    hi = window if window is not None else manifest.window if manifest.window is not None else settings.default_window
    ws = Workspace(manifest, fld, settings, hi)
    for name, spec in manifest.algebras.items():
        with _at(f"algebras.{name}"):
            ws.algebras[name] = build_algebra(fld, name, spec, window=hi)
    for name, cspec in manifest.coalgebras.items():
        with _at(f"coalgebras.{name}"):
            ws.coalgebras[name] = build_coalgebra(fld, name, cspec, ws.algebras)
    for name, mspec in manifest.modules.items():
        with _at(f"modules.{name}"):
            ws.modules[name] = build_module(name, mspec, ws.algebras[mspec.algebra])
    for name, fspec in manifest.maps.items():
        with _at(f"maps.{name}"):
            ws.maps[name] = build_map(name, fspec, ws.modules[fspec.source], ws.modules[fspec.target])
    for name, wspec in manifest.contramodules.items():
        with _at(f"contramodules.{name}"):
            ws.contramodules[name] = build_contramodule(name, wspec, ws.letters(wspec.algebra))
    for name, famspec in manifest.families.items():
        with _at(f"families.{name}"):
            ws.families[name] = build_family(name, famspec, ws)
    log.info("manifest built", extra={"field": fld.name, "window": hi, "algebras": len(ws.algebras),
                                      "modules": len(ws.modules), "tasks": len(manifest.tasks)})
    return ws


# ---------------------------------------------------------------------------
# serialization


def _scalar(fld: Field, x: Scalar) -> int | str:
    text = fld.to_text(x)
    return int(text) if "/" not in text else text


def _term_specs(fld: Field, vec: Mapping[Label, Scalar]) -> list[TermSpec]:
    return [TermSpec(label=from_label(k), coeff=_scalar(fld, v)) for k, v in vec.items() if v]


def _basis_specs(space: GradedSpace) -> list[BasisEntry]:
    return [BasisEntry(label=from_label(lab), degree=d) for lab, d in zip(space.labels, space.degrees, strict=True)]


def _window_spec(window: Window) -> WindowSpec | None:
    return None if window.is_total else WindowSpec(lo=window.lo, hi=window.hi)


def dump_algebra(a: CDGAlgebra) -> AlgebraSpec:
    fld = a.field
    products = [
        ProductSpec(left=from_label(x), right=from_label(y), value=_term_specs(fld, vec))
        for (x, y), vec in a.table.items()
        if x != a.unit and y != a.unit
    ]
    diff = [ImageSpec(source=from_label(lab), value=_term_specs(fld, col)) for lab, col in a.d.columns.items() if col]
    return AlgebraSpec(basis=_basis_specs(a.carrier), unit=from_label(a.unit), products=products,
                       differential=diff, curvature=_term_specs(fld, a.h), window=_window_spec(a.window))


def dump_coalgebra(c: CDGCoalgebra) -> CoalgebraSpec:
    fld = c.field
    comult = [
        CoproductSpec(source=from_label(x), value=[
            TensorTermSpec(left=from_label(l), right=from_label(r), coeff=_scalar(fld, v)) for (l, r), v in vec.items()
        ])
        for x, vec in c.comult.items()
    ]
    diff = [ImageSpec(source=from_label(lab), value=_term_specs(fld, col)) for lab, col in c.d.columns.items() if col]
    return CoalgebraSpec(basis=_basis_specs(c.carrier), comultiplication=comult,
                         counit=_term_specs(fld, c.counit), differential=diff, curvature=_term_specs(fld, c.h))


def dump_module(m: TwistedModule, algebra: str) -> ModuleSpec:
    fld = m.field
    gens = [BasisEntry(label=from_label(v), degree=d) for v, d in m.generator_degrees.items()]
    conn = [
        ConnectionEntry(source=from_label(v), target=from_label(vp), value=_term_specs(fld, entry))
        for v, row in m.connection.items() for vp, entry in row.items()
    ]
    return ModuleSpec(kind="twisted", algebra=algebra, generators=gens, connection=conn)


def dump_map(f: ModMap, source: str, target: str) -> MapSpec:
    fld = f.field
    if isinstance(f.source, TwistedModule):
        unit = f.source.algebra.unit
        images = [ImageSpec(source=from_label(v), value=_term_specs(fld, f.map.column((unit, v))))
                  for v in f.source.generator_degrees]
    else:
        images = [ImageSpec(source=from_label(lab), value=_term_specs(fld, col)) for lab, col in f.map.columns.items()]
    return MapSpec(source=source, target=target, degree=f.degree, images=images)


def dump_contramodule(w: BarContramodule, algebra: str) -> BarContramoduleSpec:
    fld = w.field
    labels = w.carrier.labels

    def dense(cols: Mapping[Label, Mapping[Label, Scalar]]) -> list[list[int | str]]:
        return [[_scalar(fld, cols.get(j, {}).get(i, fld.zero)) for j in labels] for i in labels]

    letters = [LetterActionSpec(letter=from_label(a), rows=dense(op.columns)) for a, op in w.operators.items()]
    return BarContramoduleSpec(algebra=algebra, basis=_basis_specs(w.carrier), letters=letters,
                               differential=dense(w.d.columns))


def dump_json(spec: Any) -> str:
    """Deterministic JSON for any manifest model."""
    return json.dumps(spec.model_dump(exclude_none=True), ensure_ascii=False, indent=2, sort_keys=True)
