from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from sympy.polys.matrices import DomainMatrix

from cdgkit.core.errors import DegreeMismatch, OutOfWindow
from cdgkit.linalg.field import Field, Scalar

Label = Hashable
Vector = dict[Label, Scalar]


@dataclass(frozen=True)
class Window:
    """Degree interval on which a (possibly truncated) object is exact.

    ``None`` on a side means exact in that direction.
    """

    lo: int | None = None
    hi: int | None = None

    @classmethod
    def total(cls) -> Window:
        return cls()

    @classmethod
    def empty(cls) -> Window:
        return cls(1, 0)

    @property
    def is_total(self) -> bool:
        return self.lo is None and self.hi is None

    @property
    def is_empty(self) -> bool:
        return self.lo is not None and self.hi is not None and self.lo > self.hi

    def contains(self, degree: int) -> bool:
        if self.lo is not None and degree < self.lo:
            return False
        return self.hi is None or degree <= self.hi

    def intersect(self, other: Window) -> Window:
        lo = _max_opt(self.lo, other.lo)
        hi = _min_opt(self.hi, other.hi)
        return Window(lo, hi)

    def shifted(self, n: int) -> Window:
        """Window of V[n] when self is the window of V."""
        return Window(
            None if self.lo is None else self.lo - n,
            None if self.hi is None else self.hi - n,
        )

    def inner(self, k: int = 1) -> Window:
        """Shrink by k on each bounded side (e.g. cohomology needs n-1 and n+1)."""
        return Window(
            None if self.lo is None else self.lo + k,
            None if self.hi is None else self.hi - k,
        )

    def clip(self, degrees: Iterable[int]) -> list[int]:
        return [d for d in degrees if self.contains(d)]

    def __str__(self) -> str:
        if self.is_empty:
            return "[]"
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "+inf" if self.hi is None else str(self.hi)
        return f"[{lo}, {hi}]"


def _max_opt(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _min_opt(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass(frozen=True, eq=False)
class GradedSpace:
    """A degreewise finite graded vector space with a labelled basis.

    The basis is kept sorted by degree (stable), so every homogeneous
    component occupies a contiguous block of indices.
    """

    labels: tuple[Label, ...]
    degrees: tuple[int, ...]
    window: Window = field(default_factory=Window)

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        degrees = tuple(int(d) for d in self.degrees)
        if len(labels) != len(degrees):
            raise ValueError("labels and degrees must have the same length")
        order = sorted(range(len(labels)), key=lambda i: degrees[i])
        object.__setattr__(self, "labels", tuple(labels[i] for i in order))
        object.__setattr__(self, "degrees", tuple(degrees[i] for i in order))
        if len(set(labels)) != len(labels):
            seen: set[Label] = set()
            dup = next(lab for lab in labels if lab in seen or seen.add(lab))
            raise ValueError(f"duplicate basis label {dup!r}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Label, int]], window: Window | None = None) -> GradedSpace:
        pairs = list(pairs)
        return cls(
            tuple(p[0] for p in pairs),
            tuple(p[1] for p in pairs),
            window if window is not None else Window(),
        )

    @classmethod
    def zero(cls) -> GradedSpace:
        return cls((), ())

    @cached_property
    def index(self) -> dict[Label, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def degree_of(self) -> dict[Label, int]:
        return dict(zip(self.labels, self.degrees, strict=True))

    @cached_property
    def blocks(self) -> dict[int, range]:
        out: dict[int, range] = {}
        start = 0
        for i in range(1, len(self.degrees) + 1):
            if i == len(self.degrees) or self.degrees[i] != self.degrees[start]:
                out[self.degrees[start]] = range(start, i)
                start = i
        return out

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def support(self) -> list[int]:
        return list(self.blocks)

    @property
    def min_degree(self) -> int | None:
        return self.degrees[0] if self.degrees else None

    @property
    def max_degree(self) -> int | None:
        return self.degrees[-1] if self.degrees else None

    def indices(self, degree: int) -> range:
        return self.blocks.get(degree, range(0))

    def component(self, degree: int) -> tuple[Label, ...]:
        return tuple(self.labels[i] for i in self.indices(degree))

    def component_dim(self, degree: int) -> int:
        return len(self.indices(degree))

    def dims(self) -> dict[int, int]:
        return {d: len(r) for d, r in self.blocks.items()}

    def require(self, degree: int, what: str = "space") -> None:
        if not self.window.contains(degree):
            raise OutOfWindow(what=what, degree=degree, window=self.window)

    def same_basis(self, other: GradedSpace) -> bool:
        return self is other or (self.labels == other.labels and self.degrees == other.degrees)

    def __contains__(self, label: object) -> bool:
        return label in self.index

    def __repr__(self) -> str:
        return f"GradedSpace(dims={self.dims()}, window={self.window})"


# ---------------------------------------------------------------------------
# vectors


def vec_add(acc: Vector, vec: Mapping[Label, Scalar], coeff: Scalar | None = None) -> Vector:
    """acc += coeff * vec, in place, dropping zeros."""
    for lab, val in vec.items():
        term = val if coeff is None else coeff * val
        new = acc.get(lab)
        new = term if new is None else new + term
        if new:
            acc[lab] = new
        else:
            acc.pop(lab, None)
    return acc


def vec_neg(vec: Mapping[Label, Scalar]) -> Vector:
    return {lab: -val for lab, val in vec.items()}


def vec_sub(a: Mapping[Label, Scalar], b: Mapping[Label, Scalar]) -> Vector:
    out = dict(a)
    for lab, val in b.items():
        new = out.get(lab)
        new = -val if new is None else new - val
        if new:
            out[lab] = new
        else:
            out.pop(lab, None)
    return out


def vec_clean(vec: Mapping[Label, Scalar]) -> Vector:
    return {lab: val for lab, val in vec.items() if val}


def vec_restrict(vec: Mapping[Label, Scalar], keep: frozenset[Label] | None) -> Vector:
    """The coordinates of vec on ``keep`` (all of them when keep is None)."""
    if keep is None:
        return dict(vec)
    return {lab: v for lab, v in vec.items() if lab in keep}


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True, eq=False)
class GradedMap:
    """A homogeneous linear map of fixed degree, stored as one sparse matrix.

    Rows follow the target basis, columns the source basis; the block
    between source degree i and target degree i+degree is a view of it.
    """

    source: GradedSpace
    target: GradedSpace
    degree: int
    matrix: DomainMatrix
    field: Field
    window: Window | None = None

    def __post_init__(self) -> None:
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"{self.target.dim}x{self.source.dim}"
            )
        if self.matrix.domain != self.field.domain:
            object.__setattr__(self, "matrix", self.matrix.convert_to(self.field.domain))
        if self.window is None:
            w = self.source.window.intersect(self.target.window.shifted(self.degree))
            object.__setattr__(self, "window", w)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_columns(
        cls,
        source: GradedSpace,
        target: GradedSpace,
        degree: int,
        columns: Mapping[Label, Mapping[Label, Any]],
        fld: Field,
        *,
        window: Window | None = None,
        check_degrees: bool = True,
    ) -> GradedMap:
        dod: dict[int, dict[int, Scalar]] = {}
        tindex = target.index
        tdeg = target.degree_of
        sdeg = source.degree_of
        for src, col in columns.items():
            j = source.index[src]
            for tgt, raw in col.items():
                val = fld.convert(raw)
                if not val:
                    continue
                if check_degrees and tdeg[tgt] != sdeg[src] + degree:
                    raise DegreeMismatch(
                        what=f"entry {src!r} -> {tgt!r}",
                        expected=sdeg[src] + degree,
                        actual=tdeg[tgt],
                    )
                i = tindex[tgt]
                row = dod.setdefault(i, {})
                new = row.get(j, fld.zero) + val
                if new:
                    row[j] = new
                else:
                    row.pop(j, None)
        matrix = DomainMatrix.from_dod(
            {i: r for i, r in dod.items() if r}, (target.dim, source.dim), fld.domain
        )
        return cls(source, target, degree, matrix, fld, window)

    @classmethod
    def zero(cls, source: GradedSpace, target: GradedSpace, degree: int, fld: Field) -> GradedMap:
        return cls(
            source, target, degree, DomainMatrix.zeros((target.dim, source.dim), fld.domain), fld
        )

    @classmethod
    def identity(cls, space: GradedSpace, fld: Field) -> GradedMap:
        dod = {i: {i: fld.one} for i in range(space.dim)}
        return cls(space, space, 0, DomainMatrix.from_dod(dod, (space.dim, space.dim), fld.domain), fld)

    # -- access ------------------------------------------------------------

    @cached_property
    def columns(self) -> dict[Label, Vector]:
        cols: dict[Label, Vector] = {}
        src = self.source.labels
        tgt = self.target.labels
        for i, row in self.matrix.to_dod().items():
            for j, val in row.items():
                if val:
                    cols.setdefault(src[j], {})[tgt[i]] = val
        return cols

    def column(self, label: Label) -> Vector:
        return dict(self.columns.get(label, {}))

    def apply(self, vec: Mapping[Label, Scalar]) -> Vector:
        out: Vector = {}
        cols = self.columns
        for lab, coeff in vec.items():
            col = cols.get(lab)
            if col:
                vec_add(out, col, coeff)
        return out

    def block(self, degree: int) -> DomainMatrix:
        """Matrix of the component source^degree -> target^(degree + self.degree)."""
        rows = list(self.target.indices(degree + self.degree))
        cols = list(self.source.indices(degree))
        return self.matrix.extract(rows, cols)

    @property
    def is_zero(self) -> bool:
        return self.matrix.is_zero_matrix

    def nonzero_witness(self) -> tuple[Label, Label] | None:
        for src, col in self.columns.items():
            for tgt in col:
                return (src, tgt)
        return None

    # -- algebra -----------------------------------------------------------

    def _check_parallel(self, other: GradedMap) -> None:
        if not (
            self.source.same_basis(other.source)
            and self.target.same_basis(other.target)
            and self.degree == other.degree
        ):
            raise ValueError("maps are not parallel (different source, target or degree)")

    def __add__(self, other: GradedMap) -> GradedMap:
        self._check_parallel(other)
        return GradedMap(self.source, self.target, self.degree, self.matrix + other.matrix,
                         self.field, self.window.intersect(other.window))

    def __sub__(self, other: GradedMap) -> GradedMap:
        self._check_parallel(other)
        return GradedMap(self.source, self.target, self.degree, self.matrix - other.matrix,
                         self.field, self.window.intersect(other.window))

    def __neg__(self) -> GradedMap:
        return GradedMap(self.source, self.target, self.degree, -self.matrix, self.field, self.window)

    def scaled(self, coeff: Any) -> GradedMap:
        c = self.field.convert(coeff)
        return GradedMap(self.source, self.target, self.degree, self.matrix.scalarmul(c),
                         self.field, self.window)

    def compose(self, other: GradedMap) -> GradedMap:
        """self ∘ other."""
        if not other.target.same_basis(self.source):
            raise ValueError("maps are not composable")
        window = other.window.intersect(self.window.shifted(-other.degree))
        return GradedMap(other.source, self.target, self.degree + other.degree,
                         self.matrix.matmul(other.matrix), self.field, window)

    def __matmul__(self, other: GradedMap) -> GradedMap:
        return self.compose(other)

    def equals(self, other: GradedMap) -> bool:
        self._check_parallel(other)
        return self.matrix == other.matrix

    def restricted(self, source: GradedSpace | None = None, target: GradedSpace | None = None) -> GradedMap:
        """Same matrix seen between spaces with identical bases (e.g. other windows)."""
        src = source or self.source
        tgt = target or self.target
        if not (src.same_basis(self.source) and tgt.same_basis(self.target)):
            raise ValueError("restricted() only swaps spaces with identical bases")
        return GradedMap(src, tgt, self.degree, self.matrix, self.field)

    def __repr__(self) -> str:
        return (f"GradedMap(degree={self.degree}, {self.source.dim}->{self.target.dim}, "
                f"nnz={self.matrix.nnz()}, window={self.window})")


# ---------------------------------------------------------------------------
# tensor products and shifts


def _tensor_window(v: GradedSpace, w: GradedSpace) -> Window:
    """Degrees of V⊗W untouched by unknown components of either factor."""
    lo: int | None = None
    hi: int | None = None
    for a, b in ((v, w), (w, v)):
        wa, wb = a.window, b.window
        if wa.is_total:
            continue
        if wa.is_empty:
            return Window.empty()
        if wa.hi is not None:
            # unknown a^i for i > hi_a meets b^j with j >= min deg b
            if wb.lo is not None:
                return Window.empty()
            if b.dim:
                hi = _min_opt(hi, wa.hi + b.min_degree)
        if wa.lo is not None:
            if wb.hi is not None:
                return Window.empty()
            if b.dim:
                lo = _max_opt(lo, wa.lo + b.max_degree)
    return Window(lo, hi)


def tensor_space(v: GradedSpace, w: GradedSpace, degrees: Iterable[int] | None = None) -> GradedSpace:
    """V ⊗ W with labels (v, w), lexicographic within each degree.

    The window narrows to the degrees no unknown component of a factor can
    reach; asking for ``degrees`` outside it raises OutOfWindow.
    """
    pairs = [
        ((a, b), da + db)
        for a, da in zip(v.labels, v.degrees, strict=True)
        for b, db in zip(w.labels, w.degrees, strict=True)
    ]
    window = _tensor_window(v, w)
    for n in degrees or ():
        if not window.contains(n):
            raise OutOfWindow(what=f"{v!r} ⊗ {w!r}", degree=n, window=window)
    return GradedSpace.from_pairs(pairs, window)


def tensor_map(f: GradedMap, g: GradedMap, degrees: Iterable[int] | None = None) -> GradedMap:
    """f⊗g with the Koszul sign, (f⊗g)(v⊗w) = (-1)^{|g||v|} f(v)⊗g(w)."""
    if f.field != g.field:
        raise ValueError("maps over different fields")
    source = tensor_space(f.source, g.source, degrees)
    target = tensor_space(f.target, g.target)
    fcols, gcols = f.columns, g.columns
    vdeg = f.source.degree_of
    cols: dict[Label, Vector] = {}
    for a, b in source.labels:
        fa, gb = fcols.get(a), gcols.get(b)
        if not fa or not gb:
            continue
        odd = (g.degree * vdeg[a]) % 2
        cols[(a, b)] = {(x, y): (-u * v if odd else u * v) for x, u in fa.items() for y, v in gb.items()}
    return GradedMap.from_columns(source, target, f.degree + g.degree, cols, f.field)


def shift(v: GradedSpace, n: int) -> GradedSpace:
    """V[n], with (V[n])^i = V^{n+i}."""
    return GradedSpace(v.labels, tuple(d - n for d in v.degrees), v.window.shifted(n))


def shift_map(f: GradedMap, n: int) -> GradedMap:
    """f[n]: V[n] -> W[n], equal to (-1)^{n|f|} f on the shared labels."""
    matrix = -f.matrix if (n * f.degree) % 2 else f.matrix
    return GradedMap(shift(f.source, n), shift(f.target, n), f.degree, matrix, f.field)


def direct_sum(spaces: Sequence[tuple[Hashable, GradedSpace]]) -> GradedSpace:
    """⊕ of tagged spaces; labels become (tag, label)."""
    pairs = [((tag, lab), d) for tag, sp in spaces for lab, d in zip(sp.labels, sp.degrees, strict=True)]
    window = Window()
    for _, sp in spaces:
        window = window.intersect(sp.window)
    return GradedSpace.from_pairs(pairs, window)
