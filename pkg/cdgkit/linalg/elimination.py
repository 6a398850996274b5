from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from sympy.polys.matrices import DomainMatrix
from sympy.polys.domains.domain import Domain

from cdgkit.core.errors import OutOfWindow
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import GradedMap, GradedSpace, Label, Vector, Window


def rref(matrix: DomainMatrix, *, method: str | None = None) -> tuple[DomainMatrix, tuple[int, ...]]:
    """Normalized reduced row echelon form over the ground field.

    Over QQ denominators are cleared first and elimination is fraction-free;
    over GF(p) plain Gauss-Jordan is used.
    """
    rows, cols = matrix.shape
    if rows == 0 or cols == 0:
        return matrix, ()
    if method is None:
        method = "GJ" if matrix.domain.is_FiniteField else "CD"
    reduced, pivots = matrix.rref(method=method)
    return reduced, tuple(pivots)


def rank(matrix: DomainMatrix, *, method: str | None = None) -> int:
    return len(rref(matrix, method=method)[1])


def nullspace(matrix: DomainMatrix) -> tuple[DomainMatrix, tuple[int, ...]]:
    """Rows spanning the right kernel, and the free columns.

    Row k has a 1 in free column k and 0 in every other free column.
    """
    rows, cols = matrix.shape
    K = matrix.domain
    if cols == 0:
        return DomainMatrix.zeros((0, 0), K), ()
    if rows == 0:
        return DomainMatrix.eye(cols, K).to_sparse(), tuple(range(cols))
    reduced, pivots = rref(matrix)
    free = tuple(j for j in range(cols) if j not in set(pivots))
    if not free:
        return DomainMatrix.zeros((0, cols), K), ()
    return reduced.nullspace_from_rref(pivots).to_sparse(), free


def solve_columns(a: DomainMatrix, b: DomainMatrix) -> list[list[Scalar] | None]:
    """Solve a x = b[:, j] for each column j; None where inconsistent."""
    K = a.domain
    nrows, ncols = a.shape
    nrhs = b.shape[1]
    if nrhs == 0:
        return []
    if ncols == 0:
        bd = b.to_dod()
        return [
            None if any(row.get(j) for row in bd.values()) else []
            for j in range(nrhs)
        ]
    aug = a.hstack(b) if nrows else DomainMatrix.zeros((0, ncols + nrhs), K)
    reduced, pivots = rref(aug)
    a_pivots = [p for p in pivots if p < ncols]
    ra = len(a_pivots)
    dod = reduced.to_dod()
    out: list[list[Scalar] | None] = []
    for j in range(nrhs):
        col = ncols + j
        if any(dod.get(r, {}).get(col) for r in range(ra, nrows)):
            out.append(None)
            continue
        x = [K.zero] * ncols
        for r, p in enumerate(a_pivots):
            val = dod.get(r, {}).get(col)
            if val:
                x[p] = val
        out.append(x)
    return out


def solve(a: DomainMatrix, b: Sequence[Scalar]) -> list[Scalar] | None:
    K = a.domain
    col = DomainMatrix.from_dod({i: {0: v} for i, v in enumerate(b) if v}, (a.shape[0], 1), K)
    return solve_columns(a, col)[0]


def rows_to_matrix(rows: Sequence[Mapping[int, Scalar]], width: int, domain: Domain) -> DomainMatrix:
    dod = {i: {j: v for j, v in row.items() if v} for i, row in enumerate(rows)}
    return DomainMatrix.from_dod({i: r for i, r in dod.items() if r}, (len(rows), width), domain)


def vectors_matrix(vectors: Sequence[Mapping[Label, Scalar]], labels: Sequence[Label], fld: Field) -> DomainMatrix:
    """Matrix whose rows are the given vectors in the coordinates ``labels``."""
    pos = {lab: i for i, lab in enumerate(labels)}
    rows = [{pos[lab]: v for lab, v in vec.items() if v} for vec in vectors]
    return rows_to_matrix(rows, len(labels), fld.domain)


def row_vectors(matrix: DomainMatrix, labels: Sequence[Label]) -> list[Vector]:
    dod = matrix.to_dod()
    return [
        {labels[j]: v for j, v in dod.get(i, {}).items() if v}
        for i in range(matrix.shape[0])
    ]


def independent_subset(vectors: Sequence[Mapping[Label, Scalar]], labels: Sequence[Label], fld: Field,
                       *, after: Sequence[Mapping[Label, Scalar]] = ()) -> list[int]:
    """Indices of a maximal subset of ``vectors`` independent modulo span(``after``)."""
    stacked = list(after) + list(vectors)
    if not stacked:
        return []
    mat = vectors_matrix(stacked, labels, fld).transpose()
    _, pivots = rref(mat)
    offset = len(after)
    return [p - offset for p in pivots if p >= offset]


# ---------------------------------------------------------------------------
# subquotients


@dataclass(frozen=True, eq=False)
class Subquotients:
    """Kernel inclusion, image inclusion and cokernel projection of a GradedMap.

    ``kernel_lead`` maps each kernel basis label to the source coordinate in
    which that basis vector is 1 and all others are 0; likewise ``image_lead``.
    ``cokernel_lift`` maps each cokernel basis label to the target basis
    vector it is the class of.
    """

    source: GradedSpace
    target: GradedSpace
    kernel: GradedMap
    image: GradedMap
    cokernel: GradedMap
    kernel_lead: dict[Label, Label]
    image_lead: dict[Label, Label]
    cokernel_lift: dict[Label, Label]

    def project(self, vec: Mapping[Label, Scalar]) -> Vector:
        return self.cokernel.apply(vec)

    def lift(self, vec: Mapping[Label, Scalar]) -> Vector:
        return {self.cokernel_lift[q]: v for q, v in vec.items() if v}


def _checked_degrees(requested: Iterable[int] | None, available: Iterable[int], window: Window,
                     what: str) -> list[int]:
    if requested is None:
        return sorted(set(available))
    out = sorted(set(requested))
    for d in out:
        if not window.contains(d):
            raise OutOfWindow(what=what, degree=d, window=window)
    return out


def subquotients(f: GradedMap, degrees: Iterable[int] | None = None) -> Subquotients:
    """Exact kernel, image and cokernel of f, degree by degree.

    ``degrees`` are source degrees; when given, each must lie in f's window.
    """
    fld = f.field
    src, tgt = f.source, f.target
    src_degrees = _checked_degrees(degrees, src.support, f.window, "subquotients")
    tgt_degrees = (
        [d + f.degree for d in src_degrees] if degrees is not None else tgt.support
    )
    ker_pairs: list[tuple[Label, int]] = []
    ker_cols: dict[Label, Vector] = {}
    ker_lead: dict[Label, Label] = {}
    for d in src_degrees:
        block = f.block(d)
        idx = list(src.indices(d))
        basis, free = nullspace(block)
        for row, fcol in zip(row_vectors(basis, [src.labels[i] for i in idx]), free, strict=True):
            lab = ("ker", src.labels[idx[fcol]])
            ker_pairs.append((lab, d))
            ker_cols[lab] = row
            ker_lead[lab] = src.labels[idx[fcol]]
    kspace = GradedSpace.from_pairs(ker_pairs, f.window)
    kernel = GradedMap.from_columns(kspace, src, 0, ker_cols, fld, check_degrees=False)

    im_pairs: list[tuple[Label, int]] = []
    im_cols: dict[Label, Vector] = {}
    im_lead: dict[Label, Label] = {}
    q_pairs: list[tuple[Label, int]] = []
    q_cols: dict[Label, Vector] = {}
    q_lift: dict[Label, Label] = {}
    tgt_window = f.window.shifted(-f.degree).intersect(tgt.window)
    for e in sorted(set(tgt_degrees)):
        rows_idx = list(tgt.indices(e))
        if not rows_idx:
            continue
        tlabels = [tgt.labels[i] for i in rows_idx]
        d = e - f.degree
        block = f.block(d) if src.indices(d) else None
        pivots: tuple[int, ...] = ()
        reduced_rows: list[Vector] = []
        if block is not None and block.shape[1]:
            reduced, pivots = rref(block.transpose())
            reduced_rows = row_vectors(reduced, tlabels)[: len(pivots)]
        for r, p in enumerate(pivots):
            lab = ("im", tlabels[p])
            im_pairs.append((lab, e))
            im_cols[lab] = reduced_rows[r]
            im_lead[lab] = tlabels[p]
        pivot_set = set(pivots)
        for j, t in enumerate(tlabels):
            if j not in pivot_set:
                qlab = ("coker", t)
                q_pairs.append((qlab, e))
                q_lift[qlab] = t
                q_cols[t] = {qlab: fld.one}
        for r, p in enumerate(pivots):
            q_cols[tlabels[p]] = {
                ("coker", t): -v for t, v in reduced_rows[r].items() if t != tlabels[p]
            }
    ispace = GradedSpace.from_pairs(im_pairs, tgt_window)
    image = GradedMap.from_columns(ispace, tgt, 0, im_cols, fld, check_degrees=False)
    qspace = GradedSpace.from_pairs(q_pairs, tgt_window)
    # target degrees not visited project to zero
    cokernel = GradedMap.from_columns(tgt, qspace, 0, q_cols, fld, check_degrees=False)
    return Subquotients(src, tgt, kernel, image, cokernel, ker_lead, im_lead, q_lift)


def quotient_by(space: GradedSpace, relations: Sequence[Mapping[Label, Scalar]], fld: Field,
                *, window: Window | None = None) -> Subquotients:
    """Cokernel of the map spanned by ``relations`` (homogeneous vectors of ``space``)."""
    rel_pairs = []
    cols: dict[Label, Vector] = {}
    for i, rel in enumerate(relations):
        clean = {lab: v for lab, v in rel.items() if v}
        if not clean:
            continue
        deg = space.degree_of[next(iter(clean))]
        rel_pairs.append((("rel", i), deg))
        cols[("rel", i)] = clean
    rspace = GradedSpace.from_pairs(rel_pairs, window if window is not None else space.window)
    rmap = GradedMap.from_columns(rspace, space, 0, cols, fld, window=window)
    return subquotients(rmap)


def invert(f: GradedMap) -> GradedMap | None:
    """Inverse of a degree 0 isomorphism, or None when f is not invertible."""
    if f.degree != 0 or f.source.dim != f.target.dim:
        return None
    if f.source.dim == 0:
        return GradedMap.zero(f.target, f.source, 0, f.field)
    if rank(f.matrix) != f.source.dim:
        return None
    inv = f.matrix.to_dense().inv().to_sparse()
    return GradedMap(f.target, f.source, 0, inv, f.field)
