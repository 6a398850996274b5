from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from cdgkit.core.errors import NotClosed, OutOfWindow, VerificationFailed
from cdgkit.linalg.elimination import (
    independent_subset,
    nullspace,
    row_vectors,
    solve_columns,
    vectors_matrix,
)
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import GradedMap, GradedSpace, Label, Vector, Window, vec_clean


@dataclass(frozen=True, eq=False)
class CohomologyGroup:
    """H^n of a complex together with cocycle representatives of a basis."""

    degree: int
    labels: tuple[Label, ...]
    representatives: list[Vector]
    boundaries: list[Vector]
    field: Field

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def class_of(self, cocycle: Mapping[Label, Scalar]) -> list[Scalar]:
        """Coordinates of [cocycle] in the basis of representatives."""
        vec = vec_clean(cocycle)
        if not vec:
            return [self.field.zero] * self.dim
        gens = self.boundaries + self.representatives
        a = vectors_matrix(gens, self.labels, self.field).transpose()
        b = vectors_matrix([vec], self.labels, self.field).transpose()
        (x,) = solve_columns(a, b)
        if x is None:
            raise VerificationFailed(check=f"class_of in degree {self.degree}: not a cocycle", witness=vec)
        return x[len(self.boundaries):]

    def is_coboundary(self, cocycle: Mapping[Label, Scalar]) -> bool:
        return not any(self.class_of(cocycle))


@dataclass(frozen=True, eq=False)
class Cohomology:
    space: GradedSpace
    differential: GradedMap
    window: Window
    groups: dict[int, CohomologyGroup] = field(default_factory=dict)

    def dims(self) -> dict[int, int]:
        return {n: g.dim for n, g in self.groups.items() if g.dim}

    def group(self, degree: int) -> CohomologyGroup:
        if not self.window.contains(degree):
            raise OutOfWindow(what="cohomology", degree=degree, window=self.window)
        if degree not in self.groups:
            labels = self.space.component(degree)
            return CohomologyGroup(degree, labels, [], [], self.differential.field)
        return self.groups[degree]

    @property
    def total_dim(self) -> int:
        return sum(g.dim for g in self.groups.values())

    @property
    def is_acyclic(self) -> bool:
        return self.total_dim == 0


def check_square_zero(d: GradedMap, name: str = "d") -> None:
    sq = d.compose(d)
    if not sq.is_zero:
        raise NotClosed(name=f"{name}^2", witness=sq.nonzero_witness())


def cohomology(d: GradedMap, degrees: Iterable[int] | None = None, *, check: bool = True) -> Cohomology:
    """Cohomology of (X, d) in the requested degrees.

    Only degrees where X^{n-1}, X^n and X^{n+1} are all exact are answered;
    anything else raises OutOfWindow.
    """
    space = d.source
    if not d.target.same_basis(space) or d.degree != 1:
        raise ValueError("a differential is a degree 1 endomorphism")
    if check:
        check_square_zero(d)
    window = space.window.inner(1)
    if degrees is None:
        wanted = window.clip(space.support)
    else:
        wanted = sorted(set(degrees))
        for n in wanted:
            if not window.contains(n):
                raise OutOfWindow(what="cohomology", degree=n, window=window)
    groups: dict[int, CohomologyGroup] = {}
    for n in wanted:
        labels = space.component(n)
        if not labels:
            continue
        basis, _ = nullspace(d.block(n))
        cycles = row_vectors(basis, labels)
        prev = space.component(n - 1)
        boundaries: list[Vector] = []
        if prev and cycles:
            images = [vec_clean(d.column(lab)) for lab in prev]
            keep = independent_subset(images, labels, d.field)
            boundaries = [images[i] for i in keep]
        keep = independent_subset(cycles, labels, d.field, after=boundaries)
        groups[n] = CohomologyGroup(n, labels, [cycles[i] for i in keep], boundaries, d.field)
    return Cohomology(space, d, window, groups)


def induced_rank(f: GradedMap, hx: Cohomology, hy: Cohomology, degree: int) -> int:
    """Rank of H^degree(X) -> H^{degree+|f|}(Y) induced by a chain map f."""
    gx = hx.group(degree)
    gy = hy.group(degree + f.degree)
    if not gx.dim or not gy.dim:
        return 0
    images = [vec_clean(f.apply(rep)) for rep in gx.representatives]
    return len(independent_subset(images, gy.labels, f.field, after=gy.boundaries))


def is_quasi_isomorphism(f: GradedMap, hx: Cohomology, hy: Cohomology,
                         degrees: Iterable[int]) -> bool:
    for n in degrees:
        dx = hx.group(n).dim
        dy = hy.group(n + f.degree).dim
        if dx != dy or induced_rank(f, hx, hy, n) != dx:
            return False
    return True
