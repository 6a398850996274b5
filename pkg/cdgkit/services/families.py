"""Test families for the weak-equivalence oracles.

A projective family is a list of twisted modules, an injective family a list
of finite-dimensional bar contramodules W (the oracle uses Hom^τ(A, W)).
Both are finite samples of infinite classes, so every verdict is relative
to the family and to the enumeration bounds recorded here.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal

from cdgkit.bar.bar import BarLetters
from cdgkit.bar.contra import BarContramodule
from cdgkit.cdg.algebra import CDGAlgebra
from cdgkit.cdg.constructions import twisted_module
from cdgkit.cdg.module import CDGModule
from cdgkit.core.config import Settings, get_settings
from cdgkit.core.errors import InvalidConnection, VerificationFailed
from cdgkit.core.logging import get_logger
from cdgkit.linalg.field import Field, Scalar
from cdgkit.linalg.graded import Label

log = get_logger(__name__)

FamilyKind = Literal["projective", "injective"]
Member = CDGModule | BarContramodule


@dataclass(frozen=True, eq=False)
class TestFamily:
    __test__ = False

    kind: FamilyKind
    name: str
    members: tuple[Member, ...]
    provenance: Literal["enumerated", "declared"] = "declared"
    bounds: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for member in self.members:
            if self.kind == "projective" and not isinstance(member, CDGModule):
                raise TypeError(f"{member!r} is not a module")
            if self.kind == "injective" and not isinstance(member, BarContramodule):
                raise TypeError(f"{member!r} is not a bar contramodule")
            report = member.check()
            if not report.passed:
                raise VerificationFailed(check=f"{member.name} belongs to family {self.name}",
                                         witness=report.failures()[0].name)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Member]:
        return iter(self.members)

    def describe(self) -> str:
        bounds = ", ".join(f"{k}={v}" for k, v in sorted(self.bounds.items()))
        return f"{self.name} ({self.kind}, {self.provenance}, {len(self)} members{'; ' + bounds if bounds else ''})"


def projective_family(members: Sequence[CDGModule], *, name: str = "F") -> TestFamily:
    return TestFamily("projective", name, tuple(members))


def injective_family(members: Sequence[BarContramodule], *, name: str = "G") -> TestFamily:
    return TestFamily("injective", name, tuple(members))


# ---------------------------------------------------------------------------
# enumeration


@dataclass
class _Bounds:
    max_size: int
    lo: int
    hi: int
    coefficients: list[Scalar]
    cap: int
    seen: int = 0
    truncated: bool = False

    def tick(self) -> bool:
        self.seen += 1
        if self.seen > self.cap:
            self.truncated = True
            return False
        return True

    def record(self) -> dict[str, Any]:
        return {
            "max_size": self.max_size,
            "degrees": f"[{self.lo}, {self.hi}]",
            "coefficients": len(self.coefficients),
            "candidates": min(self.seen, self.cap),
            "truncated": self.truncated,
        }


def _coefficients(fld: Field, given: Sequence[Any] | None) -> list[Scalar]:
    if fld.is_finite:
        return fld.elements()
    values = [fld.zero] + [fld.convert(c) for c in (given if given is not None else (1, -1))]
    out: list[Scalar] = []
    for v in values:
        if v not in out:
            out.append(v)
    return out


def _bounds(fld: Field, settings: Settings, max_size: int | None, lo: int | None, hi: int | None,
            coefficients: Sequence[Any] | None) -> _Bounds:
    return _Bounds(
        max_size=settings.family_max_rank if max_size is None else max_size,
        lo=settings.family_min_degree if lo is None else lo,
        hi=settings.family_max_degree if hi is None else hi,
        coefficients=_coefficients(fld, coefficients),
        cap=settings.family_max_candidates,
    )


def _canonical(degrees: tuple[int, ...], slots: list[tuple[int, int, Label]],
               values: tuple[Scalar, ...], fld: Field) -> tuple[str, ...]:
    """Smallest encoding of the data over all degree-preserving generator permutations."""
    index = {(i, j, a): k for k, (i, j, a) in enumerate(slots)}
    best: tuple[str, ...] | None = None
    for perm in itertools.permutations(range(len(degrees))):
        if any(degrees[p] != degrees[i] for i, p in enumerate(perm)):
            continue
        enc = tuple(fld.to_text(values[index[(perm[i], perm[j], a)]]) for i, j, a in slots)
        if best is None or enc < best:
            best = enc
    assert best is not None
    return best


def _warn_cap(what: str, b: _Bounds) -> None:
    log.warning("family enumeration hit the candidate cap", extra={"family": what, "cap": b.cap})


def enumerate_twisted(
    algebra: CDGAlgebra,
    *,
    max_rank: int | None = None,
    min_degree: int | None = None,
    max_degree: int | None = None,
    coefficients: Sequence[Any] | None = None,
    settings: Settings | None = None,
    name: str | None = None,
) -> TestFamily:
    """Every twisted module of rank ≤ max_rank with generator degrees in the bounds.

    Connection entries are combinations of the basis of A with coefficients
    from the given set (all of F_p over a finite field); candidates failing
    (d + α)² = h are dropped, and duplicates up to reordering generators of
    equal degree are removed.
    """
    settings = settings or get_settings()
    fld = algebra.field
    b = _bounds(fld, settings, max_rank, min_degree, max_degree, coefficients)
    members: list[CDGModule] = []
    seen: set[tuple[Any, ...]] = set()
    for rank in range(1, b.max_size + 1):
        for degrees in itertools.combinations_with_replacement(range(b.lo, b.hi + 1), rank):
            gens = [(f"v{i}", d) for i, d in enumerate(degrees)]
            slots = [
                (i, j, a)
                for i, di in enumerate(degrees)
                for j, dj in enumerate(degrees)
                for a in algebra.carrier.component(di + 1 - dj)
            ]
            for values in itertools.product(b.coefficients, repeat=len(slots)):
                if not b.tick():
                    _warn_cap(algebra.name, b)
                    return _finish_projective(algebra, members, b, name)
                conn: dict[Label, dict[Label, dict[Label, Scalar]]] = {}
                for (i, j, a), v in zip(slots, values, strict=True):
                    if v:
                        conn.setdefault(f"v{i}", {}).setdefault(f"v{j}", {})[a] = v
                try:
                    module = twisted_module(algebra, gens, conn, name=f"T{len(members)}{list(degrees)}")
                except InvalidConnection:
                    continue
                key = (degrees, _canonical(degrees, slots, values, fld))
                if key in seen:
                    continue
                seen.add(key)
                members.append(module)
    return _finish_projective(algebra, members, b, name)


def _finish_projective(algebra: CDGAlgebra, members: list[CDGModule], b: _Bounds,
                       name: str | None) -> TestFamily:
    family = TestFamily("projective", name or f"Tw({algebra.name})", tuple(members), "enumerated", b.record())
    log.info("enumerated twisted modules", extra={"algebra": algebra.name, "members": len(members),
                                                  "candidates": b.seen})
    return family


def enumerate_bar_contramodules(
    letters: BarLetters,
    *,
    max_dim: int | None = None,
    min_degree: int | None = None,
    max_degree: int | None = None,
    coefficients: Sequence[Any] | None = None,
    settings: Settings | None = None,
    name: str | None = None,
) -> TestFamily:
    """Every bar contramodule W with dim W ≤ max_dim and degrees in the bounds.

    The unknowns are the entries of d_W and of the letter operators t_a
    (degree 1 - |a|) between basis vectors of matching degrees.
    """
    settings = settings or get_settings()
    fld = letters.field
    b = _bounds(fld, settings, max_dim, min_degree, max_degree, coefficients)
    members: list[BarContramodule] = []
    seen: set[tuple[Any, ...]] = set()
    span = b.hi - b.lo
    active = [a for a in letters.letters if -span <= letters.letter_degree(a) <= span]
    for dim in range(1, b.max_size + 1):
        for degrees in itertools.combinations_with_replacement(range(b.lo, b.hi + 1), dim):
            basis = [(f"w{i}", d) for i, d in enumerate(degrees)]
            slots: list[tuple[int, int, Label]] = [
                (i, j, ("d",)) for i, di in enumerate(degrees) for j, dj in enumerate(degrees) if dj == di + 1
            ]
            for a in active:
                shift = -letters.letter_degree(a)
                slots += [
                    (i, j, ("t", a)) for i, di in enumerate(degrees) for j, dj in enumerate(degrees)
                    if dj == di + shift
                ]
            for values in itertools.product(b.coefficients, repeat=len(slots)):
                if not b.tick():
                    _warn_cap(letters.algebra.name, b)
                    return _finish_injective(letters, members, b, name)
                ops: dict[Label, dict[Label, dict[Label, Scalar]]] = {}
                diff: dict[Label, dict[Label, Scalar]] = {}
                for (i, j, tag), v in zip(slots, values, strict=True):
                    if not v:
                        continue
                    if tag[0] == "d":
                        diff.setdefault(f"w{i}", {})[f"w{j}"] = v
                    else:
                        ops.setdefault(tag[1], {}).setdefault(f"w{i}", {})[f"w{j}"] = v
                w = BarContramodule.build(letters, basis, ops, diff, name=f"W{len(members)}{list(degrees)}")
                if not w.is_valid:
                    continue
                key = (degrees, _canonical(degrees, slots, values, fld))
                if key in seen:
                    continue
                seen.add(key)
                members.append(w)
    return _finish_injective(letters, members, b, name)


def _finish_injective(letters: BarLetters, members: list[BarContramodule], b: _Bounds,
                      name: str | None) -> TestFamily:
    family = TestFamily("injective", name or f"W({letters.algebra.name})", tuple(members), "enumerated",
                        b.record())
    log.info("enumerated bar contramodules", extra={"algebra": letters.algebra.name, "members": len(members),
                                                    "candidates": b.seen})
    return family
