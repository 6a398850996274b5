"""Closed structure-preserving maps between comodules or contramodules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from cdgkit.cdg.hom import DGObject
from cdgkit.core.errors import NotClosed
from cdgkit.linalg.elimination import invert
from cdgkit.linalg.graded import GradedMap, Label
from cdgkit.models.schemas import AxiomReport


@dataclass(frozen=True, eq=False)
class StructMap:
    """A graded map f with f∘P = (-1)^{|f||P|} P∘f for every structure operator P."""

    source: DGObject
    target: DGObject
    map: GradedMap
    name: str = "f"

    @property
    def degree(self) -> int:
        return self.map.degree

    @classmethod
    def identity(cls, obj: DGObject) -> StructMap:
        return cls(obj, obj, GradedMap.identity(obj.carrier, obj.field), f"id_{obj.name}")

    @classmethod
    def zero(cls, source: DGObject, target: DGObject, degree: int = 0) -> StructMap:
        return cls(source, target, GradedMap.zero(source.carrier, target.carrier, degree, source.field), "0")

    def compatibility_witness(self) -> tuple[Label, Label] | None:
        src, tgt = self.source.structure_maps(), self.target.structure_maps()
        for key, p in src.items():
            left = self.map.compose(p)
            right = tgt[key].compose(self.map)
            if (self.degree * p.degree) % 2:
                right = -right
            diff = left - right
            if not diff.is_zero:
                return (key, diff.nonzero_witness())
        return None

    def differential(self) -> GradedMap:
        first = self.target.d.compose(self.map)
        second = self.map.compose(self.source.d)
        return first - second if self.degree % 2 == 0 else first + second

    @property
    def is_closed(self) -> bool:
        return self.differential().is_zero

    def require_closed(self) -> None:
        dm = self.differential()
        if not dm.is_zero:
            raise NotClosed(name=self.name, witness=dm.nonzero_witness())

    def inverse(self) -> StructMap | None:
        inv = invert(self.map)
        return None if inv is None else StructMap(self.target, self.source, inv, f"{self.name}^-1")

    def check(self, *, invertible: bool = False) -> AxiomReport:
        report = AxiomReport(subject=self.name, kind="map")
        report.add("compatible", self.compatibility_witness())
        report.add("closed", self.differential().nonzero_witness())
        if invertible:
            report.add("invertible", None if self.inverse() is not None else self.name)
        return report

    def compose(self, other: StructMap) -> StructMap:
        """self ∘ other."""
        return StructMap(other.source, self.target, self.map.compose(other.map), f"{self.name}∘{other.name}")

    def __matmul__(self, other: StructMap) -> StructMap:
        return self.compose(other)

    def __add__(self, other: StructMap) -> StructMap:
        return StructMap(self.source, self.target, self.map + other.map, f"{self.name}+{other.name}")

    def __sub__(self, other: StructMap) -> StructMap:
        return StructMap(self.source, self.target, self.map - other.map, f"{self.name}-{other.name}")

    def scaled(self, c: Any) -> StructMap:
        return StructMap(self.source, self.target, self.map.scaled(c), self.name)

    def equals(self, other: StructMap) -> bool:
        return self.map.equals(other.map)

    def renamed(self, name: str) -> StructMap:
        return StructMap(self.source, self.target, self.map, name)

    def __repr__(self) -> str:
        return f"StructMap({self.name}: {self.source.name} -> {self.target.name}, degree={self.degree})"
