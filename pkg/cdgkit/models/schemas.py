from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field

# ---------------------------------------------------------------------------
# axiom reports

ReportKind = Literal[
    "algebra",
    "module",
    "map",
    "coalgebra",
    "comodule",
    "contramodule",
    "bar-contramodule",
    "hom-complex",
    "adjunction",
    "isomorphism",
    "certificate",
]


class AxiomResult(BaseModel):
    name: str
    passed: bool
    witness: str | None = None
    window: str = "[-inf, +inf]"
    note: str | None = None


class AxiomReport(BaseModel):
    subject: str
    kind: ReportKind
    results: list[AxiomResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[AxiomResult]:
        return [r for r in self.results if not r.passed]

    def result(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def add(self, name: str, witness: Any = None, *, window: str | None = None, note: str | None = None) -> None:
        self.results.append(
            AxiomResult(
                name=name,
                passed=witness is None,
                witness=None if witness is None else repr(witness),
                window=window or "[-inf, +inf]",
                note=note,
            )
        )


# ---------------------------------------------------------------------------
# oracle reports


class DegreeRecord(BaseModel):
    degree: int
    dim_before: int
    dim_after: int
    rank: int

    @property
    def iso(self) -> bool:
        return self.dim_before == self.dim_after == self.rank


class MemberVerdict(BaseModel):
    index: int
    member: str
    window: str
    degrees: list[DegreeRecord] = Field(default_factory=list)
    verdict: bool
    note: str | None = None

    @property
    def witness_degrees(self) -> list[int]:
        return [r.degree for r in self.degrees if not r.iso]


class WEReport(BaseModel):
    model: Literal["projective", "injective"]
    subject: str
    family: str
    provenance: Literal["enumerated", "declared"] = "declared"
    members: list[MemberVerdict] = Field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(m.verdict for m in self.members)

    def witnesses(self) -> list[MemberVerdict]:
        return [m for m in self.members if not m.verdict]


class AgreementReport(BaseModel):
    subject: str
    projective: WEReport
    injective: WEReport
    family_insufficient: bool = False
    note: str | None = None

    @property
    def agree(self) -> bool:
        return self.projective.verdict == self.injective.verdict


class CohomologyReport(BaseModel):
    subject: str
    window: str
    dims: dict[int, int] = Field(default_factory=dict)
    note: str | None = None


class CheckRecord(BaseModel):
    """One line of a certificate or suite report."""

    name: str
    passed: bool
    window: str = "[-inf, +inf]"
    detail: str = ""
    seconds: float | None = None


class SuiteReport(BaseModel):
    title: str
    seed: int
    records: list[CheckRecord] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)


# ---------------------------------------------------------------------------
# manifests

Scalar = int | str
LabelSpec = Any  # str, int or nested lists


class BasisEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: LabelSpec
    degree: int


class WindowSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lo: int | None = None
    hi: int | None = None


class TermSpec(BaseModel):
    """coefficient * basis label"""

    model_config = ConfigDict(extra="forbid")

    label: LabelSpec
    coeff: Scalar = 1


class ProductSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    left: LabelSpec
    right: LabelSpec
    value: list[TermSpec] = Field(default_factory=list)


class ImageSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    source: LabelSpec
    value: list[TermSpec] = Field(default_factory=list)


class BlockSpec(BaseModel):
    """Dense block of a degree-d component, rows follow the target basis."""

    model_config = ConfigDict(extra="forbid")

    degree: int
    rows: list[list[Scalar]]


class AlgebraSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["algebra"] = "algebra"
    preset: Literal["polynomial", "exterior", "truncated-polynomial", "ground"] | None = None
    generator_degree: int | None = None
    differential_coeff: Scalar | None = None
    nilpotency: int | None = None
    basis: list[BasisEntry] = Field(default_factory=list)
    unit: LabelSpec = "1"
    products: list[ProductSpec] = Field(default_factory=list)
    differential: list[ImageSpec] = Field(default_factory=list)
    differential_blocks: list[BlockSpec] = Field(default_factory=list)
    curvature: list[TermSpec] = Field(default_factory=list)
    window: WindowSpec | None = None


class TensorTermSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    left: LabelSpec
    right: LabelSpec
    coeff: Scalar = 1


class CoproductSpec(BaseModel):
    """Δ(source) = Σ coeff * left ⊗ right"""

    model_config = ConfigDict(extra="forbid")

    source: LabelSpec
    value: list[TensorTermSpec] = Field(default_factory=list)


class CoalgebraSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    basis: list[BasisEntry] = Field(default_factory=list)
    comultiplication: list[CoproductSpec] = Field(default_factory=list)
    counit: list[TermSpec] = Field(default_factory=list)
    differential: list[ImageSpec] = Field(default_factory=list)
    curvature: list[TermSpec] = Field(default_factory=list)
    dual_of: str | None = None


class ConnectionEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    source: LabelSpec
    target: LabelSpec
    value: list[TermSpec] = Field(default_factory=list)


class ModuleSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["twisted", "trivial", "regular"] = "twisted"
    algebra: str
    generators: list[BasisEntry] = Field(default_factory=list)
    connection: list[ConnectionEntry] = Field(default_factory=list)
    degree: int = 0


class MapSpec(BaseModel):
    """A module map given on generators (twisted source) or on every basis element."""

    model_config = ConfigDict(extra="forbid")

    source: str
    target: str
    degree: int = 0
    kind: Literal["augmentation", "identity", "explicit"] = "explicit"
    images: list[ImageSpec] = Field(default_factory=list)


class FamilySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["projective", "injective"]
    algebra: str
    members: list[str] = Field(default_factory=list)
    enumerate: bool = False
    max_rank: int | None = None
    min_degree: int | None = None
    max_degree: int | None = None
    coefficients: list[Scalar] | None = None


class LetterActionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    letter: LabelSpec
    rows: list[list[Scalar]]


class BarContramoduleSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    algebra: str
    basis: list[BasisEntry]
    letters: list[LetterActionSpec] = Field(default_factory=list)
    differential: list[list[Scalar]] | None = None


class TaskSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    command: Literal[
        "check", "cohomology", "bar", "twist", "we", "pushout-product", "triality", "verify-paper"
    ]
    target: str | None = None
    family: str | None = None
    injective_family: str | None = None
    model: Literal["proj", "inj", "both"] = "both"
    truncate: int | None = None
    degrees: list[int] | None = None
    samples: int | None = None
    expect: bool | None = None
    after: list[str] = Field(default_factory=list)


class Manifest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    field: str | None = None
    seed: int | None = None
    window: int | None = None
    algebras: dict[str, AlgebraSpec] = Field(default_factory=dict)
    coalgebras: dict[str, CoalgebraSpec] = Field(default_factory=dict)
    modules: dict[str, ModuleSpec] = Field(default_factory=dict)
    maps: dict[str, MapSpec] = Field(default_factory=dict)
    contramodules: dict[str, BarContramoduleSpec] = Field(default_factory=dict)
    families: dict[str, FamilySpec] = Field(default_factory=dict)
    tasks: list[TaskSpec] = Field(default_factory=list)


class TaskEvent(BaseModel):
    task: str
    command: str
    status: Literal["started", "passed", "failed", "error"]
    exit_code: int = 0
    detail: str = ""
    start_ts: float
    end_ts: float | None = None


class RunRecord(BaseModel):
    run_id: str
    manifest: str
    seed: int
    order: list[str] = Field(default_factory=list)
    events: list[TaskEvent] = Field(default_factory=list)
    exit_code: int = 0
