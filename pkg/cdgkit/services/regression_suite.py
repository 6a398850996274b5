"""The regression suite behind ``verify-paper``.

Each entry is a named check with a window and a detail string. Entries form a
networkx DAG: an entry whose prerequisite failed is reported as failed
without being run. Randomized entries draw from ``random.Random`` seeded by
(seed, entry name), so a single entry can be rerun in isolation.
"""

from __future__ import annotations

import random
import time
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import networkx as nx

from cdgkit.bar.bar import BarLetters, TruncatedBar, bar
from cdgkit.bar.auxeq import verify_comparison
from cdgkit.bar.contra import BarContramodule
from cdgkit.bar.twisted import twisted_comodule, twisted_contramodule, twisted_hom_module, twisted_module
from cdgkit.cdg.algebra import CDGAlgebra
from cdgkit.cdg.bimodule import Bimodules
from cdgkit.cdg.constructions import cone, cylinder, regular_module
from cdgkit.cdg.examples import augmentation, exterior, ground, kx_twisted, polynomial, truncated_polynomial
from cdgkit.cdg.generators import (
    mutate,
    random_algebra,
    random_closed_map,
    random_module,
    random_scalar,
    square_zero_pair,
)
from cdgkit.cdg.hom import hom_complex
from cdgkit.cdg.module import ModMap
from cdgkit.coalg.coalgebra import dual_coalgebra
from cdgkit.coalg.comodule import cofree_comodule
from cdgkit.coalg.contramodule import free_contramodule
from cdgkit.coalg.functors import verify_phi_psi
from cdgkit.core.config import Settings, get_settings
from cdgkit.core.errors import CDGKitError
from cdgkit.core.logging import get_logger
from cdgkit.linalg.complexes import cohomology, is_quasi_isomorphism
from cdgkit.linalg.field import Field
from cdgkit.linalg.graded import GradedSpace
from cdgkit.models.schemas import AxiomReport, CheckRecord, SuiteReport
from cdgkit.services import notcofib, pushout
from cdgkit.services.adjunction import tensor_hom_adjunction
from cdgkit.services.certificates import (
    contra_consistency,
    cylinder_certificate,
    homotopy_equivalence,
    splitting_certificate,
)
from cdgkit.services.families import enumerate_bar_contramodules, enumerate_twisted, projective_family
from cdgkit.services.oracles import cogenerator, we_agreement, we_projective

log = get_logger(__name__)

QQ = Field.rationals()


class Outcome(NamedTuple):
    passed: bool
    window: str
    detail: str


@dataclass(frozen=True)
class SuiteContext:
    seed: int
    settings: Settings
    scale: float = 1.0

    def rng(self, entry: str) -> random.Random:
        return random.Random(f"{self.seed}:{entry}")

    def count(self, n: int) -> int:
        return max(1, round(n * self.scale))


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    run: Callable[[SuiteContext], Outcome]
    after: tuple[str, ...] = field(default=())


def _first_failure(reports: Iterable[AxiomReport]) -> str:
    for r in reports:
        if not r.passed:
            f = r.failures()[0]
            return f"{r.subject}: {f.name} (witness {f.witness})"
    return ""


def _outcome(reports: Sequence[AxiomReport], window: str, detail: str) -> Outcome:
    failure = _first_failure(reports)
    return Outcome(not failure, window, failure or detail)


# ---------------------------------------------------------------------------
# axiom battery


def axiom_battery(ctx: SuiteContext) -> Outcome:
    rng = ctx.rng("axiom battery")
    n = ctx.count(200)
    valid = failed = pairs = 0
    for i in range(n):
        alg = random_algebra(QQ, rng)
        if i % 2:
            alg = mutate(alg, rng)
        passed = alg.check().passed
        if passed != alg.check_operators():
            return Outcome(False, "[-inf, +inf]", f"algebra {i} ({alg.name}): check disagrees with operator oracle")
        if not passed:
            if i % 2 == 0:
                return Outcome(False, "[-inf, +inf]", f"template algebra {alg.name} fails its axioms")
            failed += 1
            continue
        valid += 1
        m = random_module(alg, rng, name="M")
        k = random_module(alg, rng, name="N")
        for mod in (m, k):
            if not mod.check().passed:
                return Outcome(False, "[-inf, +inf]", f"module {mod.name} over {alg.name} fails its axioms")
        hom = hom_complex(m, k)
        if not hom.differential.compose(hom.differential).is_zero:
            return Outcome(False, str(hom.window), f"D² ≠ 0 on Hom over {alg.name}")
        pairs += 1
    return Outcome(True, "[-inf, +inf]", f"{valid} valid, {failed} mutants rejected, {pairs} Hom complexes")


# ---------------------------------------------------------------------------
# k[x]


def kx_example(ctx: SuiteContext) -> Outcome:
    hi = ctx.settings.default_window
    a = polynomial(QQ, hi, degree=1, d_coeff=-1)
    h = cohomology(a.d)
    want = {0: 1}
    got = {n: d for n, d in h.dims().items() if d}
    if got != want:
        return Outcome(False, str(h.window), f"H(A) = {got}")
    areg = regular_module(a, name="A")
    ax = kx_twisted(a)
    hom = hom_complex(areg, ax, [-1, 0, 1])
    closed = hom.closed_maps(0)
    if any(hom.null_homotopy(z) is None for z in closed):
        return Outcome(False, str(hom.window), "a closed map A -> A^x is not null-homotopic")
    eps = augmentation(a, areg)
    k = eps.target
    ha, hk = cohomology(areg.d), cohomology(k.d)
    if not is_quasi_isomorphism(eps.map, ha, hk, ha.window.clip(range(0, hi))):
        return Outcome(False, str(ha.window), "augmentation is not a quasi-isomorphism")
    report = we_projective(eps, projective_family([areg, ax], name="{A, A^x}"))
    witnesses = [m.member for m in report.witnesses()]
    if report.verdict or witnesses != ["A^x"]:
        return Outcome(False, str(h.window), f"projective verdict {report.verdict}, witnesses {witnesses}")
    return Outcome(True, f"[0, {hi}]",
                   f"H(A)=k in degree 0; {len(closed)} closed maps A->A^x null-homotopic; A^x detects ε")


# ---------------------------------------------------------------------------
# not cofibrant


def notcofib_example(ctx: SuiteContext) -> Outcome:
    fld = Field.prime(5)
    ex = notcofib.build(fld, depth=8, top=8)
    reports = [notcofib.check(ex)]
    failure = _first_failure(reports)
    if failure:
        return Outcome(False, "telescope depth 8", failure)
    if not notcofib.stable_verdict(ex).verdict:
        return Outcome(False, "telescope depth 8", "φ is rejected by {B_μ}")
    for lam in ex.lambdas:
        part = notcofib.restricted(ex, lam)
        if not notcofib.stable_verdict(part, part.family([lam])).verdict:
            return Outcome(False, "telescope depth 8", f"φ_{fld.to_text(lam)} rejected by B_{fld.to_text(lam)}")
    return Outcome(True, "telescope depth 8", "Hom^0(X, T) = 0, so ρ = 0; φ and each φ_λ pass")


def notcofib_deviation(ctx: SuiteContext) -> Outcome:
    """A single summand is not a weak equivalence against a different B_μ."""
    fld = Field.prime(5)
    part = notcofib.build(fld, depth=4, top=4, lambdas=[1])
    report = notcofib.stable_verdict(part, part.family([fld.convert(2)]))
    return Outcome(not report.verdict, "telescope depth 4",
                   "φ_1 rejected by B_2 as expected" if not report.verdict else "φ_1 accepted by B_2")


# ---------------------------------------------------------------------------
# bar constructions and twisted functors


def _bar_algebras(rng: random.Random) -> list[CDGAlgebra]:
    return [
        truncated_polynomial(QQ, 2, 2, var="e"),
        truncated_polynomial(QQ, 2, 3, var="x"),
        square_zero_pair(QQ, random_scalar(QQ, rng), random_scalar(QQ, rng)),
    ]


def bar_twist(ctx: SuiteContext) -> Outcome:
    rng = ctx.rng("bar and twist")
    reports: list[AxiomReport] = []
    for a in _bar_algebras(rng):
        b = bar(a, ctx.settings.bar_truncation)
        reports += [b.coalgebra.check(), b.check_tau()]
        m = random_module(a, rng, name="M")
        t = twisted_comodule(b, m)
        h = twisted_contramodule(b, m)
        reports += [t.check(), h.check(), twisted_module(b, t).check(), twisted_hom_module(b.letters, h).check()]
    return _outcome(reports, f"N = {ctx.settings.bar_truncation}", f"{len(reports)} reports")


def comparison(ctx: SuiteContext) -> Outcome:
    rng = ctx.rng("comparison isomorphisms")
    reports: list[AxiomReport] = []
    for a in _bar_algebras(rng):
        m = random_module(a, rng, name="M")
        n = random_module(a, rng, name="N")
        u = random_closed_map(m, n, rng, name="u")
        for length in (2, 3):
            reports.append(verify_comparison(bar(a, length), [m, n], [u]))
    return _outcome(reports, "N ∈ {2, 3}", "both isomorphisms natural; curved case in window mode")


def phi_psi(ctx: SuiteContext) -> Outcome:
    rng = ctx.rng("phi psi")
    reports: list[AxiomReport] = []
    v = GradedSpace.from_pairs([("v", 0)])
    while len(reports) < ctx.count(20):
        a = random_algebra(QQ, rng, curved=False)
        if a.dim > 4:
            continue
        c = dual_coalgebra(a)
        reports.append(verify_phi_psi([free_contramodule(c, v)], [cofree_comodule(c, v)], subject=c.name))
    return _outcome(reports, "[-inf, +inf]", f"{len(reports)} coalgebras")


# ---------------------------------------------------------------------------
# model structure checks


def cylinders(ctx: SuiteContext) -> Outcome:
    rng = ctx.rng("cylinder")
    reports = []
    for i in range(ctx.count(10)):
        a = random_algebra(QQ, rng, curved=i % 2 == 1)
        reports.append(cylinder_certificate(random_module(a, rng, name=f"X{i}")))
    return _outcome(reports, "[-inf, +inf]", f"{len(reports)} modules, half curved")


def _pushout_sides() -> tuple[Bimodules, Bimodules]:
    k, lam = ground(QQ), exterior(QQ, 1)
    return Bimodules.over(k, lam), Bimodules.over(lam, k)


def pushout_products(ctx: SuiteContext) -> Outcome:
    first, second = _pushout_sides()
    reports = pushout.battery(first, second, ctx.rng("pushout product"), ctx.count(20))
    return _outcome(reports, "[-inf, +inf]", f"{ctx.count(20)} instances; generating shapes verified")


def adjunction(ctx: SuiteContext) -> Outcome:
    rng = ctx.rng("adjunction")
    k, lam = ground(QQ), exterior(QQ, 1)
    reports = []
    for b in (k, lam):
        first, second = Bimodules.over(k, b), Bimodules.over(b, k)
        out = Bimodules.over(k, k)
        m = first.free([("m", 0)], name="M")
        n = second.free([("n", rng.choice([0, 1]))], name="N")
        z = out.free([("z", 0), ("z'", 1)], name="Z")
        m2 = first.free([("p", 0), ("q", 1)], name="M'")
        u = random_closed_map(m2, m, rng, name="u")
        reports.append(tensor_hom_adjunction(first, second, m, n, z, maps=[u]))
    return _outcome(reports, "[-inf, +inf]", "B = k and B = Λ(e)")


def _we_corpus(ctx: SuiteContext) -> tuple[CDGAlgebra, list[ModMap]]:
    rng = ctx.rng("weak equivalence corpus")
    a = truncated_polynomial(QQ, 2, 2, var="e")
    maps = []
    for i in range(ctx.count(50)):
        src = random_module(a, rng, name=f"M{i}")
        if i % 5 == 0:
            maps.append(cylinder(src)[2])
        else:
            tgt = random_module(a, rng, name=f"N{i}")
            maps.append(random_closed_map(src, tgt, rng, name=f"f{i}"))
    return a, maps


def agreement(ctx: SuiteContext) -> Outcome:
    a, maps = _we_corpus(ctx)
    s = ctx.settings
    proj = enumerate_twisted(a, max_rank=1, min_degree=-1, max_degree=1, settings=s, name="Tw≤1")
    bar_letters = bar(a, 2).letters
    inj = enumerate_bar_contramodules(bar_letters, max_dim=1, min_degree=-1, max_degree=1, settings=s,
                                      name="W≤1")
    disagreements = 0
    for f in maps:
        report = we_agreement(f, proj, inj)
        if not report.agree:
            disagreements += 1
        if homotopy_equivalence(f).certified and not (report.projective.verdict and report.injective.verdict):
            return Outcome(False, "[-inf, +inf]", f"certified homotopy equivalence {f.name} rejected")
    return Outcome(True, "[-inf, +inf]",
                   f"{len(maps)} maps, {disagreements} disagreements (family insufficiency)")


def contra_side(ctx: SuiteContext) -> Outcome:
    rng = ctx.rng("contra side")
    a = truncated_polynomial(QQ, 2, 2, var="e")
    b: TruncatedBar = bar(a, 2)
    reports = []
    for i in range(ctx.count(5)):
        _, _, p = cylinder(random_module(a, rng, name=f"X{i}"))
        reports.append(contra_consistency(homotopy_equivalence(p), b))
    return _outcome(reports, "N = 2", "Homτ(B, cone p) contractible")


def _chain_contramodule(letters: BarLetters, size: int) -> BarContramodule:
    """w_0 -> w_1 -> ... under the single letter operator, degrees 0, -1, ..."""
    (e,) = letters.letters
    basis = [(f"w{i}", -i * letters.letter_degree(e)) for i in range(size)]
    ops = {e: {f"w{i}": {f"w{i + 1}": 1} for i in range(size - 1)}}
    return BarContramodule.build(letters, basis, ops, name=f"W{size}")


def splittings(ctx: SuiteContext) -> Outcome:
    rng = ctx.rng("splitting")
    a = truncated_polynomial(QQ, 2, 2, var="e")
    letters = bar(a, 2).letters
    reports = []
    for i in range(ctx.count(10)):
        x = random_module(a, rng, name=f"X{i}")
        _, _, p = cylinder(x)
        cert = homotopy_equivalence(p)
        if not cert.certified:
            return Outcome(False, "[-inf, +inf]", f"cylinder projection of {x.name} not certified")
        w = _chain_contramodule(letters, 1 + i % 3)
        if not w.is_valid:
            return Outcome(False, "[-inf, +inf]", f"{w.name} is not a contramodule")
        split = splitting_certificate(cone(p), cogenerator(w), rng=rng)
        if not split.split:
            return Outcome(False, "[-inf, +inf]", _first_failure([split.report]) or "no retraction")
        reports.append(split.report)
    return _outcome(reports, "[-inf, +inf]", f"{len(reports)} splittings, r∘f = id")


def default_entries() -> list[SuiteEntry]:
    return [
        SuiteEntry("axiom battery", axiom_battery),
        SuiteEntry("k[x] example", kx_example, ("axiom battery",)),
        SuiteEntry("notcofib example", notcofib_example, ("axiom battery",)),
        SuiteEntry("notcofib deviation", notcofib_deviation, ("notcofib example",)),
        SuiteEntry("bar and twist", bar_twist, ("axiom battery",)),
        SuiteEntry("comparison isomorphisms", comparison, ("bar and twist",)),
        SuiteEntry("phi psi", phi_psi, ("axiom battery",)),
        SuiteEntry("cylinder", cylinders, ("axiom battery",)),
        SuiteEntry("pushout product", pushout_products, ("axiom battery",)),
        SuiteEntry("adjunction", adjunction, ("axiom battery",)),
        SuiteEntry("weak equivalence agreement", agreement, ("cylinder", "k[x] example")),
        SuiteEntry("contra side", contra_side, ("cylinder", "bar and twist")),
        SuiteEntry("splitting", splittings, ("cylinder",)),
    ]


def suite_graph(entries: Sequence[SuiteEntry]) -> nx.DiGraph:
    graph = nx.DiGraph()
    for e in entries:
        graph.add_node(e.name, entry=e)
    for e in entries:
        for dep in e.after:
            if dep not in graph:
                raise ValueError(f"{e.name} depends on unknown entry {dep!r}")
            graph.add_edge(dep, e.name)
    if not nx.is_directed_acyclic_graph(graph):
        raise ValueError(f"suite entries form a cycle: {nx.find_cycle(graph)}")
    return graph


def run_suite(
    *,
    seed: int | None = None,
    settings: Settings | None = None,
    entries: Sequence[SuiteEntry] | None = None,
    only: Iterable[str] | None = None,
    scale: float = 1.0,
) -> SuiteReport:
    """Run entries in dependency order; ``only`` restricts to the named entries and their prerequisites."""
    settings = settings or get_settings()
    ctx = SuiteContext(settings.seed if seed is None else seed, settings, scale)
    graph = suite_graph(entries or default_entries())
    if only is not None:
        keep: set[str] = set()
        for name in only:
            keep |= {name} | nx.ancestors(graph, name)
        graph = graph.subgraph(keep).copy()
    report = SuiteReport(title="regression suite", seed=ctx.seed)
    status: dict[str, bool] = {}
    for name in nx.lexicographical_topological_sort(graph):
        entry: SuiteEntry = graph.nodes[name]["entry"]
        blocked = [d for d in graph.predecessors(name) if not status[d]]
        start = time.perf_counter()
        if blocked:
            outcome = Outcome(False, "-", f"skipped: {', '.join(sorted(blocked))} failed")
        else:
            try:
                outcome = entry.run(ctx)
            except CDGKitError as e:
                outcome = Outcome(False, "-", f"{type(e).__name__}: {e}")
        seconds = time.perf_counter() - start
        status[name] = outcome.passed
        report.records.append(CheckRecord(name=name, passed=outcome.passed, window=outcome.window,
                                          detail=outcome.detail, seconds=round(seconds, 3)))
        log.info("suite entry", extra={"entry": name, "passed": outcome.passed, "seconds": round(seconds, 3)})
    return report
