"""Runs manifest tasks in dependency order and writes the run's reports.

A command selects the manifest tasks with that command (plus whatever they
are declared to run after); with no such task a default task over every
object of the manifest is synthesized. Each task yields a list of report
documents, a verdict and an exit code.
"""

from __future__ import annotations

import dataclasses
import json
import random
import time
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import networkx as nx

from cdgkit.bar.auxeq import verify_comparison
from cdgkit.bar.bar import bar
from cdgkit.bar.contra import BarContramodule
from cdgkit.bar.twisted import twisted_comodule, twisted_contramodule, twisted_hom_module, twisted_module
from cdgkit.cdg.algebra import CDGAlgebra
from cdgkit.cdg.bimodule import Bimodules
from cdgkit.cdg.constructions import regular_module
from cdgkit.cdg.examples import exterior, ground
from cdgkit.cdg.module import CDGModule, ModMap
from cdgkit.coalg.coalgebra import CDGCoalgebra
from cdgkit.coalg.comodule import cofree_comodule
from cdgkit.coalg.contramodule import free_contramodule
from cdgkit.coalg.functors import verify_phi_psi
from cdgkit.core.config import Settings, ensure_report_dir, get_settings, new_run_id
from cdgkit.core.errors import CDGKitError, ManifestError, OutOfWindow, UnknownName
from cdgkit.core.logging import get_logger, log_json
from cdgkit.linalg.complexes import cohomology
from cdgkit.linalg.field import Field
from cdgkit.linalg.graded import GradedSpace
from cdgkit.models.schemas import (
    AgreementReport,
    AxiomReport,
    CohomologyReport,
    Manifest,
    RunRecord,
    SuiteReport,
    TaskEvent,
    TaskSpec,
    WEReport,
)
from cdgkit.services import pushout
from cdgkit.services.families import TestFamily, enumerate_bar_contramodules, enumerate_twisted
from cdgkit.services.manifest_service import Workspace, build_workspace
from cdgkit.services.oracles import we_agreement, we_injective, we_projective
from cdgkit.services.regression_suite import run_suite
from cdgkit.services.report import Document, json_report, text_report

log = get_logger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_AXIOM = 3
EXIT_VERDICT = 4
EXIT_WINDOW = 5

COMMANDS = ("check", "cohomology", "bar", "twist", "we", "pushout-product", "triality", "verify-paper")

# commands whose failures are verdicts rather than axiom failures
VERDICT_COMMANDS = {"we", "verify-paper"}


@dataclass(frozen=True)
class Overrides:
    """Command-line values that win over the manifest."""

    seed: int | None = None
    window: int | None = None
    truncate: int | None = None
    model: str | None = None
    degrees: list[int] | None = None


@dataclass
class TaskOutcome:
    task: TaskSpec
    documents: list[Document]
    verdict: bool
    exit_code: int
    detail: str = ""


@dataclass(frozen=True)
class RunResult:
    run_id: str
    exit_code: int
    seed: int
    outcomes: list[TaskOutcome]
    text: str
    json: str
    text_path: Path | None
    json_path: Path | None

    @property
    def documents(self) -> list[Document]:
        return [d for o in self.outcomes for d in o.documents]


Handler = Callable[[TaskSpec, "TaskContext"], list[Document]]


@dataclass
class TaskContext:
    workspace: Workspace | None
    settings: Settings
    seed: int
    truncate: int

    def require_workspace(self, command: str) -> Workspace:
        if self.workspace is None:
            raise ManifestError(f"{command} needs a manifest")
        return self.workspace

    def rng(self, task: TaskSpec) -> random.Random:
        return random.Random(f"{self.seed}:{task.id}")


def verdict_of(doc: Document) -> bool:
    if isinstance(doc, (AxiomReport, SuiteReport)):
        return doc.passed
    if isinstance(doc, WEReport):
        return doc.verdict
    if isinstance(doc, AgreementReport):
        return doc.projective.verdict and doc.injective.verdict
    return True


def task_order(tasks: list[TaskSpec], selected: Iterable[str] | None = None) -> list[TaskSpec]:
    """Topological order of the tasks (restricted to ``selected`` and their prerequisites)."""
    graph = nx.DiGraph()
    by_id = {t.id: t for t in tasks}
    for t in tasks:
        graph.add_node(t.id)
    for t in tasks:
        for dep in t.after:
            if dep not in by_id:
                raise UnknownName(name=dep, path=f"tasks.{t.id}.after")
            graph.add_edge(dep, t.id)
    if not nx.is_directed_acyclic_graph(graph):
        cycle = " -> ".join(u for u, _ in nx.find_cycle(graph))
        raise ManifestError(f"task dependencies form a cycle: {cycle}", path="tasks")
    if selected is not None:
        keep: set[str] = set()
        for name in selected:
            keep |= {name} | nx.ancestors(graph, name)
        graph = graph.subgraph(keep)
    position = {t.id: i for i, t in enumerate(tasks)}
    return [by_id[n] for n in nx.lexicographical_topological_sort(graph, key=lambda n: position[n])]


# ---------------------------------------------------------------------------
# handlers


def _targets(ws: Workspace, task: TaskSpec, table: dict[str, Any], kind: str) -> list[tuple[str, Any]]:
    if task.target is None:
        return list(table.items())
    if task.target not in table:
        raise UnknownName(name=task.target, path=f"tasks.{task.id}.target ({kind})")
    return [(task.target, table[task.target])]


def run_check(task: TaskSpec, ctx: TaskContext) -> list[Document]:
    ws = ctx.require_workspace(task.command)
    if task.target is not None:
        obj = ws.lookup(task.target)
        return [obj.check()]
    objects: list[Any] = [*ws.algebras.values(), *ws.coalgebras.values(), *ws.modules.values(),
                          *ws.maps.values(), *ws.contramodules.values()]
    return [obj.check() for obj in objects]


def _cohomology_of(name: str, obj: CDGAlgebra | CDGCoalgebra | CDGModule,
                   degrees: list[int] | None) -> CohomologyReport:
    if not isinstance(obj, (CDGAlgebra, CDGCoalgebra, CDGModule)):
        raise ManifestError(f"{name} has no cohomology; give an algebra, coalgebra or module", path="target")
    curved = obj.algebra.is_curved if isinstance(obj, CDGModule) else obj.is_curved
    if curved:
        return CohomologyReport(subject=name, window="-", note="curved: d² ≠ 0, no cohomology")
    h = cohomology(obj.d, degrees)
    return CohomologyReport(subject=name, window=str(h.window), dims=h.dims())


def run_cohomology(task: TaskSpec, ctx: TaskContext) -> list[Document]:
    ws = ctx.require_workspace(task.command)
    if task.target is not None:
        return [_cohomology_of(task.target, ws.lookup(task.target), task.degrees)]
    tables = (ws.algebras, ws.coalgebras, ws.modules)
    return [_cohomology_of(n, obj, task.degrees) for table in tables for n, obj in table.items()]


def run_bar(task: TaskSpec, ctx: TaskContext) -> list[Document]:
    ws = ctx.require_workspace(task.command)
    n = task.truncate if task.truncate is not None else ctx.truncate
    docs: list[Document] = []
    for _, a in _targets(ws, task, ws.algebras, "algebra"):
        b = bar(a, n)
        docs += [b.coalgebra.check(), b.check_tau()]
    return docs


def run_twist(task: TaskSpec, ctx: TaskContext) -> list[Document]:
    """The four twisted functors on modules, and Hom^τ(A, W) on bar contramodules."""
    ws = ctx.require_workspace(task.command)
    n = task.truncate if task.truncate is not None else ctx.truncate
    docs: list[Document] = []
    if task.target is None or task.target in ws.modules:
        for _, m in _targets(ws, task, ws.modules, "module"):
            b = bar(m.algebra, n)
            log.info("twisting", extra={"module_name": m.name, "truncate": n, "bar_dim": b.coalgebra.dim})
            t = twisted_comodule(b, m)
            h = twisted_contramodule(b, m)
            docs += [t.check(), h.check(), twisted_module(b, t).check(), twisted_hom_module(b.letters, h).check()]
    if task.target is None or task.target in ws.contramodules:
        for _, w in _targets(ws, task, ws.contramodules, "contramodule"):
            docs.append(twisted_hom_module(w.letters, w).check())
    return docs


def _over(member: CDGModule | BarContramodule) -> CDGAlgebra:
    return member.algebra if isinstance(member, CDGModule) else member.letters.algebra


def _family(ws: Workspace, task: TaskSpec, name: str | None, kind: str, f: ModMap) -> TestFamily:
    if name is not None:
        fam = ws.families.get(name)
        if fam is None:
            raise UnknownName(name=name, path=f"tasks.{task.id}.family")
        if fam.kind != kind:
            raise ManifestError(f"{name} is a {fam.kind} family", path=f"tasks.{task.id}")
        return fam
    algebra = f.source.algebra
    for fam in ws.families.values():
        if fam.kind != kind:
            continue
        if any(_over(m) is algebra for m in fam.members[:1]):
            return fam
    if kind == "projective":
        return enumerate_twisted(algebra, settings=ws.settings)
    return enumerate_bar_contramodules(ws.letters(ws.algebra_name(algebra)), settings=ws.settings)


def run_we(task: TaskSpec, ctx: TaskContext) -> list[Document]:
    ws = ctx.require_workspace(task.command)
    docs: list[Document] = []
    for _, f in _targets(ws, task, ws.maps, "map"):
        if task.model == "both":
            proj = _family(ws, task, task.family, "projective", f)
            inj = _family(ws, task, task.injective_family, "injective", f)
            if task.degrees is None:
                docs.append(we_agreement(f, proj, inj))
            else:
                docs += [we_projective(f, proj, degrees=task.degrees), we_injective(f, inj, degrees=task.degrees)]
        elif task.model == "proj":
            docs.append(we_projective(f, _family(ws, task, task.family, "projective", f), degrees=task.degrees))
        else:
            name = task.injective_family or task.family
            docs.append(we_injective(f, _family(ws, task, name, "injective", f), degrees=task.degrees))
    return docs


def run_pushout_product(task: TaskSpec, ctx: TaskContext) -> list[Document]:
    """Seeded instances over k-B and B-k bimodules; B is the target algebra or Λ(e)."""
    if task.target is not None:
        ws = ctx.require_workspace(task.command)
        middle = ws.algebras.get(task.target)
        if middle is None:
            raise UnknownName(name=task.target, path=f"tasks.{task.id}.target (algebra)")
    else:
        middle = exterior(ctx.workspace.field if ctx.workspace is not None else Field.parse(ctx.settings.field))
    if middle.is_curved:
        raise ManifestError(f"{middle.name} is curved; pushout products are formed over uncurved algebras",
                            path=f"tasks.{task.id}.target")
    k = ground(middle.field)
    first, second = Bimodules.over(k, middle), Bimodules.over(middle, k)
    return list(pushout.battery(first, second, ctx.rng(task), task.samples or 20))


def run_triality(task: TaskSpec, ctx: TaskContext) -> list[Document]:
    """Comparison isomorphisms per algebra, then Φ/Ψ on each uncurved coalgebra."""
    ws = ctx.require_workspace(task.command)
    n = task.truncate if task.truncate is not None else ctx.truncate
    docs: list[Document] = []
    on_coalgebra = task.target is not None and task.target in ws.coalgebras
    algebras = [] if on_coalgebra else _targets(ws, task, ws.algebras, "algebra")
    for name, a in algebras:
        modules = [m for m in ws.modules.values() if m.algebra is a] or [regular_module(a, name=name)]
        maps = [f for f in ws.maps.values() if f.source.algebra is a and f.degree == 0 and f.is_closed]
        for length in sorted({2, max(n, 2)}):
            log.info("comparison", extra={"algebra": name, "truncate": length, "modules": len(modules)})
            docs.append(verify_comparison(bar(a, length), modules, maps,
                                          subject=f"comparison over B({name}), N = {length}"))
    coalgebras = _targets(ws, task, ws.coalgebras, "coalgebra") if task.target is None or on_coalgebra else []
    for name, c in coalgebras:
        if c.is_curved:
            report = AxiomReport(subject=f"Φ ⊣ Ψ over {name}", kind="adjunction")
            report.add("Φ/Ψ", None, note="skipped: curved coalgebra")
            docs.append(report)
            continue
        v = GradedSpace.from_pairs([("v", 0)])
        docs.append(verify_phi_psi([free_contramodule(c, v, name=f"Hom({name}, k)")],
                                   [cofree_comodule(c, v, name=f"{name}⊗k")], subject=f"Φ ⊣ Ψ over {name}"))
    return docs


def run_verify_paper(task: TaskSpec, ctx: TaskContext) -> list[Document]:
    return [run_suite(seed=ctx.seed, settings=ctx.settings)]


HANDLERS: dict[str, Handler] = {
    "check": run_check,
    "cohomology": run_cohomology,
    "bar": run_bar,
    "twist": run_twist,
    "we": run_we,
    "pushout-product": run_pushout_product,
    "triality": run_triality,
    "verify-paper": run_verify_paper,
}


# ---------------------------------------------------------------------------
# service


class RunService:
    def __init__(self, *, settings: Settings | None = None) -> None:
        self.settings = settings or get_settings()
        self.log = get_logger(__name__)

    def select(self, command: str, manifest: Manifest | None, overrides: Overrides) -> list[TaskSpec]:
        tasks = list(manifest.tasks) if manifest is not None else []
        if command == "run":
            chosen = tasks
            ordered = task_order(tasks)
        else:
            chosen = [t for t in tasks if t.command == command]
            if not chosen:
                default = TaskSpec(id=command, command=command)  # type: ignore[arg-type]
                return [self._apply(default, overrides)]
            ordered = task_order(tasks, [t.id for t in chosen])
        return [self._apply(t, overrides) for t in ordered]

    @staticmethod
    def _apply(task: TaskSpec, o: Overrides) -> TaskSpec:
        update: dict[str, Any] = {}
        if o.truncate is not None:
            update["truncate"] = o.truncate
        if o.model is not None:
            update["model"] = o.model
        if o.degrees is not None:
            update["degrees"] = o.degrees
        return task.model_copy(update=update) if update else task

    def run_task(self, task: TaskSpec, ctx: TaskContext) -> TaskOutcome:
        try:
            docs = HANDLERS[task.command](task, ctx)
        except OutOfWindow as e:
            return TaskOutcome(task, [], False, EXIT_WINDOW, str(e))
        except ManifestError:
            raise
        except CDGKitError as e:
            return TaskOutcome(task, [], False, EXIT_AXIOM, f"{type(e).__name__}: {e}")
        verdict = all(verdict_of(d) for d in docs)
        wanted = True if task.expect is None else task.expect
        if verdict == wanted:
            return TaskOutcome(task, docs, verdict, EXIT_OK)
        code = EXIT_VERDICT if task.command in VERDICT_COMMANDS else EXIT_AXIOM
        detail = f"verdict {verdict}, expected {wanted}"
        return TaskOutcome(task, docs, verdict, code, detail)

    def run(
        self,
        command: str,
        manifest: Manifest | None,
        *,
        manifest_name: str = "-",
        overrides: Overrides | None = None,
        write: bool = True,
    ) -> RunResult:
        overrides = overrides or Overrides()
        if command != "run" and command not in COMMANDS:
            raise ValueError(f"unknown command {command!r}")
        seed = overrides.seed if overrides.seed is not None else (
            manifest.seed if manifest is not None and manifest.seed is not None else self.settings.seed)
        tasks = self.select(command, manifest, overrides)
        workspace = None
        if manifest is not None:
            workspace = build_workspace(manifest, settings=self.settings, window=overrides.window)
        ctx = TaskContext(workspace, self.settings, seed,
                          overrides.truncate if overrides.truncate is not None else self.settings.bar_truncation)

        run_id = new_run_id()
        record = RunRecord(run_id=run_id, manifest=manifest_name, seed=seed, order=[t.id for t in tasks])
        outcomes: list[TaskOutcome] = []
        failed: set[str] = set()
        for task in tasks:
            event = TaskEvent(task=task.id, command=task.command, status="started", start_ts=time.time())
            record.events.append(event)
            blocked = [d for d in task.after if d in failed]
            if blocked:
                outcome = TaskOutcome(task, [], False, EXIT_VERDICT, f"skipped: {', '.join(blocked)} failed")
            else:
                outcome = self.run_task(task, ctx)
            if outcome.exit_code:
                failed.add(task.id)
            event.status = "passed" if not outcome.exit_code else "error" if outcome.exit_code == EXIT_WINDOW \
                else "failed"
            event.exit_code = outcome.exit_code
            event.detail = outcome.detail
            event.end_ts = time.time()
            outcomes.append(outcome)
            self.log.info("task finished", extra={"task": task.id, "command": task.command,
                                                  "exit_code": outcome.exit_code})
        record.exit_code = max((o.exit_code for o in outcomes), default=EXIT_OK)
        log_json(self.log, "run finished", run_id=run_id, command=command, tasks=len(outcomes),
                 exit_code=record.exit_code)

        sections = [(self._heading(o), o.documents) for o in outcomes]
        title = f"cdgkit {command} {manifest_name}"
        text = text_report(title, seed, sections)
        body = json_report(title, seed, sections, extra={"run": json.loads(record.model_dump_json())})
        text_path = json_path = None
        if write:
            out_dir = ensure_report_dir(self.settings)
            text_path = out_dir / f"{run_id}.txt"
            json_path = out_dir / f"{run_id}.json"
            text_path.write_text(text, encoding="utf-8")
            json_path.write_text(body, encoding="utf-8")
        return RunResult(run_id, record.exit_code, seed, outcomes, text, body, text_path, json_path)

    @staticmethod
    def _heading(o: TaskOutcome) -> str:
        state = "ok" if not o.exit_code else f"exit {o.exit_code}"
        line = f"{o.task.id} ({o.task.command}): {state}"
        return f"{line}; {o.detail}" if o.detail else line


def with_report_dir(settings: Settings, path: str | Path | None) -> Settings:
    return settings if path is None else dataclasses.replace(settings, report_dir=Path(path).resolve())
