"""Plain-text, JSON and terminal renderings of every report kind.

Text output is deterministic: no timestamps or runtimes, members in index
order, the seed on the first line.
"""

from __future__ import annotations

import json
from collections.abc import Sequence

from rich.console import Console
from rich.table import Table

from cdgkit.models.schemas import (
    AgreementReport,
    AxiomReport,
    CohomologyReport,
    SuiteReport,
    WEReport,
)

Document = AxiomReport | WEReport | AgreementReport | CohomologyReport | SuiteReport


def _mark(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def axiom_lines(r: AxiomReport) -> list[str]:
    lines = [f"[{r.kind}] {r.subject}: {_mark(r.passed)}"]
    for res in r.results:
        line = f"  {_mark(res.passed)}  {res.name}  window={res.window}"
        if res.witness is not None:
            line += f"  witness={res.witness}"
        if res.note:
            line += f"  ({res.note})"
        lines.append(line)
    return lines


def we_lines(r: WEReport) -> list[str]:
    verdict = "weak equivalence" if r.verdict else "NOT a weak equivalence"
    lines = [f"[we/{r.model}] {r.subject}: {verdict} relative to {r.family} ({r.provenance})"]
    for m in r.members:
        span = f"{m.degrees[0].degree}..{m.degrees[-1].degree}" if m.degrees else "-"
        line = f"  member {m.index} {m.member}  degrees {span}  window={m.window}  {_mark(m.verdict)}"
        if m.witness_degrees:
            line += f"  witnesses at {m.witness_degrees}"
        if m.note:
            line += f"  ({m.note})"
        lines.append(line)
        for d in m.degrees:
            flag = "" if d.iso else "  <- witness"
            lines.append(f"    H^{d.degree}: before={d.dim_before} after={d.dim_after} rank={d.rank}{flag}")
    return lines


def agreement_lines(r: AgreementReport) -> list[str]:
    state = "agree" if r.agree else "DISAGREE"
    lines = [f"[we/agreement] {r.subject}: {state}"]
    if r.note:
        lines.append(f"  note: {r.note}")
    return lines + [f"  {x}" for x in we_lines(r.projective) + we_lines(r.injective)]


def cohomology_lines(r: CohomologyReport) -> list[str]:
    dims = ", ".join(f"H^{n}={d}" for n, d in sorted(r.dims.items()))
    lines = [f"[cohomology] {r.subject}  window={r.window}", f"  {dims or 'acyclic'}"]
    if r.note:
        lines.append(f"  ({r.note})")
    return lines


def suite_lines(r: SuiteReport) -> list[str]:
    lines = [f"[suite] {r.title}: {_mark(r.passed)}"]
    width = max((len(x.name) for x in r.records), default=0)
    for x in r.records:
        line = f"  {_mark(x.passed)}  {x.name.ljust(width)}  window={x.window}"
        if x.detail:
            line += f"  {x.detail}"
        lines.append(line)
    return lines


def document_lines(doc: Document) -> list[str]:
    if isinstance(doc, AxiomReport):
        return axiom_lines(doc)
    if isinstance(doc, WEReport):
        return we_lines(doc)
    if isinstance(doc, AgreementReport):
        return agreement_lines(doc)
    if isinstance(doc, CohomologyReport):
        return cohomology_lines(doc)
    return suite_lines(doc)


def text_report(title: str, seed: int, sections: Sequence[tuple[str, Sequence[Document]]]) -> str:
    out = [f"# {title}", f"seed: {seed}", ""]
    for heading, docs in sections:
        out.append(f"## {heading}")
        for doc in docs:
            out.extend(document_lines(doc))
        out.append("")
    return "\n".join(out).rstrip() + "\n"


def json_report(title: str, seed: int, sections: Sequence[tuple[str, Sequence[Document]]],
                extra: dict[str, object] | None = None) -> str:
    body = {
        "title": title,
        "seed": seed,
        "sections": [{"heading": h, "documents": [d.model_dump() for d in docs]} for h, docs in sections],
        **(extra or {}),
    }
    return json.dumps(body, ensure_ascii=False, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# terminal


def suite_table(r: SuiteReport) -> Table:
    table = Table(title=f"{r.title} (seed {r.seed})")
    table.add_column("check")
    table.add_column("result")
    table.add_column("window")
    table.add_column("seconds", justify="right")
    table.add_column("detail", overflow="fold")
    for x in r.records:
        secs = "" if x.seconds is None else f"{x.seconds:.2f}"
        table.add_row(x.name, "[green]PASS[/]" if x.passed else "[red]FAIL[/]", x.window, secs, x.detail)
    return table


def we_table(r: WEReport) -> Table:
    table = Table(title=f"{r.model}: {r.subject} vs {r.family}")
    for col in ("member", "degree", "dim H before", "dim H after", "rank", "iso"):
        table.add_column(col)
    for m in r.members:
        for d in m.degrees:
            table.add_row(m.member, str(d.degree), str(d.dim_before), str(d.dim_after), str(d.rank),
                          "yes" if d.iso else "[red]no[/]")
    return table


def print_documents(console: Console, docs: Sequence[Document]) -> None:
    for doc in docs:
        if isinstance(doc, SuiteReport):
            console.print(suite_table(doc))
        elif isinstance(doc, WEReport):
            console.print(we_table(doc))
        elif isinstance(doc, AgreementReport):
            console.print(we_table(doc.projective))
            console.print(we_table(doc.injective))
            if doc.note:
                console.print(f"[yellow]{doc.note}[/]")
        else:
            console.print("\n".join(document_lines(doc)), highlight=False, markup=False)
