from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from importlib import resources
from pathlib import Path

from rich.console import Console
from rich.markup import escape

from cdgkit.core.config import get_settings
from cdgkit.core.errors import CDGKitError, ManifestError, ManifestSyntaxError, OutOfWindow
from cdgkit.core.logging import configure_logging, get_logger
from cdgkit.models.schemas import Manifest
from cdgkit.services.manifest_service import load_manifest
from cdgkit.services.report import print_documents
from cdgkit.services.run_service import (
    COMMANDS,
    EXIT_AXIOM,
    EXIT_PARSE,
    EXIT_WINDOW,
    Overrides,
    RunService,
    with_report_dir,
)

log = get_logger(__name__)


def resolve_manifest(arg: str) -> Path:
    """A path, or the name of a manifest shipped with the package (``kx``, ``augmentation``, ...)."""
    path = Path(arg)
    if path.exists():
        return path
    bundled = resources.files("cdgkit") / "manifests" / f"{arg.removesuffix('.json')}.json"
    if bundled.is_file():
        return Path(str(bundled))
    raise ManifestError(f"no manifest at {arg}")


def _degrees(text: str) -> list[int]:
    """``-1,0,1`` or ``0..4``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad degree list {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdgkit", description="Exact checks for curved DG algebras and modules.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("manifest", nargs="?", help="manifest path or bundled manifest name")
    common.add_argument("--seed", type=int, help="seed for randomized corpora (default: manifest, then CDGKIT_SEED)")
    common.add_argument("--window", type=int, help="top degree for truncated infinite algebras")
    common.add_argument("--report-dir", help="directory for run reports (default: CDGKIT_REPORT_DIR)")
    common.add_argument("--json", action="store_true", help="print the machine-readable report")
    common.add_argument("--no-write", action="store_true", help="do not write report files")

    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*COMMANDS, "run"):
        p = sub.add_parser(name, parents=[common])
        if name in ("bar", "twist", "triality", "run"):
            p.add_argument("--truncate", type=int, help="word-length bound N of the bar construction")
        if name in ("we", "run"):
            p.add_argument("--model", choices=["proj", "inj", "both"])
        if name in ("we", "cohomology", "run"):
            p.add_argument("--degrees", type=_degrees, help="degrees to compare, e.g. -1,0,1 or 0..4")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = with_report_dir(get_settings(), args.report_dir)
    configure_logging(settings.log_level)
    console = Console()
    err = Console(stderr=True)

    try:
        manifest: Manifest | None = None
        name = "-"
        if args.manifest is not None:
            path = resolve_manifest(args.manifest)
            manifest = load_manifest(path)
            name = path.name
        elif args.command not in ("verify-paper", "pushout-product"):
            raise ManifestError(f"{args.command} needs a manifest")
        overrides = Overrides(
            seed=args.seed,
            window=args.window,
            truncate=getattr(args, "truncate", None),
            model=getattr(args, "model", None),
            degrees=getattr(args, "degrees", None),
        )
        result = RunService(settings=settings).run(args.command, manifest, manifest_name=name,
                                                   overrides=overrides, write=not args.no_write)
    except ManifestSyntaxError as e:
        err.print(f"[red]manifest syntax error[/] {escape(str(e))}")
        return EXIT_PARSE
    except ManifestError as e:
        err.print(f"[red]manifest error[/] {escape(str(e))}")
        return EXIT_PARSE
    except OutOfWindow as e:
        err.print(f"[red]out of window[/] {escape(str(e))}")
        return EXIT_WINDOW
    except CDGKitError as e:
        err.print(f"[red]{type(e).__name__}[/] {escape(str(e))}")
        return EXIT_AXIOM

    if args.json:
        console.out(result.json, highlight=False)
    else:
        print_documents(console, result.documents)
        for o in result.outcomes:
            if o.exit_code:
                console.print(f"[red]{o.task.id}[/] exit {o.exit_code}: {escape(o.detail)}", highlight=False)
        console.print(f"seed {result.seed}, exit code {result.exit_code}", highlight=False)
        if result.text_path is not None:
            console.print(f"report: {result.text_path}", highlight=False)
    log.debug("run finished", extra={"run_id": result.run_id, "exit_code": result.exit_code})
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
