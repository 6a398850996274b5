from __future__ import annotations

import json
import re
from pathlib import Path

import pytest

from cdgkit.main import build_parser, main


def test_check_bundled_manifest(capsys) -> None:
    assert main(["check", "kx", "--no-write"]) == 0
    out = capsys.readouterr().out
    assert "exit code 0" in out


def test_we_expected_verdict_exits_zero() -> None:
    assert main(["we", "kx", "--no-write"]) == 0


def test_we_unexpected_verdict_exits_four() -> None:
    assert main(["we", "augmentation", "--no-write"]) == 4


def test_syntax_error_exits_two(tmp_path: Path, capsys) -> None:
    path = tmp_path / "broken.json"
    path.write_text('{"field": "QQ",', encoding="utf-8")
    assert main(["check", str(path)]) == 2
    assert "syntax error" in capsys.readouterr().err


def test_missing_manifest_exits_two() -> None:
    assert main(["check"]) == 2
    assert main(["check", "no-such-manifest"]) == 2


def test_window_violation_exits_five() -> None:
    assert main(["cohomology", "kx", "--window", "6", "--degrees", "8", "--no-write"]) == 5


def test_cohomology_json(capsys) -> None:
    assert main(["cohomology", "kx", "--json", "--no-write"]) == 0
    body = json.loads(capsys.readouterr().out)
    docs = [d for s in body["sections"] for d in s["documents"] if d.get("subject") == "A" and "dims" in d]
    assert docs[0]["dims"] == {"0": 1}


def test_text_output_is_deterministic(capsys) -> None:
    main(["we", "kx", "--no-write", "--seed", "3"])
    first = capsys.readouterr().out
    main(["we", "kx", "--no-write", "--seed", "3"])
    assert capsys.readouterr().out == first
    assert "seed 3" in first


def test_report_written(tmp_path: Path, capsys) -> None:
    target = tmp_path / "reports"
    assert main(["check", "kx", "--report-dir", str(target)]) == 0
    match = re.search(r"report: (\S+)", capsys.readouterr().out)
    assert match is not None
    written = sorted(p.suffix for p in (target / "reports").iterdir())
    assert written == [".json", ".txt"]


def test_degree_ranges() -> None:
    args = build_parser().parse_args(["we", "kx", "--degrees", "-1..2"])
    assert args.degrees == [-1, 0, 1, 2]
    with pytest.raises(SystemExit):
        build_parser().parse_args(["we", "kx", "--degrees", "a,b"])


def test_pushout_product_default_run_exits_zero() -> None:
    assert main(["pushout-product", "--no-write"]) == 0
