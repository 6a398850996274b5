from __future__ import annotations

import json

import pytest

from cdgkit.bar.bar import BarLetters
from cdgkit.bar.contra import BarContramodule
from cdgkit.cdg.examples import truncated_polynomial
from cdgkit.coalg.coalgebra import dual_coalgebra
from cdgkit.core.config import get_settings
from cdgkit.core.errors import DimensionMismatch, ManifestError, ManifestSyntaxError, UnknownName
from cdgkit.linalg.field import Field
from cdgkit.main import resolve_manifest
from cdgkit.services.manifest_service import (
    build_algebra,
    build_coalgebra,
    build_contramodule,
    build_map,
    build_module,
    build_workspace,
    dump_algebra,
    dump_coalgebra,
    dump_contramodule,
    dump_json,
    dump_map,
    dump_module,
    load_manifest,
    parse_manifest,
)

QQ = Field.rationals()


@pytest.mark.parametrize("name", ["kx", "augmentation", "notcofib"])
def test_bundled_manifests_build(name: str) -> None:
    manifest = load_manifest(resolve_manifest(name))
    ws = build_workspace(manifest)
    assert ws.algebras
    assert all(a.check().passed for a in ws.algebras.values())


def test_kx_manifest_contents() -> None:
    ws = build_workspace(load_manifest(resolve_manifest("kx.json")))
    assert set(ws.modules) == {"A1", "A^x", "k"}
    assert ws.maps["eps"].is_closed
    assert [m.name for m in ws.families["F"].members] == ["A1", "A^x"]


def test_window_override_wins_over_manifest() -> None:
    ws = build_workspace(load_manifest(resolve_manifest("kx")), window=5)
    assert ws.algebras["A"].window.hi == 5


def test_syntax_error_position() -> None:
    with pytest.raises(ManifestSyntaxError) as info:
        parse_manifest('{\n  "field": "QQ",\n  "tasks": [\n}')
    assert (info.value.line, info.value.col) == (4, 1)


def test_invalid_utf8_is_a_syntax_error(tmp_path) -> None:
    path = tmp_path / "bad.json"
    path.write_bytes(b'{"field": "Q\xffQ"}')
    with pytest.raises(ManifestSyntaxError) as info:
        load_manifest(path)
    assert info.value.line == 1


def test_top_level_must_be_object() -> None:
    with pytest.raises(ManifestError, match="JSON object"):
        parse_manifest("[1, 2]")


def test_unknown_algebra_reference() -> None:
    text = json.dumps({"modules": {"M": {"kind": "trivial", "algebra": "B"}}})
    with pytest.raises(UnknownName) as info:
        parse_manifest(text)
    assert info.value.path == "modules.M.algebra"
    assert info.value.name == "B"


def test_unknown_dependency() -> None:
    text = json.dumps({"tasks": [{"id": "a", "command": "check", "after": ["b"]}]})
    with pytest.raises(UnknownName) as info:
        parse_manifest(text)
    assert info.value.path == "tasks.0.after.0"


def test_duplicate_task_id() -> None:
    text = json.dumps({"tasks": [{"id": "a", "command": "check"}, {"id": "a", "command": "bar"}]})
    with pytest.raises(ManifestError, match="duplicate"):
        parse_manifest(text)


def test_extra_fields_rejected() -> None:
    text = json.dumps({"algebras": {"A": {"preset": "exterior", "colour": "blue"}}})
    with pytest.raises(ManifestError) as info:
        parse_manifest(text)
    assert info.value.path.startswith("algebras.A")


def test_unknown_command_rejected() -> None:
    with pytest.raises(ManifestError):
        parse_manifest(json.dumps({"tasks": [{"id": "a", "command": "deploy"}]}))


def test_dense_block_shape_mismatch() -> None:
    spec = {
        "algebras": {
            "A": {
                "basis": [
                    {"label": "1", "degree": 0},
                    {"label": "u", "degree": 0},
                    {"label": "x", "degree": 1},
                    {"label": "y", "degree": 1},
                ],
                "differential_blocks": [{"degree": 0, "rows": [[0, 0, 0], [0, 0, 0]]}],
            }
        }
    }
    with pytest.raises(DimensionMismatch) as info:
        build_workspace(parse_manifest(json.dumps(spec)))
    assert info.value.expected == (2, 2)
    assert info.value.actual == (2, 3)
    assert info.value.path == "algebras.A"


def test_construction_errors_carry_a_path() -> None:
    spec = {"field": "GF(5)", "algebras": {"A": {"preset": "exterior"}},
            "modules": {"M": {"kind": "twisted", "algebra": "A",
                              "generators": [{"label": "v", "degree": 0}],
                              "connection": [{"source": "v", "target": "v",
                                              "value": [{"label": "e", "coeff": 1}, {"label": "z"}]}]}}}
    with pytest.raises(ManifestError) as info:
        build_workspace(parse_manifest(json.dumps(spec)))
    assert info.value.path == "modules.M"


def test_bad_field_name() -> None:
    with pytest.raises(ManifestError) as info:
        build_workspace(parse_manifest(json.dumps({"field": "GF(6)"})))
    assert info.value.path == "field"


def test_dumped_algebra_rebuilds() -> None:
    a = truncated_polynomial(QQ, 2, 3)
    spec = dump_algebra(a)
    b = build_algebra(QQ, "B", spec, window=12)
    assert b.check().passed
    assert b.labels == a.labels
    assert b.table == a.table
    assert dump_json(dump_algebra(b)) == dump_json(spec)


def test_field_falls_back_to_settings(monkeypatch) -> None:
    monkeypatch.setenv("CDGKIT_FIELD", "GF(3)")
    get_settings.cache_clear()
    ws = build_workspace(parse_manifest(json.dumps({"algebras": {"A": {"preset": "exterior"}}})))
    assert ws.field.characteristic == 3
    ws = build_workspace(parse_manifest(json.dumps({"field": "QQ"})))
    assert ws.field.characteristic == 0


def test_dumped_coalgebra_rebuilds() -> None:
    c = dual_coalgebra(truncated_polynomial(QQ, 2, 3))
    spec = dump_coalgebra(c)
    d = build_coalgebra(QQ, "D", spec, {})
    assert d.check().passed
    assert d.labels == c.labels
    assert dump_json(dump_coalgebra(d)) == dump_json(spec)


def test_dumped_module_and_map_rebuild() -> None:
    ws = build_workspace(load_manifest(resolve_manifest("kx")))
    a = ws.algebras["A"]
    ax = ws.modules["A^x"]
    spec = dump_module(ax, "A")
    again = build_module("A^x", spec, a)
    assert again.d.equals(ax.d)
    assert dump_json(dump_module(again, "A")) == dump_json(spec)

    eps = ws.maps["eps"]
    k = ws.modules["k"]
    rebuilt = build_map("eps", dump_map(eps, "A1", "k"), ws.modules["A1"], k)
    assert rebuilt.is_closed
    assert rebuilt.map.columns == eps.map.columns


def test_dumped_contramodule_rebuilds() -> None:
    letters = BarLetters.build(truncated_polynomial(QQ, 2, 2))
    w = BarContramodule.build(letters, [("w0", 0), ("w1", 1)], {}, {"w0": {"w1": 1}}, name="W")
    spec = dump_contramodule(w, "A")
    back = build_contramodule("W", spec, letters)
    assert back.is_valid
    assert back.d.equals(w.d)
    assert dump_json(dump_contramodule(back, "A")) == dump_json(spec)
