from __future__ import annotations

import json
from fractions import Fraction as F

import pytest

from sweepout_forge.cli import main, parse_grid
from sweepout_forge.fillrad import cycle_space, octahedron_space
from sweepout_forge.io import (
    InputError,
    complex_from_json,
    complex_to_json,
    cube_filling_json,
    dumps,
    filling_from_json,
    filling_to_json,
    load_json,
    metric_from_json,
    metric_to_json,
    prism_filling_json,
)
from sweepout_forge.filling import OCTAHEDRON_FACES


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def run(args, capsys=None):
    code = main([str(a) for a in args])
    return code


def load(path):
    return json.loads(path.read_text())


def strip_timing(report):
    report = dict(report)
    report.pop("timing")
    return report


# -- io ----------------------------------------------------------------------------------------


def test_complex_roundtrip():
    gc = complex_from_json(prism_filling_json(3, 2))
    again = complex_from_json(json.loads(dumps(complex_to_json(gc))))
    assert [again.count(k) for k in range(4)] == [gc.count(k) for k in range(4)]


def test_metric_roundtrip_keeps_exact_values():
    space = cycle_space(6, F(3))
    back = metric_from_json(json.loads(dumps(metric_to_json(space))))
    assert back.distances == space.distances and back.model_diameter == F(3, 2)


def test_filling_roundtrip():
    inp = filling_from_json(cube_filling_json(3))
    back = filling_from_json(json.loads(dumps(filling_to_json(inp))))
    assert back.vertex_images == inp.vertex_images


def test_vertex_images_dict_form():
    data = cube_filling_json(3)
    data["vertex_images"] = {f"0:{','.join(str(c) for c in v['point'])}": v["image"] for v in data["vertex_images"]}
    assert len(filling_from_json(data).vertex_images) == 8


def test_malformed_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"distances": [[0, 1],\n [1, 0]')
    with pytest.raises(InputError, match=r"bad.json:2:\d+"):
        load_json(p)


def test_schema_mismatch(tmp_path):
    with pytest.raises(InputError, match="schema"):
        complex_from_json({"schema": "space.v1", "dimension": 2})


def test_parse_grid():
    assert parse_grid("0:1:1/4") == [0, F(1, 4), F(1, 2), F(3, 4), 1]
    assert parse_grid("1,2/3") == [1, F(2, 3)]
    with pytest.raises(InputError):
        parse_grid("0:1")


# -- cli ---------------------------------------------------------------------------------------


def test_decompose_and_validate(tmp_path):
    out, y = tmp_path / "dec.json", tmp_path / "y.json"
    assert run(["decompose", "--n", 2, "--p", 1, "--out", out, "--complex-out", y, "--export-fibers", tmp_path / "fib"]) == 0
    rep = load(out)
    assert rep["schema"] == "report.v1" and rep["command"] == "decompose"
    assert rep["results"]["Y_top_cells"] == {"enumerated": 24, "expected": 24}
    assert rep["results"]["fibers"]["max_edges"] == 12
    offs = sorted((tmp_path / "fib").glob("*.off"))
    assert offs and offs[0].read_text().startswith("OFF\n")
    assert run(["validate", "--complex", y, "--report", tmp_path / "v.json"]) == 0
    assert load(tmp_path / "v.json")["results"]["pseudomanifold"] is True


def test_validate_flags_non_pseudomanifold(tmp_path):
    data = {
        "schema": "complex.v1",
        "dimension": 2,
        "charts": [{"top_cells": [[["-1", "0"], ["-1", "0"]], [["0", "1"], ["0", "1"]]]}],
        "identifications": [],
    }
    assert run(["validate", "--complex", write(tmp_path / "c.json", data), "--report", tmp_path / "r.json"]) == 2


def test_sweep_report_and_exports(tmp_path):
    src = write(tmp_path / "c3.json", cube_filling_json(3))
    out = tmp_path / "s.json"
    assert run(["sweep", "--input", src, "--report", out, "--export-fibers", tmp_path / "fib"]) == 0
    res = load(out)["results"]
    assert res["w_upper"] == "12/1" and res["max_fiber_edges"] == 12
    assert res["hbar"]["count"] == 12 and res["hbar"]["mismatch"] is True
    assert all(p["zero"] for p in res["pairing"])
    assert (tmp_path / "fib" / "N.off").exists()


def test_sweep_is_deterministic(tmp_path):
    src = write(tmp_path / "p.json", prism_filling_json(3, 2))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["sweep", "--input", src, "--report", a]) == 0
    assert run(["sweep", "--input", src, "--report", b]) == 0
    assert strip_timing(load(a)) == strip_timing(load(b))


def test_sweep_error_paths(tmp_path, capsys):
    src = write(tmp_path / "c3.json", cube_filling_json(3))
    assert run(["sweep", "--input", src, "--strict"]) == 1
    assert "subdivision required" in capsys.readouterr().err
    bad = cube_filling_json(3)
    bad["charts"] = [{"grid": ["-1", "0", "1"], "top_cells": [[["-1", "0"], ["-1", "0"], ["-1", "0"]]]}]
    assert run(["sweep", "--input", write(tmp_path / "bad.json", bad)]) == 1
    (tmp_path / "broken.json").write_text("{")
    assert run(["sweep", "--input", tmp_path / "broken.json"]) == 1
    assert "broken.json:1:2" in capsys.readouterr().err


def test_fillrad_and_audit(tmp_path):
    c12 = write(tmp_path / "c12.json", metric_to_json(cycle_space(12)))
    assert run(["fillrad", "--metric", c12, "--report", tmp_path / "f.json"]) == 0
    assert load(tmp_path / "f.json")["results"]["fillrad_estimate"] == "1/6"
    assert run(["audit", "--metric", c12, "--sweep", "circle", "--report", tmp_path / "a.json"]) == 0
    # the 6-point octahedron violates the Katz clause; the audit says so with exit 2
    oc = write(tmp_path / "oc.json", metric_to_json(octahedron_space()))
    assert run(["audit", "--metric", oc, "--sweep", "sphere", "--report", tmp_path / "o.json"]) == 2
    failed = [a["name"] for a in load(tmp_path / "o.json")["audits"] if a["passed"] is False]
    assert failed == ["katz"]


def test_audit_from_sweep_report(tmp_path):
    src = write(tmp_path / "c3.json", cube_filling_json(3))
    assert run(["sweep", "--input", src, "--report", tmp_path / "s.json"]) == 0
    c12 = write(tmp_path / "c12.json", metric_to_json(cycle_space(12)))
    assert run(["audit", "--metric", c12, "--bundle", tmp_path / "s.json", "--report", tmp_path / "a.json"]) == 0


def test_fh_and_bound(tmp_path):
    oct_ = write(tmp_path / "oct.json", {"simplices": [list(f) for f in OCTAHEDRON_FACES]})
    assert run(["fh", "--complex", oct_, "--degree", 1, "--grid", "0:6:1", "--report", tmp_path / "fh.json"]) == 0
    rows = load(tmp_path / "fh.json")["results"]["table"]["rows"]
    assert [r["value"] for r in rows] == ["0/1", "0/1", "0/1", "1/1", "4/1", "4/1", "4/1"]
    assert run(["bound", "--n", 3, "--p", 2, "--fillrad", "1/2", "--tables", tmp_path / "fh.json",
                "--report", tmp_path / "b.json"]) == 0
    res = load(tmp_path / "b.json")["results"]
    assert res["k"] == 24 and res["prefactor"] == "1/24" and res["partial"] is False


def test_starfish_command(tmp_path):
    out = tmp_path / "sf.json"
    assert run(["starfish", "--L", 1, "--r", "1/2", "--m", 8, "--skip-fillrad", "--report", out,
                "--export-fibers", tmp_path / "hx"]) == 0
    res = load(out)["results"]
    assert res["hexapod"]["ratio"] == "2/1"
    assert len(list((tmp_path / "hx").glob("*.off"))) > 0
    assert run(["starfish", "--m", 12]) == 1


def test_thread_variable_is_validated(tmp_path, monkeypatch):
    monkeypatch.setenv("SWEEPOUT_FORGE_THREADS", "zero")
    assert run(["bound", "--n", 2, "--p", 1, "--fillrad", "1"]) == 1
    monkeypatch.setenv("SWEEPOUT_FORGE_THREADS", "2")
    assert run(["bound", "--n", 2, "--p", 1, "--fillrad", "1", "--report", tmp_path / "b.json"]) == 0
    assert load(tmp_path / "b.json")["threads"] == 2
